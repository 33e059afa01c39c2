import numpy as np
import pytest
from numpy.testing import assert_almost_equal

from ...divergence import DivergenceFamily, FDivergenceSpec
from ...exceptions import DroException
from ...objective import Dataset, ObjectiveFamily, ObjectiveKind, UserLoss
from ...transport import PenaltyFamily, PenaltySpec, TransportCost
from ...utils.test_helpers import ProblemHelper
from ..ctransform import Certificate
from ..cumulant import NuRule
from ..dual import (
    DualProblem,
    empirical_risk,
    kl_dro_dual,
    lambda_limit_check,
    ot_dro_dual,
    otreg_fdiv_dual,
    solve_dual,
)

KL, ALPHA2 = ProblemHelper.get_divergences()
POWER = PenaltySpec(PenaltyFamily.PowerLaw, alpha=1.0, q=2.0)
HARD = PenaltySpec(PenaltyFamily.HardBall)


def _ramp_problem(radius, penalty=POWER, divergence=None):
    fam, theta, z = ProblemHelper.get_ramp_point()
    data = Dataset(z[0][None, :], [z[1]])
    return DualProblem(fam, theta, TransportCost(penalty, 0.0), radius, data, divergence)


def test_ramp_ot_dual():
    solution = ot_dro_dual(_ramp_problem(1.0 / 16.0))
    assert_almost_equal(solution.value, 0.75, decimal=7)
    assert_almost_equal(solution.lambda_opt, 2.0, decimal=3)
    assert solution.certificate is Certificate.Exact
    assert not solution.boundary


def test_user_defined_ot_dual():
    user = UserLoss(
        loss=lambda theta, x, y: np.clip(x[:, 0], 0.0, 1.0),
        grad_x=lambda theta, x, y: ((x > 0) & (x < 1)).astype(float),
        beta=1.0,
        lipschitz_x=1.0,
        lipschitz_theta=1.0,
    )
    fam = ObjectiveFamily.user_defined(1, user)
    prob = DualProblem(
        fam, [0.0], TransportCost(POWER, 0.0), 1.0 / 16.0, Dataset([[0.0]], [1.0])
    )
    solution = solve_dual(prob)
    assert abs(solution.value - 0.25) <= 1e-4
    assert solution.certificate is Certificate.LowerBound


def test_hard_ball_is_attained_at_zero():
    rng = np.random.default_rng(40)
    prob = ProblemHelper.get_random_problem(rng, penalty=HARD, radius=5.0)
    solution = ot_dro_dual(prob)
    assert solution.boundary
    assert solution.lambda_opt == 0.0
    assert solution.value >= empirical_risk(prob) - 1e-12


def test_zero_theta_gives_half_beta():
    fam = ObjectiveFamily(ObjectiveKind.ClampedLinearMargin, 2)
    rng = np.random.default_rng(41)
    data = ProblemHelper.get_random_dataset(rng, 8, 2)
    cost = ProblemHelper.get_cost(POWER, 0.1, dim=2)
    for divergence in [None, KL, ALPHA2]:
        for radius in [0.01, 1.0]:
            prob = DualProblem(fam, np.zeros(2), cost, radius, data, divergence)
            solution = solve_dual(prob)
            assert_almost_equal(solution.value, 0.5, decimal=9)
            assert solution.boundary
            assert solution.lambda_opt == 0.0


def test_two_point_kl_against_lambda_grid():
    fam = ObjectiveFamily(ObjectiveKind.ClampedLinearMargin, 1)
    # losses 1 and 0
    data = Dataset([[-0.5], [0.5]], [1.0, 1.0])
    prob = DualProblem(fam, [1.0], TransportCost(HARD, 0.0), 0.1, data, KL)
    solution = kl_dro_dual(prob)
    lam = np.geomspace(1e-3, 1e3, 200001)
    grid = 0.1 * lam + lam * np.log((1.0 + np.exp(1.0 / lam)) / 2.0)
    assert abs(solution.value - float(np.min(grid))) <= 1e-6
    assert solution.value < 1.0


def test_kl_closed_form_matches_general_dual():
    rng = np.random.default_rng(42)
    for _ in range(100):
        prob = ProblemHelper.get_random_problem(
            rng, divergence=KL, radius=rng.uniform(0.01, 1.0)
        )
        closed = kl_dro_dual(prob)
        general = otreg_fdiv_dual(prob)
        assert abs(closed.value - general.value) <= 1e-8


def test_kl_nu_closed_form():
    prob = _ramp_problem(0.05, divergence=KL)
    closed = kl_dro_dual(prob)
    general = otreg_fdiv_dual(prob)
    assert_almost_equal(closed.nu_opt, general.nu_opt, decimal=4)
    assert_almost_equal(closed.rho_opt, closed.lambda_opt * closed.nu_opt, decimal=12)


def test_shifted_rule_matches_sample_range():
    rng = np.random.default_rng(43)
    for divergence in [KL, ALPHA2]:
        for _ in range(10):
            prob = ProblemHelper.get_random_problem(rng, divergence=divergence)
            sample_range = otreg_fdiv_dual(prob)
            shifted = otreg_fdiv_dual(
                DualProblem(
                    prob.fam,
                    prob.theta,
                    prob.cost,
                    prob.radius,
                    prob.sample,
                    divergence,
                    nu_rule=NuRule.Shifted,
                )
            )
            assert abs(sample_range.value - shifted.value) <= 1e-7


def test_shifted_rule_needs_soft_penalty():
    rng = np.random.default_rng(44)
    prob = ProblemHelper.get_random_problem(rng, penalty=HARD, divergence=KL)
    prob = DualProblem(
        prob.fam, prob.theta, prob.cost, prob.radius, prob.sample, KL,
        nu_rule=NuRule.Shifted,
    )
    with pytest.raises(DroException):
        otreg_fdiv_dual(prob)


def test_monotone_in_radius():
    rng = np.random.default_rng(45)
    for divergence in [None, KL, ALPHA2]:
        prob = ProblemHelper.get_random_problem(rng, divergence=divergence)
        values = [
            solve_dual(prob.with_radius(r)).value for r in [0.01, 0.05, 0.2, 1.0]
        ]
        assert np.all(np.diff(values) >= -1e-9)
        assert values[0] >= empirical_risk(prob) - 1e-9


def test_soft_cost_dominates_hard_cost():
    rng = np.random.default_rng(46)
    for divergence in [None, KL, ALPHA2]:
        for penalty in ProblemHelper.get_penalties()[1:]:
            prob = ProblemHelper.get_random_problem(
                rng, penalty=penalty, divergence=divergence
            )
            hard = prob.cost.hardened()
            soft_value = solve_dual(prob).value
            hard_value = solve_dual(
                DualProblem(
                    prob.fam, prob.theta, hard, prob.radius, prob.sample, divergence
                )
            ).value
            assert soft_value >= hard_value - 1e-9


def test_lambda_limit_check():
    rng = np.random.default_rng(47)
    grid = 0.5 * 2.0 ** np.arange(13)
    for kind in [ObjectiveKind.ClampedLinearMargin, ObjectiveKind.SaturatedLogistic]:
        for divergence in [KL, ALPHA2]:
            prob = ProblemHelper.get_random_problem(
                rng, n=20, kind=kind, divergence=divergence
            )
            report = lambda_limit_check(prob, grid)
            assert report.passed
            assert len(report.rows) == len(grid)


def test_lambda_limit_bound_example():
    rng = np.random.default_rng(48)
    prob = ProblemHelper.get_random_problem(rng, divergence=ALPHA2)
    beta = prob.fam.beta
    row = lambda_limit_check(prob, [beta]).rows[0]
    expected = float(prob.cost.slack(beta, prob.fam.lipschitz_x)) + beta * 1.0
    assert_almost_equal(row["bound"], expected, decimal=12)


def test_rejections():
    fam, theta, z = ProblemHelper.get_ramp_point()
    data = Dataset(z[0][None, :], [z[1]])
    cost = TransportCost(POWER, 0.0)
    with pytest.raises(DroException):
        DualProblem(fam, theta, cost, 0.0, data)
    with pytest.raises(DroException):
        DualProblem(fam, [2.0], cost, 0.1, data)
    with pytest.raises(DroException):
        ot_dro_dual(DualProblem(fam, theta, cost, 0.1, data, KL))
    with pytest.raises(DroException):
        otreg_fdiv_dual(DualProblem(fam, theta, cost, 0.1, data))
    with pytest.raises(DroException):
        kl_dro_dual(
            DualProblem(fam, theta, cost, 0.1, data, FDivergenceSpec(DivergenceFamily.Alpha, 3.0))
        )
    with pytest.raises(DroException):
        lambda_limit_check(DualProblem(fam, theta, cost, 0.1, data), [1.0])


def test_solution_to_dict():
    solution = ot_dro_dual(_ramp_problem(1.0 / 16.0))
    fields = solution.to_dict()
    assert fields["certificate"] == "exact"
    assert set(fields) >= {"value", "lambda_opt", "boundary", "converged"}
    assert_almost_equal(fields["value"], 0.75, decimal=7)


if __name__ == "__main__":
    pytest.main([__file__])
