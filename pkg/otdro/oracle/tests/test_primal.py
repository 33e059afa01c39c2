import numpy as np
import pytest
from numpy.testing import assert_almost_equal, assert_array_almost_equal
from scipy.special import logsumexp

from ...divergence import f_divergence_finite
from ...exceptions import DroException
from ...objective import Dataset, ObjectiveKind
from ...solvers import (
    Certificate,
    DualProblem,
    DualSolution,
    c_delta_transform_values,
    lambda_f,
    ot_dro_dual,
    otreg_fdiv_dual,
)
from ...solvers.cumulant import sample_range_domain
from ...transport import Norm
from ...utils import golden_section_minimize
from ...utils.test_helpers import ProblemHelper
from ..primal import (
    FiniteInstance,
    PrimalMethod,
    PrimalSolverConfig,
    build_finite_instance,
    ot_primal_lp,
    otreg_primal_convex,
    weak_duality_check,
)

KL, ALPHA2 = ProblemHelper.get_divergences()


def _analytic_instance():
    grid = np.linspace(0.0, 1.0, 101)
    grid[25] = 0.25
    return FiniteInstance(
        np.zeros((1, 1)), np.ones(1), [grid[:, None]], [grid], [grid ** 2]
    )


def _random_instance(rng, n, m):
    sources = rng.uniform(-1, 1, (n, 1))
    candidates, losses, costs = [], [], []
    for i in range(n):
        points = np.vstack([sources[i], rng.uniform(-1, 1, (m - 1, 1))])
        candidates.append(points)
        losses.append(rng.uniform(0, 1, m))
        costs.append((points[:, 0] - sources[i, 0]) ** 2)
    return FiniteInstance(sources, np.ones(n), candidates, losses, costs)


def _discrete_dual(inst, r, spec=None):
    """
    Dual built on the discrete c-transform, convex in lambda: a log-spaced
    grid followed by golden section around the best grid point.
    """

    def value(log_lam):
        lam = np.exp(log_lam)
        transform = np.array(
            [np.max(loss - lam * cost) for loss, cost in zip(inst.losses, inst.costs)]
        )
        if spec is None:
            return lam * r + float(np.mean(transform))
        phi = transform / lam
        inner, _ = lambda_f(phi, spec, sample_range_domain(spec, phi))
        return lam * r + lam * float(inner)

    grid = np.linspace(np.log(1e-6), np.log(1e4), 401)
    i = int(np.argmin([value(g) for g in grid]))
    lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    return float(golden_section_minimize(value, lo, hi, 1e-12).minimum)


def test_analytic_ot_instance():
    assert abs(ot_primal_lp(_analytic_instance(), 1.0 / 16.0) - 0.25) <= 1e-6


def test_zero_budget_is_mean_loss():
    rng = np.random.default_rng(70)
    inst = _random_instance(rng, 4, 6)
    assert_almost_equal(ot_primal_lp(inst, 0.0), inst.mean_loss, decimal=12)
    for spec in [KL, ALPHA2]:
        assert_almost_equal(otreg_primal_convex(inst, spec, 0.0).value, inst.mean_loss)


def test_large_budget_is_mean_max_loss():
    rng = np.random.default_rng(71)
    inst = _random_instance(rng, 5, 8)
    r = max(float(np.max(c)) for c in inst.costs)
    expected = float(np.mean([np.max(v) for v in inst.losses]))
    assert_almost_equal(ot_primal_lp(inst, r), expected, decimal=9)


def test_ot_primal_monotone_in_budget():
    rng = np.random.default_rng(72)
    inst = _random_instance(rng, 6, 10)
    values = [ot_primal_lp(inst, r) for r in [0.0, 0.01, 0.05, 0.2, 1.0]]
    assert np.all(np.diff(values) >= -1e-9)


def test_ot_primal_matches_discrete_dual():
    rng = np.random.default_rng(73)
    for _ in range(10):
        inst = _random_instance(rng, 4, 8)
        r = rng.uniform(0.01, 0.3)
        assert abs(ot_primal_lp(inst, r) - _discrete_dual(inst, r)) <= 1e-4


def test_instance_validation():
    with pytest.raises(DroException):
        FiniteInstance(np.zeros((1, 1)), np.ones(1), [np.ones((2, 1))], [[0, 1]], [[1, 1]])
    with pytest.raises(DroException):
        FiniteInstance(np.zeros((1, 1)), np.ones(1), [np.zeros((1, 1))], [[0]], [[-1]])
    with pytest.raises(DroException):
        ot_primal_lp(_analytic_instance(), -1.0)


def test_pruning_drops_infinite_costs():
    inst = FiniteInstance(
        np.zeros((1, 1)),
        np.ones(1),
        [np.array([[0.0], [1.0]])],
        [np.array([0.0, 1.0])],
        [np.array([0.0, np.inf])],
    )
    assert inst.pruned().n_candidates == 1
    assert_almost_equal(ot_primal_lp(inst, 10.0), 0.0)


def test_ot_strong_duality():
    rng = np.random.default_rng(74)
    penalties = ProblemHelper.get_penalties()
    for trial in range(50):
        dim = 1 if trial < 40 else 2
        prob = ProblemHelper.get_random_problem(
            rng,
            n=int(rng.integers(2, 9)),
            dim=dim,
            penalty=penalties[trial % len(penalties)],
            radius=rng.uniform(0.01, 0.5),
        )
        dual = ot_dro_dual(prob)
        inst = build_finite_instance(prob, 41 if dim == 1 else 6, dual)
        assert max(len(v) for v in inst.losses) <= 50
        primal = ot_primal_lp(inst, prob.radius)
        report = weak_duality_check(
            inst, dual.value, primal, dual.certificate, 1e-5 * (1.0 + abs(dual.value))
        )
        assert report.passed, report.rows


def test_kl_without_transport_matches_log_mean_exp_dual():
    rng = np.random.default_rng(75)
    for _ in range(5):
        n = 5
        sources = rng.uniform(-1, 1, (n, 1))
        losses = rng.uniform(0, 1, n)
        inst = FiniteInstance(
            sources,
            np.ones(n),
            [s[None, :] for s in sources],
            [np.array([v]) for v in losses],
            [np.zeros(1)] * n,
        )
        r = rng.uniform(0.05, 0.5)
        lam = np.geomspace(1e-4, 1e4, 40001)
        dual = np.min(
            lam * r
            + lam * (logsumexp(losses[None, :] / lam[:, None], axis=1) - np.log(n))
        )
        primal = otreg_primal_convex(inst, KL, r)
        assert abs(primal.value - dual) <= 1e-4 * (1.0 + abs(dual))


def test_alpha_small_instance_matches_discrete_dual():
    sources = np.array([[0.0], [0.5]])
    candidates = [np.array([[0.0], [0.3], [-0.4]]), np.array([[0.5], [0.9], [0.1]])]
    losses = [np.array([0.2, 0.6, 0.5]), np.array([0.4, 0.9, 0.3])]
    costs = [(c[:, 0] - s[0]) ** 2 for c, s in zip(candidates, sources)]
    inst = FiniteInstance(sources, np.ones(2), candidates, losses, costs)
    for r in [0.01, 0.05]:
        primal = otreg_primal_convex(inst, ALPHA2, r).value
        dual = _discrete_dual(inst, r, ALPHA2)
        assert primal <= dual + 1e-6
        assert abs(primal - dual) <= 1e-3 * abs(dual)


def test_otreg_primal_feasible_and_monotone():
    rng = np.random.default_rng(76)
    inst = _random_instance(rng, 4, 6)
    for spec in [KL, ALPHA2]:
        values = []
        for r in [0.01, 0.1, 0.5]:
            result = otreg_primal_convex(inst, spec, r)
            assert result.budget_used <= r + 1e-9
            values.append(result.value)
        assert np.all(np.diff(values) >= -1e-6)
        assert values[0] >= inst.mean_loss - 1e-9


def test_projected_subgradient_is_the_default():
    assert PrimalSolverConfig().method is PrimalMethod.ProjectedSubgradient


def test_projected_subgradient_matches_discrete_dual():
    rng = np.random.default_rng(77)
    slsqp = PrimalSolverConfig(PrimalMethod.SLSQP)
    for _ in range(4):
        inst = _random_instance(rng, 4, 6)
        for spec in [KL, ALPHA2]:
            for r in [0.02, 0.1, 0.5]:
                result = otreg_primal_convex(inst, spec, r)
                dual = _discrete_dual(inst, r, spec)
                assert result.converged
                assert result.budget_used <= r + 1e-9
                assert result.value <= dual + 1e-6
                assert abs(result.value - dual) <= 1e-5 * (1.0 + abs(dual))
                # both are feasible values of the same program
                other = otreg_primal_convex(inst, spec, r, slsqp)
                assert other.value <= result.value + 1e-6


def test_otreg_strong_duality():
    rng = np.random.default_rng(78)
    for trial in range(20):
        spec = KL if trial % 2 == 0 else ALPHA2
        prob = ProblemHelper.get_random_problem(
            rng,
            n=int(rng.integers(2, 5)),
            dim=1,
            divergence=spec,
            radius=rng.uniform(0.05, 0.5),
            kind=ObjectiveKind.ClampedLinearMargin,
        )
        dual = otreg_fdiv_dual(prob)
        inst = build_finite_instance(prob, 9, dual)
        primal = otreg_primal_convex(inst, spec, prob.radius)
        report = weak_duality_check(
            inst, dual.value, primal.value, Certificate.LowerBound, 1e-8
        )
        assert report.passed, report.rows
        assert abs(primal.value - dual.value) <= 1e-3 * abs(dual.value)

def test_hard_ball_maximizers_stay_candidates():
    rng = np.random.default_rng(79)
    hard = ProblemHelper.get_penalties()[0]
    for _ in range(10):
        prob = ProblemHelper.get_random_problem(
            rng, n=6, dim=2, penalty=hard, radius=0.2, delta=0.3
        )
        dual = ot_dro_dual(prob)
        attack = c_delta_transform_values(
            prob.fam, prob.theta, 0.3, Norm.L2, prob.sample
        )
        inst = build_finite_instance(prob, 3, dual)
        assert_array_almost_equal(
            [np.max(v) for v in inst.losses], attack.values, decimal=10
        )
        primal = ot_primal_lp(inst, prob.radius)
        assert abs(primal - dual.value) <= 1e-9 * (1.0 + abs(dual.value))


def test_boundary_dual_adds_cheapest_saturating_points():
    fam, theta, (x, y) = ProblemHelper.get_ramp_point()
    power = ProblemHelper.get_penalties()[1]
    cost = ProblemHelper.get_cost(power, 0.1, Norm.L2, fam.box, 1)
    prob = DualProblem(fam, theta, cost, 0.5, Dataset(x[None, :], [y]), KL)
    inst = build_finite_instance(prob, 3, DualSolution(1.0, 0.0, boundary=True))
    saturated = inst.losses[0] >= 1.0 - 1e-9
    # the grid and the attack-saturated point only reach the loss at x~ = 1
    assert np.min(inst.costs[0][saturated]) <= float(cost.profile(0.5 + 1e-4))
    assert np.min(inst.costs[0][saturated]) < float(cost.profile(1.0))



def test_weak_duality_report():
    inst = _analytic_instance()
    assert weak_duality_check(inst, 0.25, 0.25).passed
    failing = weak_duality_check(inst, 0.2, 0.25)
    assert not failing.passed
    with pytest.raises(DroException):
        failing.raise_on_failure()
    # a lower-bound dual only constrains the primal from above
    assert weak_duality_check(inst, 0.3, 0.25, Certificate.LowerBound).passed
    assert not weak_duality_check(inst, 0.3, 0.25, Certificate.Exact).passed


def test_divergence_term_at_zero_mass():
    # f(0) stays finite for both families
    for spec in [KL, ALPHA2]:
        assert f_divergence_finite(spec, [0.0, 1.0], [0.5, 0.5]).is_finite


if __name__ == "__main__":
    pytest.main([__file__])
