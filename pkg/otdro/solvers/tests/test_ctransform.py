import numpy as np
import pytest
from numpy.testing import assert_almost_equal, assert_array_almost_equal, assert_equal

from ...exceptions import DroException
from ...objective import Dataset, ObjectiveFamily, ObjectiveKind, UserLoss, loss_eval, loss_values
from ...transport import Norm, PenaltyFamily, PenaltySpec, TransportCost
from ...utils.test_helpers import ProblemHelper
from ..ctransform import (
    Certificate,
    GainProfile,
    InnerSolverConfig,
    InnerStrategy,
    c_delta_transform,
    c_delta_transform_values,
    c_transform,
    c_transform_values,
    delta_transform_gap,
    full_attack_transform,
    full_attack_values,
)

POWER = PenaltySpec(PenaltyFamily.PowerLaw, alpha=1.0, q=2.0)
HARD = PenaltySpec(PenaltyFamily.HardBall)


def test_hard_ball_zero_radius_is_the_loss():
    fam, theta, z = ProblemHelper.get_ramp_point()
    result = c_transform(fam, theta, TransportCost(HARD, 0.0), 3.0, z)
    assert_equal(result.value, loss_eval(fam, theta, z))
    assert result.certificate is Certificate.Exact


def test_ramp_closed_form():
    fam, theta, z = ProblemHelper.get_ramp_point()
    result = c_transform(fam, theta, TransportCost(POWER, 0.0), 2.0, z)
    assert_almost_equal(result.value, 0.625, decimal=12)
    assert_almost_equal(result.argmax_x[0], 0.25, decimal=5)
    assert result.certificate is Certificate.Exact


def test_c_delta_examples():
    fam, theta, z = ProblemHelper.get_ramp_point()
    assert_almost_equal(c_delta_transform(fam, theta, 0.3, Norm.L2, z), 0.8, decimal=14)
    assert_equal(c_delta_transform(fam, theta, 0.0, Norm.L2, z), 0.5)
    assert_equal(c_delta_transform(fam, [0.0], 0.3, Norm.L2, z), 0.5)


def test_rejects_non_positive_lambda():
    fam, theta, z = ProblemHelper.get_ramp_point()
    with pytest.raises(DroException):
        c_transform(fam, theta, TransportCost(POWER, 0.0), 0.0, z)


def test_large_lambda_approaches_c_delta():
    fam, theta, z = ProblemHelper.get_ramp_point()
    cost = TransportCost(POWER, 0.2)
    hard = c_delta_transform(fam, theta, 0.2, Norm.L2, z)
    for lam in [1e2, 1e4, 1e6]:
        gap = c_transform(fam, theta, cost, lam, z).value - hard
        assert 0.0 <= gap <= float(cost.slack(lam, fam.lipschitz_x)) + 1e-12


def test_gain_profile_against_enumeration():
    rng = np.random.default_rng(20)
    for norm in Norm:
        a = rng.normal(size=(30, 3))
        x = rng.uniform(-1, 1, (30, 3))
        profile = GainProfile(a, x, 1.0, norm)
        t = rng.uniform(0, 2.5, 30)
        gain = profile.gain(t)
        v = profile.displacement(t)
        assert np.all(norm.of(v) <= np.minimum(t, profile.saturation) + 1e-9)
        assert np.all(np.abs(x + v) <= 1.0 + 1e-12)
        assert_array_almost_equal(np.einsum("ij,ij->i", a, v), gain, decimal=10)
        # random feasible displacements never beat the gain
        for _ in range(200):
            w = rng.normal(size=(30, 3))
            w *= (t * rng.uniform(0, 1, 30) / np.maximum(norm.of(w), 1e-12))[:, None]
            w = np.clip(x + w, -1.0, 1.0) - x
            assert np.all(np.einsum("ij,ij->i", a, w) <= gain + 1e-10)


def test_saturated_displacement_is_the_capped_move():
    a = np.array([[0.3, -0.5], [1.0, 0.0]])
    x = np.array([[0.2, -0.4], [0.5, 0.1]])
    profile = GainProfile(a, x, 1.0, Norm.L2)
    t = profile.saturation * np.array([1.0, 3.0])
    v = profile.displacement(t)
    assert_array_almost_equal(v, [[0.8, -0.6], [0.5, 0.0]], decimal=14)
    assert_array_almost_equal(np.einsum("ij,ij->i", a, v), profile.gain(t), decimal=14)


def test_argmax_attains_the_value():
    fam = ObjectiveFamily(ObjectiveKind.ClampedLinearMargin, 1)
    theta = np.array([-0.8697])
    data = Dataset([[0.139], [-0.241], [-0.352]], [1.0, 1.0, 1.0])
    batch = c_delta_transform_values(fam, theta, 5.0, Norm.L2, data)
    assert_array_almost_equal(
        loss_values(fam, theta, batch.argmax_x, data.y), batch.values, decimal=12
    )

    rng = np.random.default_rng(25)
    data = ProblemHelper.get_random_dataset(rng, 60, 3)
    for kind in [ObjectiveKind.ClampedLinearMargin, ObjectiveKind.SaturatedLogistic]:
        for norm in Norm:
            fam = ObjectiveFamily(
                kind,
                3,
                norm=norm,
                lipschitz_x_target=2.0 if kind is ObjectiveKind.SaturatedLogistic else None,
            )
            theta = ProblemHelper.get_random_theta(rng, 3)
            for delta in [0.1, 0.5, 5.0]:
                batch = c_delta_transform_values(fam, theta, delta, norm, data)
                assert np.all(norm.of(batch.argmax_x - data.x) <= delta + 1e-12)
                assert_array_almost_equal(
                    loss_values(fam, theta, batch.argmax_x, data.y),
                    batch.values,
                    decimal=10,
                )

            cost = TransportCost(POWER, 0.1, norm)
            batch = full_attack_values(fam, theta, cost, data)
            assert_array_almost_equal(
                loss_values(fam, theta, batch.argmax_x, data.y), batch.values, decimal=10
            )
            for lam in [1e-2, 1.0, 1e2]:
                batch = c_transform_values(fam, theta, cost, lam, data)
                attained = loss_values(fam, theta, batch.argmax_x, data.y) - lam * (
                    cost.profile(norm.of(batch.argmax_x - data.x))
                )
                assert_array_almost_equal(attained, batch.values, decimal=8)


def test_sandwich():
    rng = np.random.default_rng(21)
    data = ProblemHelper.get_random_dataset(rng, 1000, 2)
    lambdas = np.geomspace(1e-2, 1e2, 20)
    for kind in [ObjectiveKind.ClampedLinearMargin, ObjectiveKind.SaturatedLogistic]:
        fam = ObjectiveFamily(
            kind,
            2,
            lipschitz_x_target=2.0 if kind is ObjectiveKind.SaturatedLogistic else None,
        )
        theta = ProblemHelper.get_random_theta(rng, 2)
        for penalty in ProblemHelper.get_penalties():
            cost = TransportCost(penalty, 0.1)
            hard = c_delta_transform_values(fam, theta, 0.1, Norm.L2, data).values
            for lam in lambdas:
                soft = c_transform_values(fam, theta, cost, lam, data).values
                gap = soft - hard
                assert np.all(gap >= -1e-12)
                assert np.all(gap <= float(cost.slack(lam, fam.lipschitz_x)) + 1e-9)


def test_monotone_and_lipschitz_in_lambda():
    rng = np.random.default_rng(22)
    data = ProblemHelper.get_random_dataset(rng, 200, 2)
    fam = ObjectiveFamily(ObjectiveKind.ClampedLinearMargin, 2)
    theta = ProblemHelper.get_random_theta(rng, 2)
    for penalty in ProblemHelper.get_penalties()[1:]:
        cost = ProblemHelper.get_cost(penalty, 0.1, Norm.L2, 1.0, 2)
        lambdas = np.geomspace(1e-2, 1e2, 30)
        values = np.array(
            [c_transform_values(fam, theta, cost, lam, data).values for lam in lambdas]
        )
        assert np.all(np.diff(values, axis=0) <= 1e-10)
        steps = np.abs(np.diff(values, axis=0))
        assert np.all(steps <= cost.M * np.diff(lambdas)[:, None] + 1e-10)


def test_theta_contraction():
    rng = np.random.default_rng(23)
    data = ProblemHelper.get_random_dataset(rng, 300, 2)
    fam = ObjectiveFamily(ObjectiveKind.ClampedLinearMargin, 2)
    cost = TransportCost(POWER, 0.1)
    for _ in range(10):
        t1 = ProblemHelper.get_random_theta(rng, 2)
        t2 = ProblemHelper.get_random_theta(rng, 2)
        a = c_transform_values(fam, t1, cost, 0.5, data).values
        b = c_transform_values(fam, t2, cost, 0.5, data).values
        assert np.max(np.abs(a - b)) <= fam.lipschitz_theta * np.linalg.norm(t1 - t2) + 1e-9


def test_ascent_and_grid_match_brute_force():
    fam = ObjectiveFamily(ObjectiveKind.SaturatedLogistic, 1, lipschitz_x_target=2.0)
    cost = TransportCost(POWER, 0.1)
    grid = np.linspace(-1.0, 1.0, 200001)
    cfg = InnerSolverConfig()
    ascent_cfg = InnerSolverConfig(strategy=InnerStrategy.MultiStartAscent)
    for x0, y, lam in [(0.0, 1.0, 1.0), (0.4, -1.0, 0.3), (-0.7, 1.0, 3.0)]:
        theta = np.array([0.8])
        brute = np.max(
            loss_values(fam, theta, grid[:, None], np.full(grid.shape, y))
            - lam * cost.profile(np.abs(grid - x0))
        )
        z = (np.array([x0]), y)
        by_grid = c_transform(fam, theta, cost, lam, z, cfg)
        by_ascent = c_transform(fam, theta, cost, lam, z, ascent_cfg)
        assert by_grid.certificate is Certificate.LowerBound
        assert abs(by_grid.value - brute) <= cfg.tolerance
        assert abs(by_ascent.value - brute) <= cfg.tolerance


def test_user_defined_uses_ascent():
    user = UserLoss(
        loss=lambda theta, x, y: np.clip(x[:, 0], 0.0, 1.0),
        grad_x=lambda theta, x, y: ((x > 0) & (x < 1)).astype(float),
        beta=1.0,
        lipschitz_x=1.0,
        lipschitz_theta=1.0,
    )
    fam = ObjectiveFamily.user_defined(1, user)
    cost = TransportCost(POWER, 0.0)
    result = c_transform(fam, [0.0], cost, 2.0, (np.array([0.0]), 1.0))
    assert result.certificate is Certificate.LowerBound
    assert abs(result.value - 0.125) <= 1e-6
    assert_almost_equal(full_attack_transform(fam, [0.0], cost, ([0.0], 1.0)), 1.0)


def test_delta_transform_gap():
    rng = np.random.default_rng(24)
    data = ProblemHelper.get_random_dataset(rng, 50, 2)
    fam = ObjectiveFamily(ObjectiveKind.ClampedLinearMargin, 2)
    theta = ProblemHelper.get_random_theta(rng, 2)
    assert_equal(delta_transform_gap(fam, theta, TransportCost(HARD, 0.2), 1.0, data), 0.0)
    cost = TransportCost(POWER, 0.2)
    gaps = [delta_transform_gap(fam, theta, cost, lam, data) for lam in [1.0, 1e2, 1e4]]
    assert gaps[0] >= gaps[1] >= gaps[2] >= 0.0
    assert gaps[2] <= float(cost.slack(1e4, fam.lipschitz_x))


def test_ramp_single_point_gap():
    fam, theta, z = ProblemHelper.get_ramp_point()
    data = Dataset(z[0][None, :], [z[1]])
    gap = delta_transform_gap(fam, theta, TransportCost(POWER, 0.0), 2.0, data)
    assert_almost_equal(gap, 0.125, decimal=12)


def test_full_attack():
    fam, theta, z = ProblemHelper.get_ramp_point()
    assert_equal(full_attack_transform(fam, theta, TransportCost(POWER, 0.0), z), 1.0)
    assert_almost_equal(
        full_attack_transform(fam, theta, TransportCost(HARD, 0.3), z), 0.8
    )


if __name__ == "__main__":
    pytest.main([__file__])
