import numpy as np
import pytest
from numpy.testing import assert_almost_equal, assert_equal

from ...exceptions import DroException
from ..cost import Norm, TransportCost, cost_eval, diameter_bound, validate_M
from ..penalty import PenaltyFamily, PenaltySpec

POWER = PenaltySpec(PenaltyFamily.PowerLaw, alpha=1.0, q=2.0)
HARD = PenaltySpec(PenaltyFamily.HardBall)


def test_cost_eval_examples():
    c = TransportCost(POWER, delta=1.0, M=10.0)
    assert_equal(float(cost_eval(c, ([0.0], 1), ([0.5], 1))), 0.0)
    assert_almost_equal(float(cost_eval(c, ([0.0], 1), ([2.0], 1))), 1.0, decimal=14)
    assert not cost_eval(c, ([0.0], 1), ([0.0], -1)).is_finite


def test_cost_zero_on_diagonal():
    rng = np.random.default_rng(0)
    for norm in Norm:
        for penalty in [POWER, HARD]:
            c = TransportCost(penalty, delta=0.2, norm=norm)
            for _ in range(20):
                x = rng.uniform(-1, 1, 3)
                assert_equal(float(cost_eval(c, (x, 1), (x, 1))), 0.0)


def test_sandwich_against_hard_cost():
    rng = np.random.default_rng(1)
    penalties = [
        POWER,
        PenaltySpec(PenaltyFamily.PowerPlusLinear, alpha=1.0, q=2.0, eta=0.5),
        PenaltySpec(PenaltyFamily.Exponential, alpha=1.0, q=1.0),
    ]
    for penalty in penalties:
        for norm in Norm:
            soft = TransportCost(penalty, delta=0.3, norm=norm)
            hard = soft.hardened()
            for _ in range(200):
                x = rng.uniform(-1, 1, 2)
                x_tilde = x + rng.normal(scale=0.3, size=2)
                assert cost_eval(soft, (x, 1), (x_tilde, 1)) <= cost_eval(
                    hard, (x, 1), (x_tilde, 1)
                )


def test_linf_distance():
    c = TransportCost(POWER, delta=0.0, norm=Norm.Linf)
    assert_almost_equal(
        float(cost_eval(c, ([0.0, 0.0], 0), ([0.5, -2.0], 0))), 4.0, decimal=14
    )


def test_negative_parameters_rejected():
    with pytest.raises(DroException):
        TransportCost(POWER, delta=-0.1)
    with pytest.raises(DroException):
        TransportCost(POWER, M=-1.0)


def test_diameter_bound():
    assert_almost_equal(diameter_bound(POWER, 0.0, Norm.L2, 1.0, 1), 4.0, decimal=14)
    assert_almost_equal(diameter_bound(POWER, 1.0, Norm.Linf, 1.0, 4), 1.0, decimal=14)
    assert_equal(diameter_bound(HARD, 0.5, Norm.L2, 1.0, 3), 0.0)


def test_validate_M():
    rng = np.random.default_rng(2)
    x = rng.uniform(-1, 1, (50, 2))
    x_tilde = rng.uniform(-1, 1, (50, 2))
    M = diameter_bound(POWER, 0.1, Norm.L2, 1.0, 2)
    validate_M(TransportCost(POWER, 0.1, Norm.L2, M), x, x_tilde)
    with pytest.raises(DroException):
        validate_M(TransportCost(POWER, 0.1, Norm.L2, 1e-6), x, x_tilde)


if __name__ == "__main__":
    pytest.main([__file__])
