from math import e, sqrt

import numpy as np
import pytest
from numpy.testing import assert_almost_equal, assert_equal

from ...exceptions import DroException
from ..penalty import (
    PenaltyFamily,
    PenaltySpec,
    lambda_star,
    lambda_star_values,
    penalty_slack,
    psi_eval,
    psi_star,
)

HARD = PenaltySpec(PenaltyFamily.HardBall)
POWER = PenaltySpec(PenaltyFamily.PowerLaw, alpha=1.0, q=2.0)
POWER_LINEAR = PenaltySpec(PenaltyFamily.PowerPlusLinear, alpha=1.0, q=2.0, eta=1.0)
EXPONENTIAL = PenaltySpec(PenaltyFamily.Exponential, alpha=1.0, q=1.0)

SOFT = [
    POWER,
    PenaltySpec(PenaltyFamily.PowerLaw, alpha=0.5, q=3.0),
    POWER_LINEAR,
    PenaltySpec(PenaltyFamily.PowerPlusLinear, alpha=2.0, q=1.5, eta=0.5),
    EXPONENTIAL,
    PenaltySpec(PenaltyFamily.Exponential, alpha=0.5, q=2.0),
]


def _interior_maximizer(p, s):
    a, q = p.alpha, p.q
    if p.family is PenaltyFamily.PowerLaw:
        return (s / (a * q)) ** (1.0 / (q - 1.0))
    if p.family is PenaltyFamily.PowerPlusLinear:
        return (max(s - p.eta, 0.0) / (a * q)) ** (1.0 / (q - 1.0))
    return np.log(max(s / (a * q), 1.0)) / q


def test_psi_eval_examples():
    assert_almost_equal(float(psi_eval(POWER, 3.0)), 9.0, decimal=14)
    assert_equal(float(psi_eval(HARD, 0.0)), 0.0)
    assert not psi_eval(HARD, 1e-9).is_finite
    assert_almost_equal(float(psi_eval(EXPONENTIAL, 1.0)), e - 1.0, decimal=14)


def test_psi_eval_rejects_negative():
    with pytest.raises(DroException):
        psi_eval(POWER, -1.0)


def test_psi_star_examples():
    assert_almost_equal(psi_star(POWER, 2.0), 1.0, decimal=14)
    linear3 = PenaltySpec(PenaltyFamily.PowerPlusLinear, alpha=1.0, q=2.0, eta=3.0)
    assert_equal(psi_star(linear3, 2.0), 0.0)
    assert_equal(psi_star(HARD, 7.0), 0.0)


def test_psi_star_rejects_non_positive():
    with pytest.raises(DroException):
        psi_star(POWER, 0.0)


def test_invalid_parameters():
    with pytest.raises(DroException):
        PenaltySpec(PenaltyFamily.PowerLaw, alpha=1.0, q=1.0)
    with pytest.raises(DroException):
        PenaltySpec(PenaltyFamily.PowerPlusLinear, alpha=1.0, q=2.0)
    with pytest.raises(DroException):
        PenaltySpec(PenaltyFamily.HardBall, alpha=1.0)
    with pytest.raises(DroException):
        PenaltySpec(PenaltyFamily.Exponential, alpha=-1.0, q=1.0)


def test_conjugate_matches_brute_force():
    s_grid = np.linspace(0.1, 10.0, 100)
    t_grid = np.linspace(0.0, 20.0, 200001)
    for p in SOFT:
        psi_t = p.values(t_grid)
        for s in s_grid:
            t_star = _interior_maximizer(p, s)
            analytic = s * t_star - float(p.values(t_star))
            brute = max(float(np.max(s * t_grid - psi_t)), analytic)
            assert abs(psi_star(p, s) - brute) <= 1e-7


def test_exponential_breakpoint_is_zero():
    p = PenaltySpec(PenaltyFamily.Exponential, alpha=0.5, q=2.0)
    assert_equal(psi_star(p, 1.0), 0.0)
    assert psi_star(p, 1.0 + 1e-3) > 0.0


def test_slack_non_increasing():
    lam = np.geomspace(1e-3, 1e3, 200)
    for p in SOFT + [HARD]:
        values = penalty_slack(p, lam, 2.0)
        assert np.all(np.diff(values) <= 1e-12 * np.maximum(1.0, values[:-1]))


def test_lambda_star_examples():
    assert_almost_equal(lambda_star(POWER, 1.0, 2.0), 1.0, decimal=14)
    assert_equal(lambda_star(HARD, 3.0, 5.0), 0.0)
    # (1 - lam)^2 / (4 lam) <= 10 first holds at lam = 21 - sqrt(440)
    assert abs(lambda_star(POWER_LINEAR, 10.0, 1.0) - (21.0 - sqrt(440.0))) <= 1e-9


def test_lambda_star_threshold():
    for p in SOFT:
        for eps2 in [0.01, 0.3, 1.0, 5.0]:
            for lipschitz_x in [0.5, 2.0]:
                lam = lambda_star(p, eps2, lipschitz_x)
                assert lam > 0.0
                assert float(penalty_slack(p, lam, lipschitz_x)) <= eps2 + 1e-8
                below = lam - 1e-6
                if below > 0:
                    assert float(penalty_slack(p, below, lipschitz_x)) > eps2


def test_lambda_star_vectorised_agrees():
    eps2 = np.array([0.05, 0.5, 2.0])
    for p in SOFT:
        batch = lambda_star_values(p, eps2, 1.5)
        for value, e2 in zip(batch, eps2):
            assert_equal(value, lambda_star(p, e2, 1.5))


def test_lambda_star_rejects_eps2():
    with pytest.raises(DroException):
        lambda_star(POWER, 0.0, 1.0)


if __name__ == "__main__":
    pytest.main([__file__])
