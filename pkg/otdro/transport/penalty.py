import dataclasses
import logging
from enum import Enum

import numpy as np

import otdro.default as default
from ..exceptions import DroException
from ..utils import ExtendedReal, bisection_batch

_logger = logging.getLogger(__name__)


class PenaltyFamily(Enum):
    """Penalty applied to the norm excess over the free radius delta"""

    HardBall = "hard_ball"
    PowerLaw = "power_law"
    PowerPlusLinear = "power_plus_linear"
    Exponential = "exponential"


@dataclasses.dataclass(frozen=True)
class PenaltySpec:
    family: PenaltyFamily
    alpha: float = None
    q: float = None
    eta: float = None

    def __post_init__(self):
        family = self.family
        if family is PenaltyFamily.HardBall:
            if any(v is not None for v in (self.alpha, self.q, self.eta)):
                raise DroException(
                    "HardBall penalty takes no parameters",
                    DroException.ExceptionType.Domain,
                )
            return

        if self.alpha is None or self.alpha <= 0:
            raise DroException(
                "{} penalty requires alpha > 0".format(family.name),
                DroException.ExceptionType.Domain,
            )
        if family is PenaltyFamily.Exponential:
            if self.q is None or self.q <= 0:
                raise DroException(
                    "Exponential penalty requires q > 0",
                    DroException.ExceptionType.Domain,
                )
        elif self.q is None or self.q <= 1:
            raise DroException(
                "{} penalty requires q > 1".format(family.name),
                DroException.ExceptionType.Domain,
            )
        if family is PenaltyFamily.PowerPlusLinear:
            if self.eta is None or self.eta <= 0:
                raise DroException(
                    "PowerPlusLinear penalty requires eta > 0",
                    DroException.ExceptionType.Domain,
                )
        elif self.eta is not None:
            raise DroException(
                "{} penalty takes no eta".format(family.name),
                DroException.ExceptionType.Domain,
            )

    @property
    def is_hard(self):
        return self.family is PenaltyFamily.HardBall

    @property
    def linear_threshold(self):
        """Largest s with psi*(s) = 0 for the families that have one"""
        if self.family is PenaltyFamily.PowerPlusLinear:
            return self.eta
        if self.family is PenaltyFamily.Exponential:
            return self.alpha * self.q
        return None

    def values(self, t):
        t = np.asarray(t, dtype=float)
        family = self.family
        if family is PenaltyFamily.HardBall:
            return np.where(t > 0, np.inf, 0.0)
        if family is PenaltyFamily.PowerLaw:
            return self.alpha * np.power(t, self.q)
        if family is PenaltyFamily.PowerPlusLinear:
            return self.alpha * np.power(t, self.q) + self.eta * t
        with np.errstate(over="ignore"):
            return self.alpha * np.expm1(self.q * t)

    def derivative(self, t):
        """Right derivative of psi for the real-valued families"""
        t = np.asarray(t, dtype=float)
        family = self.family
        if family is PenaltyFamily.HardBall:
            raise DroException(
                "HardBall penalty has no derivative",
                DroException.ExceptionType.Domain,
            )
        if family is PenaltyFamily.PowerLaw:
            return self.alpha * self.q * np.power(t, self.q - 1.0)
        if family is PenaltyFamily.PowerPlusLinear:
            return self.alpha * self.q * np.power(t, self.q - 1.0) + self.eta
        with np.errstate(over="ignore"):
            return self.alpha * self.q * np.exp(self.q * t)

    def conjugate(self, s):
        """Vectorised psi*(s) = sup_t {s t - psi(t)} on s > 0"""
        s = np.asarray(s, dtype=float)
        family = self.family
        if family is PenaltyFamily.HardBall:
            return np.zeros_like(s)
        a, q = self.alpha, self.q
        if family is PenaltyFamily.PowerLaw:
            return a * (q - 1.0) * np.power(s / (a * q), q / (q - 1.0))
        if family is PenaltyFamily.PowerPlusLinear:
            excess = np.maximum(s - self.eta, 0.0)
            return a * (q - 1.0) * np.power(excess / (a * q), q / (q - 1.0))
        ratio = np.maximum(s / (a * q), 1.0)
        value = (s / q) * np.log(ratio) - a * (ratio - 1.0)
        return np.where(s <= a * q, 0.0, value)

    def to_dict(self):
        values = {"family": self.family.value}
        for key in ("alpha", "q", "eta"):
            if getattr(self, key) is not None:
                values[key] = getattr(self, key)
        return values


def psi_eval(p, t):
    if t < 0:
        raise DroException(
            "psi is evaluated on t >= 0, got {}".format(t),
            DroException.ExceptionType.Domain,
        )
    if p.is_hard:
        return ExtendedReal.positive_infinity() if t > 0 else ExtendedReal.finite(0.0)
    value = float(p.values(t))
    return ExtendedReal.of(value)


def psi_star(p, s):
    if s <= 0:
        raise DroException(
            "psi* is evaluated on s > 0, got {}".format(s),
            DroException.ExceptionType.Domain,
        )
    return float(p.conjugate(s))


def penalty_slack(p, lam, lipschitz_x):
    """lam * psi*(L_X / lam), the sandwich-lemma gap bound"""
    lam = np.asarray(lam, dtype=float)
    with np.errstate(over="ignore", divide="ignore"):
        return lam * p.conjugate(lipschitz_x / lam)


def lambda_star_values(p, eps2, lipschitz_x):
    """
    Vectorised inf{lam > 0 : lam psi*(L_X / lam) <= eps2}.

    Closed form for PowerLaw; for the families whose conjugate vanishes
    on (0, threshold] the answer lies in (0, L_X / threshold] and is found
    by bisection in log-space.
    """
    eps2 = np.asarray(eps2, dtype=float)
    if np.any(eps2 <= 0):
        raise DroException(
            "eps2 must be > 0", DroException.ExceptionType.Domain
        )
    family = p.family
    if family is PenaltyFamily.HardBall:
        return np.zeros_like(eps2)
    if family is PenaltyFamily.PowerLaw:
        a, q = p.alpha, p.q
        return (
            (lipschitz_x / q) ** q
            * (q - 1.0) ** (q - 1.0)
            * np.power(eps2, -(q - 1.0))
            / a
        )

    hi = np.full(eps2.shape, lipschitz_x / p.linear_threshold)

    def satisfied(lam):
        return penalty_slack(p, lam, lipschitz_x) <= eps2

    lo = hi.copy()
    floor = np.finfo(float).tiny
    for _ in range(2048):
        still = satisfied(lo) & (lo > floor)
        if not np.any(still):
            break
        lo = np.where(still, np.maximum(lo / default.LAMBDA_BRACKET_GROWTH, floor), lo)
    unreachable = satisfied(lo)
    if np.any(unreachable):
        _logger.info(
            "lambda* below {:.1e} for {} thresholds, reported as the floor".format(
                floor, int(np.sum(unreachable))
            )
        )

    result = bisection_batch(satisfied, lo, hi)
    return np.where(unreachable, lo, result)


def lambda_star(p, eps2, lipschitz_x):
    return float(lambda_star_values(p, np.asarray([eps2], dtype=float), lipschitz_x)[0])
