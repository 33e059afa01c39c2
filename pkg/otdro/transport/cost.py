import dataclasses
import logging
from enum import Enum
from math import sqrt

import numpy as np

from ..exceptions import DroException
from ..utils import ExtendedReal
from .penalty import PenaltyFamily, PenaltySpec, penalty_slack

_logger = logging.getLogger(__name__)


class Norm(Enum):
    """Norms on the predictor space"""

    L2 = "l2"
    Linf = "linf"

    def of(self, v):
        v = np.asarray(v, dtype=float)
        if self is Norm.L2:
            return np.linalg.norm(v, axis=-1)
        return np.max(np.abs(v), axis=-1) if v.shape[-1] else np.zeros(v.shape[:-1])

    def dual_bound(self, dim):
        """sup of the dual norm over the unit L2 ball of R^dim"""
        return 1.0 if self is Norm.L2 else sqrt(dim)


@dataclasses.dataclass(frozen=True)
class TransportCost:
    """
    c((x, y), (x~, y~)) = psi(|x~ - x| - delta) 1{|x~ - x| >= delta}
    when the labels agree, +inf otherwise. M bounds every finite cost.
    """

    penalty: PenaltySpec
    delta: float = 0.0
    norm: Norm = Norm.L2
    M: float = 0.0

    def __post_init__(self):
        if self.delta < 0:
            raise DroException(
                "delta must be >= 0, got {}".format(self.delta),
                DroException.ExceptionType.Domain,
            )
        if self.M < 0:
            raise DroException(
                "M must be >= 0, got {}".format(self.M),
                DroException.ExceptionType.Domain,
            )

    @property
    def is_hard(self):
        return self.penalty.is_hard

    def profile(self, t):
        """phi(t) = psi(t - delta) 1{t >= delta} on distances t >= 0"""
        t = np.asarray(t, dtype=float)
        excess = np.maximum(t - self.delta, 0.0)
        return self.penalty.values(excess)

    def profile_derivative(self, t):
        t = np.asarray(t, dtype=float)
        excess = np.maximum(t - self.delta, 0.0)
        return np.where(t > self.delta, self.penalty.derivative(excess), 0.0)

    def slack(self, lam, lipschitz_x):
        return penalty_slack(self.penalty, lam, lipschitz_x)

    def hardened(self):
        """The PGD cost with the same radius and norm"""
        return TransportCost(
            PenaltySpec(PenaltyFamily.HardBall), self.delta, self.norm, 0.0
        )

    def to_dict(self):
        return {
            "penalty": self.penalty.to_dict(),
            "delta": self.delta,
            "norm": self.norm.value,
            "M": self.M,
        }


def cost_eval(c, z, z_tilde):
    x, y = z
    x_tilde, y_tilde = z_tilde
    if y != y_tilde:
        return ExtendedReal.positive_infinity()
    distance = float(c.norm.of(np.atleast_1d(np.asarray(x_tilde) - np.asarray(x))))
    if c.is_hard:
        return (
            ExtendedReal.finite(0.0)
            if distance <= c.delta
            else ExtendedReal.positive_infinity()
        )
    return ExtendedReal.of(float(c.profile(distance)))


def diameter_bound(penalty, delta, norm, box, dim):
    """M for a real-valued penalty on the box [-box, box]^dim"""
    if penalty.is_hard:
        return 0.0
    diameter = 2.0 * box * (sqrt(dim) if norm is Norm.L2 else 1.0)
    return float(penalty.values(max(diameter - delta, 0.0)))


def validate_M(c, x, x_tilde):
    """
    Checks c.M against finite costs of sampled same-label pairs, given as
    two (n, d) arrays.
    """
    distances = c.norm.of(np.asarray(x_tilde) - np.asarray(x))
    if c.is_hard:
        return
    largest = float(np.max(c.profile(distances))) if distances.size else 0.0
    if largest > c.M * (1 + 1e-12):
        raise DroException(
            "Cost bound M={} is below a sampled finite cost {}".format(c.M, largest),
            DroException.ExceptionType.Configuration,
            {"M": c.M, "sampled": largest},
        )
    _logger.debug("Cost bound M={} covers sampled pairs".format(c.M))
