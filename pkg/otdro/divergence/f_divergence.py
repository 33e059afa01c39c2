import dataclasses
import logging
from enum import Enum
from math import exp, inf, log

import numpy as np
from scipy.special import xlogy

import otdro.default as default
from ..exceptions import DroException
from ..utils import ExtendedReal

_logger = logging.getLogger(__name__)


class DivergenceFamily(Enum):
    """Generators supported for the f-divergence neighborhoods"""

    KL = "kl"
    Alpha = "alpha"


@dataclasses.dataclass(frozen=True)
class FDivergenceSpec:
    family: DivergenceFamily
    alpha: float = None

    def __post_init__(self):
        if self.family is DivergenceFamily.Alpha:
            if self.alpha is None:
                raise DroException(
                    "Alpha divergence requires an alpha parameter",
                    DroException.ExceptionType.Domain,
                )
            if not 1.0 < self.alpha <= default.ALPHA_MAX:
                raise DroException(
                    "alpha must lie in (1, {}], got {}".format(
                        default.ALPHA_MAX, self.alpha
                    ),
                    DroException.ExceptionType.Domain,
                )
        elif self.alpha is not None:
            raise DroException(
                "KL divergence takes no alpha parameter",
                DroException.ExceptionType.Domain,
            )

    @property
    def domain_lo(self):
        return 0.0

    @property
    def domain_hi(self):
        return inf

    @property
    def s0(self):
        """Right derivative of f at 1"""
        if self.family is DivergenceFamily.KL:
            return 1.0
        return 1.0 / (self.alpha - 1.0)

    @property
    def inf_fstar(self):
        if self.family is DivergenceFamily.KL:
            return 0.0
        return 1.0 / (self.alpha * (self.alpha - 1.0))

    def generator(self, t):
        """Vectorised f on t >= 0"""
        t = np.asarray(t, dtype=float)
        if self.family is DivergenceFamily.KL:
            return xlogy(t, t)
        a = self.alpha
        return (np.power(t, a) - 1.0) / (a * (a - 1.0))

    def conjugate(self, s):
        """
        Vectorised f*. Values too large for a float come back as np.inf;
        callers turn them into ExtendedReal explicitly.
        """
        s = np.asarray(s, dtype=float)
        with np.errstate(over="ignore"):
            if self.family is DivergenceFamily.KL:
                return np.exp(s - 1.0)
            a = self.alpha
            scaled = (a - 1.0) * np.maximum(s, 0.0)
            return np.power(scaled, a / (a - 1.0)) / a + self.inf_fstar

    def conjugate_derivative(self, s):
        """Vectorised right derivative of f*"""
        s = np.asarray(s, dtype=float)
        with np.errstate(over="ignore"):
            if self.family is DivergenceFamily.KL:
                return np.exp(s - 1.0)
            a = self.alpha
            return np.power((a - 1.0) * np.maximum(s, 0.0), 1.0 / (a - 1.0))

    def to_dict(self):
        if self.family is DivergenceFamily.KL:
            return {"family": "kl"}
        return {"family": "alpha", "alpha": self.alpha}


@dataclasses.dataclass(frozen=True)
class DivergenceConstants:
    s0: float
    inf_fstar: float
    nu_tilde: float
    p0: float
    M: float
    tail_sup: float


def _to_extended(value):
    return ExtendedReal.finite(value) if np.isfinite(value) else (
        ExtendedReal.positive_infinity()
    )


def f_eval(spec, t):
    if t < 0:
        raise DroException(
            "f is evaluated on t >= 0, got {}".format(t),
            DroException.ExceptionType.Domain,
        )
    if t > spec.domain_hi:
        return ExtendedReal.positive_infinity()
    if t == 0 and spec.family is DivergenceFamily.KL:
        return ExtendedReal.finite(0.0)
    return _to_extended(float(spec.generator(t)))


def f_star_eval(spec, s):
    return _to_extended(float(spec.conjugate(s)))


def f_star_right_deriv(spec, s):
    return float(spec.conjugate_derivative(s))


def select_nu_tilde(spec, p0, M):
    """
    Largest nu_tilde of the closed form for which
    (f*)'(-M - nu_tilde) >= 1/p0.
    """
    if not 0.0 < p0 < 1.0:
        raise DroException(
            "p0 must lie in (0, 1), got {}".format(p0),
            DroException.ExceptionType.Domain,
        )
    if M < 0:
        raise DroException(
            "M must be >= 0, got {}".format(M), DroException.ExceptionType.Domain
        )

    if spec.family is DivergenceFamily.KL:
        nu_tilde = -1.0 - M - log(1.0 / p0)
    else:
        a = spec.alpha
        nu_tilde = -M - p0 ** (-(a - 1.0)) / (a - 1.0)

    slope = f_star_right_deriv(spec, -M - nu_tilde)
    if slope < 1.0 / p0 - 1e-12 * max(1.0, 1.0 / p0):
        raise DroException(
            "nu_tilde {} does not satisfy the slope condition".format(nu_tilde),
            DroException.ExceptionType.Verification,
            {"slope": slope, "required": 1.0 / p0},
        )
    return nu_tilde


def tail_sup(spec, nu_tilde):
    """Bound on sup over s >= nu_tilde of |s (f*)'(-s)|"""
    if spec.family is DivergenceFamily.KL:
        return max(exp(-2.0), -nu_tilde * exp(-nu_tilde - 1.0))
    a = spec.alpha
    return (a - 1.0) ** (1.0 / (a - 1.0)) * max(-nu_tilde, 0.0) ** (a / (a - 1.0))


def f_divergence_finite(spec, nu, mu):
    nu = np.asarray(nu, dtype=float)
    mu = np.asarray(mu, dtype=float)
    if nu.shape != mu.shape:
        raise DroException(
            "Distributions must share the index set",
            DroException.ExceptionType.Domain,
        )
    if np.any(nu < 0) or np.any(mu < 0):
        raise DroException(
            "Distributions must be non-negative", DroException.ExceptionType.Domain
        )

    if np.any((mu == 0) & (nu > 0)):
        return ExtendedReal.positive_infinity()

    support = mu > 0
    ratios = nu[support] / mu[support]
    total = float(np.sum(mu[support] * spec.generator(ratios)))
    return _to_extended(total)


def divergence_constants(spec, p0, M, nu_tilde=None):
    if nu_tilde is None:
        nu_tilde = select_nu_tilde(spec, p0, M)
    constants = DivergenceConstants(
        s0=spec.s0,
        inf_fstar=spec.inf_fstar,
        nu_tilde=nu_tilde,
        p0=p0,
        M=M,
        tail_sup=tail_sup(spec, nu_tilde),
    )
    _logger.debug("Divergence constants {}".format(constants))
    return constants


KL = FDivergenceSpec(DivergenceFamily.KL)
