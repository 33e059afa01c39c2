import logging
from enum import Enum

import numpy as np
from scipy.special import logsumexp

import otdro.default as default
from ..exceptions import DroException
from ..utils import golden_section_minimize

_logger = logging.getLogger(__name__)


class NuRule(Enum):
    """
    Bounded search domain for the nu of the cumulant functional.

    SampleRange : [min phi - s0, max phi - s0]
    Shifted : the c-transform is shifted by sup L so that phi <= 0 and nu
        ranges over [nu_tilde, -s0], nu_tilde from the class frequencies
    """

    SampleRange = "sample_range"
    Shifted = "shifted"


def _weights(phi, weights):
    if weights is None:
        return np.full(phi.shape, 1.0 / phi.shape[0])
    weights = np.asarray(weights, dtype=float)
    if weights.shape != phi.shape or np.any(weights < 0):
        raise DroException(
            "weights must be a non-negative vector shaped like phi",
            DroException.ExceptionType.Domain,
        )
    return weights / np.sum(weights)


def sample_range_domain(spec, phi):
    phi = np.asarray(phi, dtype=float)
    return float(np.min(phi)) - spec.s0, float(np.max(phi)) - spec.s0


def lambda_f(phi, spec, nu_domain, weights=None):
    """
    Lambda_f^Q[phi] = inf over nu in nu_domain of nu + E_Q f*(phi - nu).

    Parameters
    ----------
    phi : array_like
        Values of phi on the support of Q, bounded above
    spec : FDivergenceSpec
    nu_domain : tuple of float
        (lo, hi), lo <= hi
    weights : array_like, optional
        Probabilities of Q, uniform when omitted

    Returns
    -------
    tuple
        (value, nu_opt) with value an ExtendedReal
    """
    phi = np.asarray(phi, dtype=float).reshape(-1)
    lo, hi = nu_domain
    if lo > hi:
        raise DroException(
            "Empty nu domain [{}, {}]".format(lo, hi), DroException.ExceptionType.Domain
        )
    q = _weights(phi, weights)

    def objective(nu):
        return nu + float(np.sum(q * spec.conjugate(phi - nu)))

    tolerance = default.NU_TOLERANCE * max(1.0, hi - lo)
    result = golden_section_minimize(objective, lo, hi, tolerance)
    return result.minimum, result.argmin


def log_mean_exp(phi, weights=None):
    """log E_Q e^phi, the KL case of the cumulant functional"""
    phi = np.asarray(phi, dtype=float).reshape(-1)
    return float(logsumexp(phi, b=_weights(phi, weights)))


def shift_identity_gap(phi, spec, gamma, weights=None):
    """|Lambda_f[phi + gamma] - gamma - Lambda_f[phi]|"""
    phi = np.asarray(phi, dtype=float)
    base, _ = lambda_f(phi, spec, sample_range_domain(spec, phi), weights)
    moved, _ = lambda_f(
        phi + gamma, spec, sample_range_domain(spec, phi + gamma), weights
    )
    return abs(float(moved) - gamma - float(base))
