import dataclasses
import logging
from math import sqrt

import numpy as np

import otdro.default as default
from .extended_real import ExtendedReal

_logger = logging.getLogger(__name__)

PHI_RATIO = 2 / (1 + sqrt(5))


@dataclasses.dataclass(frozen=True)
class GoldenResult:
    argmin: float
    minimum: ExtendedReal
    evaluations: int
    converged: bool


def golden_section_minimize(
    objective,
    lo,
    hi,
    tolerance=default.OUTER_TOLERANCE,
    max_iterations=default.GOLDEN_MAX_ITERATIONS,
):
    """
    Golden ratio search for the minimum of a unimodal objective on [lo, hi].

    Parameters
    ----------
    objective : callable
        Maps a float to a float or an ExtendedReal. +inf is a legal value
        and is ordered above every finite value.
    lo, hi : float
        Bracket, lo <= hi
    tolerance : float
        Absolute width of the final bracket
    max_iterations : int
        Iteration budget

    Returns
    -------
    GoldenResult
        The midpoint of the final bracket, unless a point evaluated on the
        way is strictly better.
    """
    if lo > hi:
        raise ValueError("Empty bracket [{}, {}]".format(lo, hi))

    def evaluate(x):
        return ExtendedReal.of(objective(x))

    x_lo, x_hi = float(lo), float(hi)
    x1 = x_hi - PHI_RATIO * (x_hi - x_lo)
    x2 = x_lo + PHI_RATIO * (x_hi - x_lo)
    f1, f2 = evaluate(x1), evaluate(x2)
    evaluations = 2
    best_x, best_f = (x1, f1) if f1 <= f2 else (x2, f2)

    iteration = 0
    while iteration < max_iterations and x_hi - x_lo > tolerance:
        if f2 > f1:
            x_hi, x2, f2 = x2, x1, f1
            x1 = x_hi - PHI_RATIO * (x_hi - x_lo)
            f1 = evaluate(x1)
            candidate_x, candidate_f = x1, f1
        else:
            x_lo, x1, f1 = x1, x2, f2
            x2 = x_lo + PHI_RATIO * (x_hi - x_lo)
            f2 = evaluate(x2)
            candidate_x, candidate_f = x2, f2
        evaluations += 1
        iteration += 1
        if candidate_f < best_f:
            best_x, best_f = candidate_x, candidate_f

    mid = 0.5 * (x_lo + x_hi)
    f_mid = evaluate(mid)
    evaluations += 1
    if best_f < f_mid:
        mid, f_mid = best_x, best_f

    converged = x_hi - x_lo <= tolerance
    if not converged:
        _logger.debug(
            "Golden section stopped with bracket width {:.3e}".format(x_hi - x_lo)
        )
    return GoldenResult(mid, f_mid, evaluations, converged)


def golden_section_maximize_batch(objective, lo, hi, tolerance):
    """
    Vectorised golden ratio search for the maxima of independent unimodal
    problems. objective(t) receives an array shaped like lo and returns the
    per-problem values. Returns (argmax, max) evaluated at the best point
    seen, including the bracket ends.
    """
    lo = np.asarray(lo, dtype=float).copy()
    hi = np.asarray(hi, dtype=float).copy()
    width = np.max(hi - lo) if lo.size else 0.0
    iterations = 0
    if width > tolerance:
        iterations = int(np.ceil(np.log(tolerance / width) / np.log(PHI_RATIO)))

    best_t = lo.copy()
    best_f = objective(lo)
    f_hi = objective(hi)
    take = f_hi > best_f
    best_t = np.where(take, hi, best_t)
    best_f = np.where(take, f_hi, best_f)

    x1 = hi - PHI_RATIO * (hi - lo)
    x2 = lo + PHI_RATIO * (hi - lo)
    f1, f2 = objective(x1), objective(x2)
    for _ in range(iterations):
        move_lo = f1 < f2
        lo = np.where(move_lo, x1, lo)
        hi = np.where(move_lo, hi, x2)
        new_x1 = np.where(move_lo, x2, hi - PHI_RATIO * (hi - lo))
        new_x2 = np.where(move_lo, lo + PHI_RATIO * (hi - lo), x1)
        new_f1 = np.where(move_lo, f2, np.nan)
        new_f2 = np.where(move_lo, np.nan, f1)
        fresh = np.where(move_lo, new_x2, new_x1)
        f_fresh = objective(fresh)
        f1 = np.where(move_lo, new_f1, f_fresh)
        f2 = np.where(move_lo, f_fresh, new_f2)
        x1, x2 = new_x1, new_x2

        take = f_fresh > best_f
        best_t = np.where(take, fresh, best_t)
        best_f = np.where(take, f_fresh, best_f)

    mid = 0.5 * (lo + hi)
    f_mid = objective(mid)
    take = f_mid > best_f
    return np.where(take, mid, best_t), np.where(take, f_mid, best_f)


def bisection_batch(
    predicate,
    lo,
    hi,
    iterations=default.BISECTION_ITERATIONS,
    relative_tolerance=default.BISECTION_RELATIVE_TOLERANCE,
    geometric=True,
):
    """
    Smallest point of [lo, hi] where a monotone predicate turns true.
    predicate(hi) is assumed true and predicate(lo) false, elementwise.
    The geometric variant bisects in log-space (requires lo > 0).
    An element stops once its own bracket meets the tolerance, so its
    result does not depend on the rest of the batch.
    """
    lo = np.asarray(lo, dtype=float).copy()
    hi = np.asarray(hi, dtype=float).copy()
    for _ in range(iterations):
        active = hi - lo > relative_tolerance * np.abs(hi)
        if not np.any(active):
            break
        mid = np.sqrt(lo * hi) if geometric else 0.5 * (lo + hi)
        ok = predicate(mid)
        hi = np.where(active & ok, mid, hi)
        lo = np.where(active & ~ok, mid, lo)
    return hi


def gauss_legendre_integral(
    integrand,
    upper,
    points=default.QUADRATURE_POINTS,
    order=default.QUADRATURE_PANEL_ORDER,
):
    """
    Integral of integrand over [0, upper].

    The range [upper / points, upper] is covered by points // order
    equal-width panels of `order` Gauss-Legendre nodes each. The first
    panel [0, upper / points] is integrated after the substitution
    eps = u ** 2, which removes the square-root behaviour of entropy
    integrands at 0.

    Parameters
    ----------
    integrand : callable
        Vectorised, evaluated on positive arguments only
    upper : float
        Upper limit of integration, > 0
    points : int
        Total number of nodes of the composite rule
    order : int
        Nodes per panel

    Returns
    -------
    float
        The quadrature value
    """
    if upper <= 0:
        return 0.0

    nodes, weights = np.polynomial.legendre.leggauss(order)
    eps0 = upper / points
    panels = max(points // order, 1)

    edges = np.linspace(eps0, upper, panels + 1)
    half = 0.5 * np.diff(edges)
    centers = 0.5 * (edges[1:] + edges[:-1])
    abscissas = (centers[:, None] + half[:, None] * nodes[None, :]).ravel()
    panel_weights = (half[:, None] * weights[None, :]).ravel()
    body = float(np.sum(panel_weights * integrand(abscissas)))

    u_hi = sqrt(eps0)
    u = 0.5 * u_hi * (nodes + 1.0)
    head = float(np.sum(0.5 * u_hi * weights * integrand(u ** 2) * 2.0 * u))

    return head + body


def substream_rng(seed, stream, index):
    """Counter-based generator for (seed, stream, index), independent of call order"""
    return np.random.Generator(
        np.random.Philox(np.random.SeedSequence(seed, spawn_key=(stream, index)))
    )
