import logging

import numpy as np

import otdro.default as default
from ..divergence import DivergenceConstants, FDivergenceSpec
from ..objective import Dataset, loss_supremum, loss_values
from ..solvers import c_transform_values
from ..utils import CheckReport
from .calculator import slope_constants

_logger = logging.getLogger(__name__)

RELATIVE_STEP = 1e-4
LAMBDA_RANGE = 1e-3


def g_values(fam, theta, cost, spec, lam, nu, data, inner_cfg=None):
    """
    g(z) = lam (f*(-nu) - f*(-dL(z) / lam - nu)) with
    dL = sup_Z L_theta - L^c_lam at every point of data.
    """
    transform = c_transform_values(fam, theta, cost, lam, data, inner_cfg).values
    gap = loss_supremum(fam, theta) - transform
    return lam * (spec.conjugate(-nu) - spec.conjugate(-gap / lam - nu))


def _uniform_ball(rng, k):
    direction = rng.normal(size=k)
    direction /= np.linalg.norm(direction)
    return direction * rng.uniform() ** (1.0 / k)


def _random_points(rng, fam, m):
    x = rng.uniform(-fam.box, fam.box, (m, fam.dim))
    return Dataset(x, rng.choice([-1.0, 1.0], m))


def loss_distance(fam, theta1, theta2, x, y):
    """max of |L_theta1 - L_theta2| over the (x, y) pairs"""
    return float(
        np.max(np.abs(loss_values(fam, theta1, x, y) - loss_values(fam, theta2, x, y)))
    )


def _sup_distance(fam, theta1, theta2, data, argmax1, argmax2, rng, m):
    """
    Estimate of ||L_theta1 - L_theta2||_inf over the sample, both
    c-transform maximizers of every point and m random box points under
    every label. The maximizers are where the two transforms are attained.
    """
    cloud = rng.uniform(-fam.box, fam.box, (m, fam.dim))
    labels = np.unique(data.y)
    x = np.vstack([data.x, argmax1, argmax2] + [cloud] * len(labels))
    y = np.concatenate([data.y, data.y, data.y] + [np.full(m, v) for v in labels])
    return loss_distance(fam, theta1, theta2, x, y)


def g_function_bounds_check(
    fam,
    cost,
    spec: FDivergenceSpec,
    consts: DivergenceConstants,
    lam_n,
    rng,
    blocks=20,
    points=50,
    inner_cfg=None,
    slack=default.CHECK_SLACK,
):
    """
    Asserts on blocks * points random (theta, lambda, nu, z) tuples:

    * 0 <= g <= beta C2
    * |g(theta1) - g(theta2)| <= C2 (||L_theta1 - L_theta2||_inf + |sup L_theta1 - sup L_theta2|)
    * |g(nu1) - g(nu2)| <= 2 lam_n C2 |nu1 - nu2|
    * |d g / d lambda| <= C1, by central differences

    with C2 = (f*)'(-nu~) and C1 the lambda-slope constant. dL holds
    sup_Z L_theta, whose move is the second term of the theta bound; it
    vanishes when both suprema agree.

    Returns
    -------
    CheckReport
    """
    c1, c2 = slope_constants(fam, spec, consts)
    nu_lo, nu_hi = consts.nu_tilde, -consts.s0
    report = CheckReport("g_function_bounds")

    for _ in range(blocks):
        theta1 = _uniform_ball(rng, fam.param_dim)
        theta2 = _uniform_ball(rng, fam.param_dim)
        lam = lam_n * np.exp(rng.uniform(np.log(LAMBDA_RANGE), 0.0))
        nu1, nu2 = rng.uniform(nu_lo, nu_hi, 2)
        data = _random_points(rng, fam, points)
        step = RELATIVE_STEP * lam

        g = g_values(fam, theta1, cost, spec, lam, nu1, data, inner_cfg)
        g_theta = g_values(fam, theta2, cost, spec, lam, nu1, data, inner_cfg)
        argmax1 = c_transform_values(fam, theta1, cost, lam, data, inner_cfg).argmax_x
        argmax2 = c_transform_values(fam, theta2, cost, lam, data, inner_cfg).argmax_x
        g_nu = g_values(fam, theta1, cost, spec, lam, nu2, data, inner_cfg)
        g_up = g_values(fam, theta1, cost, spec, lam + step, nu1, data, inner_cfg)
        g_down = g_values(fam, theta1, cost, spec, lam - step, nu1, data, inner_cfg)
        slope = (g_up - g_down) / (2.0 * step)

        sup_move = abs(loss_supremum(fam, theta1) - loss_supremum(fam, theta2))
        theta_bound = c2 * (
            _sup_distance(fam, theta1, theta2, data, argmax1, argmax2, rng, points)
            + sup_move
        )
        nu_bound = 2.0 * lam_n * c2 * abs(nu1 - nu2)
        for i in range(points):
            row = {
                "lambda": lam,
                "nu": nu1,
                "g": g[i],
                "theta_gap": abs(g[i] - g_theta[i]),
                "nu_gap": abs(g[i] - g_nu[i]),
                "lambda_slope": slope[i],
            }
            ok = (
                -slack <= g[i] <= fam.beta * c2 + slack
                and row["theta_gap"] <= theta_bound + slack
                and row["nu_gap"] <= nu_bound + slack
                and abs(slope[i]) <= c1 + slack
            )
            report.record(row, ok)

    if not report.passed:
        _logger.warning(
            "g bounds violated on {} of {} tuples".format(
                len(report.failures), len(report.rows)
            )
        )
    else:
        _logger.info(
            "g bounds hold on {} tuples (C1={:.4e}, C2={:.4e})".format(
                len(report.rows), c1, c2
            )
        )
    return report
