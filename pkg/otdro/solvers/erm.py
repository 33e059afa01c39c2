import dataclasses
import logging
from enum import Enum
from math import ceil

import numpy as np

from ..exceptions import DroException
from .ctransform import Certificate
from .dual import DualProblem, solve_dual

_logger = logging.getLogger(__name__)

GRID_MAX_DIM = 4
FINITE_DIFFERENCE_STEP = 1e-4


class ErmSearch(Enum):
    Grid = "grid"
    RandomSearch = "random_search"
    SubgradientDescent = "subgradient_descent"


@dataclasses.dataclass(frozen=True)
class ErmResult:
    """
    theta_star minimizes the empirical dual value over the visited points.
    eps_opt is the improvement a local refinement around theta_star finds,
    so the certificate on the optimality gap is always a lower bound.
    """

    theta_star: np.ndarray
    value: float
    eps_opt: float
    evaluations: int
    dual_certificate: Certificate
    gap_certificate: Certificate = Certificate.LowerBound

    def to_dict(self):
        return {
            "theta_star": [float(t) for t in self.theta_star],
            "value": self.value,
            "eps_opt": self.eps_opt,
            "evaluations": self.evaluations,
            "dual_certificate": self.dual_certificate.value,
            "gap_certificate": self.gap_certificate.value,
        }


def project_unit_ball(theta):
    theta = np.asarray(theta, dtype=float)
    length = np.linalg.norm(theta, axis=-1, keepdims=True)
    return theta / np.maximum(length, 1.0)


def theta_grid(k, points_per_axis):
    """Points of the cubic grid on [-1, 1]^k lying in the unit ball"""
    if points_per_axis < 2:
        raise DroException(
            "A theta grid needs >= 2 points per axis",
            DroException.ExceptionType.Domain,
        )
    axis = np.linspace(-1.0, 1.0, points_per_axis)
    mesh = np.stack(np.meshgrid(*([axis] * k), indexing="ij"), axis=-1).reshape(-1, k)
    return mesh[np.linalg.norm(mesh, axis=1) <= 1.0 + 1e-12]


def points_per_axis(spacing):
    """Odd number of grid points giving at most `spacing` between neighbours"""
    return 2 * int(ceil(1.0 / spacing)) + 1


def _uniform_ball(rng, m, k, radius=1.0):
    direction = rng.standard_normal((m, k))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    return direction * radius * rng.uniform(0.0, 1.0, (m, 1)) ** (1.0 / k)


class _Evaluator:
    def __init__(self, prob, dual):
        self._prob = prob
        self._dual = dual
        self.evaluations = 0
        self.certificates = []

    def __call__(self, theta):
        solution = self._dual(self._prob.with_theta(project_unit_ball(theta)))
        self.evaluations += 1
        self.certificates.append(solution.certificate)
        return solution.value

    def best_of(self, thetas):
        values = np.array([self(t) for t in thetas])
        i = int(np.argmin(values))
        return thetas[i], float(values[i])


def _refine(evaluator, theta, radius, k):
    offsets = np.stack(
        np.meshgrid(*([np.array([-1.0, 0.0, 1.0])] * k), indexing="ij"), axis=-1
    ).reshape(-1, k)
    candidates = project_unit_ball(theta[None, :] + radius * offsets)
    return evaluator.best_of(candidates)[1]


def erm_minimize(prob: DualProblem, search=ErmSearch.Grid, budget=21, dual=solve_dual):
    """
    Minimizes the empirical dual value over theta in the unit ball.

    Parameters
    ----------
    prob : DualProblem
        Its theta is the starting point of SubgradientDescent only
    search : ErmSearch
    budget : int
        Grid points per axis, random draws or descent iterations
    dual : callable
        DualProblem -> DualSolution

    Returns
    -------
    ErmResult
    """
    k = prob.fam.param_dim
    evaluator = _Evaluator(prob, dual)

    if search is ErmSearch.Grid:
        if k > GRID_MAX_DIM:
            raise DroException(
                "Grid search is limited to k <= {}".format(GRID_MAX_DIM),
                DroException.ExceptionType.Domain,
            )
        theta, value = evaluator.best_of(theta_grid(k, budget))
        # half the spacing, the refine points are midpoints and not grid nodes
        radius = 1.0 / (budget - 1)
    elif search is ErmSearch.RandomSearch:
        rng = np.random.default_rng(prob.inner_cfg.seed)
        candidates = np.vstack([np.zeros((1, k)), _uniform_ball(rng, budget, k)])
        theta, value = evaluator.best_of(candidates)
        radius = budget ** (-1.0 / k)
    else:
        theta = np.asarray(prob.theta, dtype=float)
        current = theta
        value = evaluator(theta)
        size = 0.5
        for iteration in range(budget):
            grad = np.zeros(k)
            for j in range(k):
                e = np.zeros(k)
                e[j] = FINITE_DIFFERENCE_STEP
                grad[j] = (evaluator(current + e) - evaluator(current - e)) / (
                    2 * FINITE_DIFFERENCE_STEP
                )
            length = np.linalg.norm(grad)
            if length == 0:
                break
            size = 0.5 / np.sqrt(iteration + 1.0)
            current = project_unit_ball(current - size * grad / length)
            current_value = evaluator(current)
            if current_value < value:
                theta, value = current, current_value
        radius = size

    refined = _refine(evaluator, np.asarray(theta, dtype=float), radius, k)
    eps_opt = max(0.0, value - refined)
    certificate = Certificate.combine(*evaluator.certificates)
    _logger.debug(
        "ERM by {} : value {:.6f}, eps_opt {:.3e}, {} dual solves".format(
            search.name, value, eps_opt, evaluator.evaluations
        )
    )
    return ErmResult(
        project_unit_ball(theta), value, eps_opt, evaluator.evaluations, certificate
    )
