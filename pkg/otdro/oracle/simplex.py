import dataclasses
import logging
import typing
from enum import Enum

import numpy as np

import otdro.default as default
from ..exceptions import DroException

_logger = logging.getLogger(__name__)


class LpStatus(Enum):
    Optimal = "optimal"
    Infeasible = "infeasible"
    Unbounded = "unbounded"


@dataclasses.dataclass(frozen=True)
class LinearProgram:
    """
    maximize c.x subject to A_ub x <= b_ub, A_eq x = b_eq and x >= 0.
    Either constraint block may be omitted.
    """

    c: np.ndarray
    A_ub: typing.Optional[np.ndarray] = None
    b_ub: typing.Optional[np.ndarray] = None
    A_eq: typing.Optional[np.ndarray] = None
    b_eq: typing.Optional[np.ndarray] = None

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float).reshape(-1)
        object.__setattr__(self, "c", c)
        for a_name, b_name in [("A_ub", "b_ub"), ("A_eq", "b_eq")]:
            a, b = getattr(self, a_name), getattr(self, b_name)
            if (a is None) != (b is None):
                raise DroException(
                    "{} and {} go together".format(a_name, b_name),
                    DroException.ExceptionType.Domain,
                )
            if a is None:
                a, b = np.zeros((0, c.shape[0])), np.zeros(0)
            a = np.atleast_2d(np.asarray(a, dtype=float))
            b = np.asarray(b, dtype=float).reshape(-1)
            if a.shape != (b.shape[0], c.shape[0]):
                raise DroException(
                    "{} has shape {}, expected ({}, {})".format(
                        a_name, a.shape, b.shape[0], c.shape[0]
                    ),
                    DroException.ExceptionType.Domain,
                )
            object.__setattr__(self, a_name, a)
            object.__setattr__(self, b_name, b)

    @property
    def n_variables(self):
        return self.c.shape[0]


@dataclasses.dataclass(frozen=True)
class LpResult:
    status: LpStatus
    x: typing.Optional[np.ndarray]
    value: typing.Optional[float]
    iterations: int


def _pivot(tableau, basis, row, col):
    tableau[row] /= tableau[row, col]
    for i in range(tableau.shape[0]):
        if i != row and tableau[i, col] != 0.0:
            tableau[i] -= tableau[i, col] * tableau[row]
    basis[row] = col


def _run_simplex(tableau, basis, n_columns, tolerance, max_iterations):
    """
    Minimizes over the columns [0, n_columns) of a canonical tableau whose
    last row holds the reduced costs. Bland's rule on both the entering and
    the leaving variable.
    """
    iterations = 0
    while True:
        reduced = tableau[-1, :n_columns]
        entering = np.flatnonzero(reduced < -tolerance)
        if entering.size == 0:
            return LpStatus.Optimal, iterations
        if iterations >= max_iterations:
            raise DroException(
                "Simplex exceeded {} pivots".format(max_iterations),
                DroException.ExceptionType.Convergence,
            )
        col = int(entering[0])
        column = tableau[:-1, col]
        rows = np.flatnonzero(column > tolerance)
        if rows.size == 0:
            return LpStatus.Unbounded, iterations
        ratios = tableau[rows, -1] / column[rows]
        best = np.min(ratios)
        ties = rows[ratios <= best + tolerance * max(1.0, abs(best))]
        row = int(min(ties, key=lambda i: basis[i]))
        _pivot(tableau, basis, row, col)
        iterations += 1


def solve_lp(lp: LinearProgram, tolerance=default.LP_TOLERANCE, max_iterations=10000):
    """
    Dense two-phase tableau simplex.

    Parameters
    ----------
    lp : LinearProgram
    tolerance : float
        Pivot and feasibility tolerance
    max_iterations : int
        Pivot budget over both phases

    Returns
    -------
    LpResult
    """
    n = lp.n_variables
    m_ub, m_eq = lp.b_ub.shape[0], lp.b_eq.shape[0]
    m = m_ub + m_eq

    # standard form: slacks for the inequality rows, non-negative right side
    a = np.zeros((m, n + m_ub))
    a[:m_ub, :n] = lp.A_ub
    a[:m_ub, n:] = np.eye(m_ub)
    a[m_ub:, :n] = lp.A_eq
    b = np.concatenate([lp.b_ub, lp.b_eq])
    negative = b < 0
    a[negative] *= -1.0
    b[negative] *= -1.0
    n_real = n + m_ub

    # phase 1 with one artificial per row
    tableau = np.zeros((m + 1, n_real + m + 1))
    tableau[:m, :n_real] = a
    tableau[:m, n_real:n_real + m] = np.eye(m)
    tableau[:m, -1] = b
    tableau[-1, :n_real] = -np.sum(a, axis=0)
    tableau[-1, -1] = -np.sum(b)
    basis = list(range(n_real, n_real + m))

    _, phase1 = _run_simplex(tableau, basis, n_real + m, tolerance, max_iterations)
    infeasibility = -tableau[-1, -1]
    if infeasibility > tolerance * max(1.0, float(np.max(np.abs(b), initial=0.0))):
        _logger.debug("LP infeasible, phase 1 residual {:.3e}".format(infeasibility))
        return LpResult(LpStatus.Infeasible, None, None, phase1)

    # drive artificials out of the basis, dropping redundant rows
    keep = []
    for row in range(m):
        if basis[row] >= n_real:
            candidates = np.flatnonzero(np.abs(tableau[row, :n_real]) > tolerance)
            if candidates.size == 0:
                continue
            _pivot(tableau, basis, row, int(candidates[0]))
        keep.append(row)
    rows = tableau[keep]
    basis = [basis[i] for i in keep]

    # phase 2 on the original objective, minimizing -c
    cost = np.zeros(n_real)
    cost[:n] = -lp.c
    tableau = np.zeros((len(keep) + 1, n_real + 1))
    tableau[:-1, :n_real] = rows[:, :n_real]
    tableau[:-1, -1] = rows[:, -1]
    basic_cost = cost[basis]
    tableau[-1, :n_real] = cost - basic_cost @ tableau[:-1, :n_real]
    tableau[-1, -1] = -basic_cost @ tableau[:-1, -1]

    status, phase2 = _run_simplex(
        tableau, basis, n_real, tolerance, max_iterations - phase1
    )
    iterations = phase1 + phase2
    if status is LpStatus.Unbounded:
        return LpResult(status, None, None, iterations)

    solution = np.zeros(n_real)
    solution[basis] = tableau[:-1, -1]
    x = np.maximum(solution[:n], 0.0)
    _logger.debug("LP solved in {} pivots".format(iterations))
    return LpResult(LpStatus.Optimal, x, float(lp.c @ x), iterations)
