import dataclasses
import logging
import typing
from enum import Enum

import numpy as np
from scipy.optimize import minimize
from scipy.special import softmax

import otdro.default as default
from ..divergence import DivergenceFamily, FDivergenceSpec, f_divergence_finite
from ..exceptions import DroException
from ..objective import loss_values
from ..solvers import Certificate, DualProblem, DualSolution
from ..solvers.ctransform import c_transform_values, full_attack_values
from ..utils import CheckReport
from .simplex import LinearProgram, LpStatus, solve_lp

_logger = logging.getLogger(__name__)

BALL_RTOL = 1e-12
BALL_ATOL = 1e-15
BOUNDARY_LAMBDAS = (1e-6, 1e-4, 1e-2)


class PrimalMethod(Enum):
    SLSQP = "slsqp"
    ProjectedSubgradient = "projected_subgradient"


@dataclasses.dataclass(frozen=True)
class PrimalSolverConfig:
    method: PrimalMethod = PrimalMethod.ProjectedSubgradient
    max_iterations: int = default.PRIMAL_MAX_ITERATIONS
    tolerance: float = default.PRIMAL_TOLERANCE
    step_size: float = default.PRIMAL_STEP_SIZE

    def __post_init__(self):
        if self.max_iterations < 1:
            raise DroException(
                "max_iterations must be >= 1", DroException.ExceptionType.Configuration
            )
        if not self.tolerance > 0 or not self.step_size > 0:
            raise DroException(
                "tolerance and step_size must be > 0",
                DroException.ExceptionType.Configuration,
            )


@dataclasses.dataclass(frozen=True)
class FiniteInstance:
    """
    Discretized primal. Source i carries mass 1/n and may move to any of its
    candidates; losses[i][j] and costs[i][j] refer to candidates[i][j].
    """

    sources: np.ndarray
    labels: np.ndarray
    candidates: typing.List[np.ndarray]
    losses: typing.List[np.ndarray]
    costs: typing.List[np.ndarray]

    def __post_init__(self):
        n = len(self.sources)
        if not n == len(self.labels) == len(self.candidates) == len(self.losses) == len(
            self.costs
        ):
            raise DroException(
                "Instance blocks disagree on the number of sources",
                DroException.ExceptionType.Domain,
            )
        for i in range(n):
            costs = np.asarray(self.costs[i], dtype=float)
            if costs.shape != np.shape(self.losses[i]) or np.any(costs < 0):
                raise DroException(
                    "Source {} has malformed or negative costs".format(i),
                    DroException.ExceptionType.Domain,
                )
            at_source = np.all(
                np.isclose(np.atleast_2d(self.candidates[i]), self.sources[i]), axis=1
            )
            if not np.any(at_source & (costs == 0.0)):
                raise DroException(
                    "Source {} is missing from its own candidates".format(i),
                    DroException.ExceptionType.Domain,
                )

    @property
    def n(self):
        return len(self.sources)

    @property
    def n_candidates(self):
        return sum(len(c) for c in self.losses)

    @property
    def mean_loss(self):
        """Mean loss at the sources"""
        values = []
        for i in range(self.n):
            at_source = np.all(
                np.isclose(np.atleast_2d(self.candidates[i]), self.sources[i]), axis=1
            )
            values.append(float(np.max(np.asarray(self.losses[i])[at_source])))
        return float(np.mean(values))

    def pruned(self):
        """Drops infinite-cost candidates"""
        keep = [np.isfinite(np.asarray(c, dtype=float)) for c in self.costs]
        return FiniteInstance(
            self.sources,
            self.labels,
            [np.atleast_2d(c)[k] for c, k in zip(self.candidates, keep)],
            [np.asarray(v, dtype=float)[k] for v, k in zip(self.losses, keep)],
            [np.asarray(c, dtype=float)[k] for c, k in zip(self.costs, keep)],
        )

    def flat(self):
        """(losses, costs, source index) over all (source, candidate) pairs"""
        owner = np.concatenate(
            [np.full(len(v), i) for i, v in enumerate(self.losses)]
        )
        return (
            np.concatenate([np.asarray(v, dtype=float) for v in self.losses]),
            np.concatenate([np.asarray(c, dtype=float) for c in self.costs]),
            owner,
        )


@dataclasses.dataclass(frozen=True)
class PrimalResult:
    value: float
    converged: bool
    method: PrimalMethod
    iterations: int
    budget_used: float

    def to_dict(self):
        return {
            "value": self.value,
            "converged": self.converged,
            "method": self.method.value,
            "iterations": self.iterations,
            "budget_used": self.budget_used,
        }


def _check_radius(r):
    if r < 0:
        raise DroException(
            "r must be >= 0, got {}".format(r), DroException.ExceptionType.Domain
        )


def ot_primal_lp(inst: FiniteInstance, r):
    """
    max sum pi_ij L_ij over couplings with marginal 1/n on the sources and
    transport cost at most r.
    """
    _check_radius(r)
    inst = inst.pruned()
    losses, costs, owner = inst.flat()
    marginals = (owner[None, :] == np.arange(inst.n)[:, None]).astype(float)
    lp = LinearProgram(
        losses,
        A_ub=costs[None, :],
        b_ub=[r],
        A_eq=marginals,
        b_eq=np.full(inst.n, 1.0 / inst.n),
    )
    result = solve_lp(lp)
    if result.status is not LpStatus.Optimal:
        # the identity coupling is always feasible and losses are bounded
        raise DroException(
            "OT primal LP ended {}".format(result.status.value),
            DroException.ExceptionType.Convergence,
        )
    _logger.debug(
        "OT primal LP over {} pairs: {:.9f} in {} pivots".format(
            len(losses), result.value, result.iterations
        )
    )
    return result.value


def _identity_coupling(inst):
    _, costs, owner = inst.flat()
    pi = np.zeros(costs.shape[0])
    for i in range(inst.n):
        pairs = np.flatnonzero((owner == i) & (costs == 0.0))
        pi[pairs[0]] = 1.0 / inst.n
    return pi


def _source_mass(pi, owner, n):
    return np.bincount(owner, weights=pi, minlength=n)


def _divergence_term(spec, eta, n):
    """sum_i (1/n) f(n eta_i) through the f-divergence of eta against P_n"""
    return f_divergence_finite(spec, eta, np.full(n, 1.0 / n))


def _generator_derivative(spec, t):
    t = np.maximum(t, default.PRIMAL_MASS_FLOOR)
    if spec.family is DivergenceFamily.KL:
        return np.log(t) + 1.0
    a = spec.alpha
    return np.power(t, a - 1.0) / (a - 1.0)


def _budget(spec, pi, costs, owner, n):
    eta = _source_mass(pi, owner, n)
    return float(_divergence_term(spec, eta, n)) + float(costs @ pi)


def _budget_gradient(spec, pi, costs, owner, n):
    eta = _source_mass(pi, owner, n)
    return _generator_derivative(spec, n * eta)[owner] + costs


def _pull_into_budget(spec, pi, identity, costs, owner, n, r):
    """
    Moves pi towards the identity coupling, whose budget is 0, until the
    budget constraint holds. The budget is convex along that segment.
    """
    pi = np.maximum(pi, 0.0)
    pi /= np.sum(pi)
    used = _budget(spec, pi, costs, owner, n)
    if used <= r:
        return pi, used
    t = 1.0 - r / used
    for _ in range(60):
        mixed = (1.0 - t) * pi + t * identity
        used = _budget(spec, mixed, costs, owner, n)
        if used <= r:
            return mixed, used
        t = 1.0 - (1.0 - t) / 2.0
    return identity, 0.0


def _slsqp(spec, losses, costs, owner, n, r, identity, cfg):
    result = minimize(
        lambda pi: -float(losses @ pi),
        identity,
        jac=lambda pi: -losses,
        method="SLSQP",
        bounds=[(0.0, 1.0)] * losses.shape[0],
        constraints=[
            {"type": "eq", "fun": lambda pi: np.sum(pi) - 1.0,
             "jac": lambda pi: np.ones_like(pi)},
            {"type": "ineq",
             "fun": lambda pi: r - _budget(spec, pi, costs, owner, n),
             "jac": lambda pi: -_budget_gradient(spec, pi, costs, owner, n)},
        ],
        options={"maxiter": cfg.max_iterations, "ftol": cfg.tolerance},
    )
    return result.x, bool(result.success), int(result.nit)


def _source_weights(spec, scores, mu):
    """
    eta maximizing sum eta_i s_i - mu sum f(n eta_i) / n over the simplex:
    n eta_i = f*'((s_i - nu) / mu) with nu normalizing the masses.
    """
    if mu == 0.0:
        top = (scores >= np.max(scores)).astype(float)
        return top / np.sum(top)
    if spec.family is DivergenceFamily.KL:
        return softmax(scores / mu)

    def masses(nu):
        return spec.conjugate_derivative((scores - nu) / mu)

    # every mass >= 1 at lo, every mass 0 at hi
    lo = float(np.min(scores)) - mu / (spec.alpha - 1.0)
    hi = float(np.max(scores))
    for _ in range(default.PRIMAL_BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if np.mean(masses(mid)) >= 1.0:
            lo = mid
        else:
            hi = mid
    t = masses(lo)
    return t / np.sum(t)


def _lagrangian_maximizer(spec, losses, costs, owner, n, mu):
    """
    Coupling maximizing sum pi L - mu budget(pi): each source moves to its
    best candidate under L - mu c, the cheapest one on ties.
    """
    choice = np.empty(n, dtype=int)
    scores = np.empty(n)
    for i in range(n):
        pairs = np.flatnonzero(owner == i)
        score = losses[pairs] - mu * costs[pairs]
        tied = np.flatnonzero(score >= np.max(score))
        j = tied[np.argmin(costs[pairs][tied])]
        choice[i], scores[i] = pairs[j], score[j]
    pi = np.zeros(losses.shape[0])
    pi[choice] = _source_weights(spec, scores, mu)
    return pi


def _mix_into_budget(spec, pi_out, pi_in, losses, costs, owner, n, r):
    """Largest step from the feasible pi_in towards pi_out keeping the budget"""
    lo, hi = 0.0, 1.0
    for _ in range(default.PRIMAL_BISECTION_STEPS):
        t = 0.5 * (lo + hi)
        if t in (lo, hi):
            break
        if _budget(spec, (1.0 - t) * pi_in + t * pi_out, costs, owner, n) <= r:
            lo = t
        else:
            hi = t
    mixed = (1.0 - lo) * pi_in + lo * pi_out
    return mixed if losses @ mixed >= losses @ pi_in else pi_in


def _projected_subgradient(spec, losses, costs, owner, n, r, identity, cfg):
    """
    Projected subgradient steps on the multiplier mu >= 0 of the Lagrangian
    sum pi L - mu (budget(pi) - r), whose maximizer over couplings is
    computed exactly for each mu. The subgradient r - budget sets the step
    direction; steps grow from step_size times the loss range until the
    direction flips, then halve. The maximizers on both sides of the last
    flip are mixed into a budget-feasible coupling.
    """

    def point(mu):
        pi = _lagrangian_maximizer(spec, losses, costs, owner, n, mu)
        return pi, _budget(spec, pi, costs, owner, n)

    mu_out, (pi_out, used) = 0.0, point(0.0)
    if used <= r:
        return pi_out, True, 0

    mu_in = cfg.step_size * max(float(np.ptp(losses)), 1.0)
    pi_in, used = point(mu_in)
    iterations = 1
    while used > r:
        if iterations >= cfg.max_iterations:
            return pi_in, False, iterations
        mu_out, pi_out = mu_in, pi_in
        mu_in *= 4.0
        pi_in, used = point(mu_in)
        iterations += 1

    converged = False
    while iterations < cfg.max_iterations:
        if mu_in - mu_out <= cfg.tolerance * (1.0 + mu_in):
            converged = True
            break
        mu = 0.5 * (mu_out + mu_in)
        pi, used = point(mu)
        if used > r:
            mu_out, pi_out = mu, pi
        else:
            mu_in, pi_in = mu, pi
        iterations += 1
    _logger.debug(
        "Budget multiplier in [{:.6e}, {:.6e}] after {} steps".format(
            mu_out, mu_in, iterations
        )
    )
    return (
        _mix_into_budget(spec, pi_out, pi_in, losses, costs, owner, n, r),
        converged,
        iterations,
    )


def otreg_primal_convex(
    inst: FiniteInstance, spec: FDivergenceSpec, r, solver_cfg=PrimalSolverConfig()
):
    """
    max sum_j Q_j L_j over reweightings eta of the sources and couplings pi
    from eta to the candidates with
    sum_i f(n eta_i) / n + sum_ij c_ij pi_ij <= r.

    eta_i is the row mass of pi, so pi ranges over the probability simplex.
    The returned value is always attained by a budget-feasible coupling;
    `converged` is False when the solver stopped on its budget.
    """
    _check_radius(r)
    inst = inst.pruned()
    losses, costs, owner = inst.flat()
    identity = _identity_coupling(inst)
    if r == 0:
        return PrimalResult(float(losses @ identity), True, solver_cfg.method, 0, 0.0)

    if solver_cfg.method is PrimalMethod.SLSQP:
        pi, converged, iterations = _slsqp(
            spec, losses, costs, owner, inst.n, r, identity, solver_cfg
        )
    else:
        pi, converged, iterations = _projected_subgradient(
            spec, losses, costs, owner, inst.n, r, identity, solver_cfg
        )
    pi, used = _pull_into_budget(spec, pi, identity, costs, owner, inst.n, r)
    value = float(losses @ pi)
    if not converged:
        _logger.warning(
            "OT-regularized primal did not converge after {} iterations, "
            "reporting the best feasible value {:.6f}".format(iterations, value)
        )
    return PrimalResult(value, converged, solver_cfg.method, iterations, used)


def weak_duality_check(
    inst: FiniteInstance,
    dual_value,
    primal_value,
    certificate=Certificate.Exact,
    tolerance=1e-6,
    name="weak_duality_check",
):
    """
    primal <= dual + tolerance always; dual <= primal + tolerance as well
    when the dual value is certified exact.
    """
    report = CheckReport(name)
    row = {
        "sources": inst.n,
        "pairs": inst.n_candidates,
        "primal": float(primal_value),
        "dual": float(dual_value),
        "gap": float(dual_value) - float(primal_value),
        "certificate": certificate.value,
    }
    ok = primal_value <= dual_value + tolerance
    if certificate is Certificate.Exact:
        ok = ok and dual_value <= primal_value + tolerance
    report.record(row, ok)
    return report


def _box_grid(box, dim, points_per_axis):
    axis = np.linspace(-box, box, points_per_axis)
    return np.stack(np.meshgrid(*([axis] * dim), indexing="ij"), axis=-1).reshape(-1, dim)


def build_finite_instance(
    prob: DualProblem, points_per_axis=5, solution: typing.Optional[DualSolution] = None
):
    """
    Candidates of each source: the source itself, a uniform grid of the box,
    the attack-saturated point and the c-transform maximizers at lambda*
    and lambda* (1 +- 1e-6). When lambda* = 0 the maximizers are taken at
    small lambdas instead, which reach the saturated loss at the least cost.
    """
    fam, cost, data = prob.fam, prob.cost, prob.sample
    lambdas = []
    if solution is not None and solution.lambda_opt > 0:
        lambdas = [solution.lambda_opt * f for f in (1.0 - 1e-6, 1.0, 1.0 + 1e-6)]
    elif solution is not None and not cost.is_hard:
        lambdas = list(BOUNDARY_LAMBDAS)
    extra = [
        c_transform_values(fam, prob.theta, cost, lam, data, prob.inner_cfg).argmax_x
        for lam in lambdas
    ]
    extra.append(
        full_attack_values(fam, prob.theta, cost, data, prob.inner_cfg).argmax_x
    )
    grid = _box_grid(fam.box, data.dim, points_per_axis)

    candidates, losses, costs = [], [], []
    for i in range(data.n):
        x, y = data.point(i)
        points = np.vstack([x[None, :], grid] + [e[i][None, :] for e in extra])
        distances = cost.norm.of(points - x[None, :])
        if cost.is_hard:
            # maximizers on the sphere land a rounding error outside the ball
            inside = distances <= cost.delta * (1.0 + BALL_RTOL) + BALL_ATOL
            c = np.where(inside, 0.0, np.inf)
        else:
            c = cost.profile(distances)
        c[0] = 0.0
        candidates.append(points)
        losses.append(loss_values(fam, prob.theta, points, np.full(len(points), y)))
        costs.append(c)
    return FiniteInstance(data.x, data.y, candidates, losses, costs).pruned()
