import dataclasses
import logging
import typing
from math import exp, log

import numpy as np

import otdro.default as default
from ..divergence import DivergenceFamily, FDivergenceSpec, select_nu_tilde
from ..exceptions import DroException
from ..objective import Dataset, ObjectiveFamily, check_theta, loss_supremum, loss_values
from ..transport import TransportCost
from ..utils import CheckReport, ExtendedReal, golden_section_minimize
from .ctransform import (
    Certificate,
    InnerSolverConfig,
    c_delta_transform_values,
    c_transform_values,
    full_attack_values,
)
from .cumulant import NuRule, lambda_f, log_mean_exp, sample_range_domain

_logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class DualProblem:
    fam: ObjectiveFamily
    theta: np.ndarray
    cost: TransportCost
    radius: float
    sample: Dataset
    divergence: typing.Optional[FDivergenceSpec] = None
    inner_cfg: InnerSolverConfig = InnerSolverConfig()
    outer_tol: float = default.OUTER_TOLERANCE
    nu_rule: NuRule = NuRule.SampleRange

    def __post_init__(self):
        if not self.radius > 0:
            raise DroException(
                "radius must be > 0, got {}".format(self.radius),
                DroException.ExceptionType.Domain,
            )
        object.__setattr__(self, "theta", check_theta(self.fam, self.theta))

    def with_theta(self, theta):
        return dataclasses.replace(self, theta=theta)

    def with_radius(self, radius):
        return dataclasses.replace(self, radius=radius)

    def with_sample(self, sample):
        return dataclasses.replace(self, sample=sample)


@dataclasses.dataclass(frozen=True)
class DualSolution:
    value: float
    lambda_opt: float
    nu_opt: typing.Optional[float] = None
    rho_opt: typing.Optional[float] = None
    evaluations: int = 0
    certificate: Certificate = Certificate.Exact
    boundary: bool = False
    converged: bool = True

    def to_dict(self):
        return {
            "value": self.value,
            "lambda_opt": self.lambda_opt,
            "nu_opt": self.nu_opt,
            "rho_opt": self.rho_opt,
            "evaluations": self.evaluations,
            "certificate": self.certificate.value,
            "boundary": self.boundary,
            "converged": self.converged,
        }


class _LambdaObjective:
    """
    Memoised lam -> (value, nu, certificate) so that the bracketing and
    golden phases share evaluations.
    """

    def __init__(self, evaluate):
        self._evaluate = evaluate
        self._cache = {}

    def __call__(self, log_lam):
        lam = exp(log_lam)
        if lam not in self._cache:
            self._cache[lam] = self._evaluate(lam)
        return self._cache[lam][0]

    def details(self, lam):
        if lam not in self._cache:
            self._cache[lam] = self._evaluate(lam)
        return self._cache[lam]

    @property
    def evaluations(self):
        return len(self._cache)

    @property
    def certificates(self):
        return [entry[2] for entry in self._cache.values()]


def _search_lambda(objective: _LambdaObjective, limit_value, outer_tol):
    """
    Golden section on log lam over [1e-3, 1e3], the bracket grown by 4 while
    the objective still decreases at its ends. When the lower end reaches the
    floor the lam -> 0+ limit value is compared with the interior optimum.
    """
    step = log(default.LAMBDA_BRACKET_GROWTH)
    lo, hi = log(default.LAMBDA_BRACKET_LO), log(default.LAMBDA_BRACKET_HI)
    floor, ceiling = log(default.LAMBDA_FLOOR), log(default.LAMBDA_CEILING)

    while objective(hi) < objective(hi - step):
        if hi >= ceiling:
            raise DroException(
                "Dual objective still decreasing at lambda={:.3e}".format(exp(hi)),
                DroException.ExceptionType.Bracketing,
                {"lambda": exp(hi), "value": float(objective(hi))},
            )
        hi += step

    while lo > floor and objective(lo) <= objective(lo + step):
        lo = max(lo - step, floor)
    at_floor = lo <= floor

    result = golden_section_minimize(objective, lo, hi, outer_tol)
    if not result.converged:
        raise DroException(
            "Outer lambda search did not converge",
            DroException.ExceptionType.Convergence,
            {"bracket": (exp(lo), exp(hi)), "evaluations": objective.evaluations},
        )
    lam = exp(result.argmin)
    value, nu, _ = objective.details(lam)

    if at_floor and limit_value is not None and ExtendedReal.of(limit_value) <= value:
        _logger.info(
            "Dual infimum approached as lambda -> 0+, reporting the limit {}".format(
                limit_value
            )
        )
        return 0.0, ExtendedReal.of(limit_value), None, True
    return lam, value, nu, False


def _solution(objective, lam, value, nu, boundary, extra_certificates=()):
    certificate = Certificate.combine(*objective.certificates, *extra_certificates)
    if certificate is Certificate.LowerBound:
        _logger.warning("Dual value is a lower bound: inner maxima are not certified")
    if not value.is_finite:
        raise DroException(
            "Dual value is infinite", DroException.ExceptionType.Convergence
        )
    nu_opt = None if nu is None else float(nu)
    rho_opt = None if nu is None else lam * float(nu)
    return DualSolution(
        float(value),
        lam,
        nu_opt,
        rho_opt,
        objective.evaluations,
        certificate,
        boundary,
    )


def ot_dro_dual(prob: DualProblem):
    """inf over lam > 0 of lam r + E_{P_n} L^c_lam"""
    if prob.divergence is not None:
        raise DroException(
            "ot_dro_dual takes no divergence", DroException.ExceptionType.Domain
        )
    if prob.cost.is_hard:
        batch = c_delta_transform_values(
            prob.fam, prob.theta, prob.cost.delta, prob.cost.norm, prob.sample,
            prob.inner_cfg,
        )
        _logger.debug("Hard ball cost, dual attained as lambda -> 0+")
        return DualSolution(
            float(np.mean(batch.values)), 0.0, None, None, 1, batch.certificate, True
        )

    def evaluate(lam):
        batch = c_transform_values(
            prob.fam, prob.theta, prob.cost, lam, prob.sample, prob.inner_cfg
        )
        return ExtendedReal.of(lam * prob.radius + np.mean(batch.values)), None, (
            batch.certificate
        )

    objective = _LambdaObjective(evaluate)
    attack = full_attack_values(
        prob.fam, prob.theta, prob.cost, prob.sample, prob.inner_cfg
    )
    lam, value, nu, boundary = _search_lambda(
        objective, float(np.mean(attack.values)), prob.outer_tol
    )
    return _solution(objective, lam, value, nu, boundary, (attack.certificate,))


def _shifted_setup(prob):
    if prob.cost.is_hard:
        raise DroException(
            "The shifted nu domain requires a real-valued penalty",
            DroException.ExceptionType.Configuration,
        )
    spec = prob.divergence
    # every class meets the tail condition, a single class included
    p0 = min(prob.sample.min_class_prob, 0.5)
    nu_tilde = select_nu_tilde(spec, p0, prob.cost.M)
    return loss_supremum(prob.fam, prob.theta), (nu_tilde, -spec.s0)


def otreg_fdiv_dual(prob: DualProblem):
    """
    inf over lam > 0 of lam r + lam Lambda_f[L^c_lam / lam], the nu of the
    cumulant functional standing for rho / lam.
    """
    spec = prob.divergence
    if spec is None:
        raise DroException(
            "otreg_fdiv_dual requires a divergence", DroException.ExceptionType.Domain
        )

    if prob.nu_rule is NuRule.Shifted:
        supremum, shifted_domain = _shifted_setup(prob)

    def evaluate(lam):
        batch = c_transform_values(
            prob.fam, prob.theta, prob.cost, lam, prob.sample, prob.inner_cfg
        )
        if prob.nu_rule is NuRule.Shifted:
            phi = (batch.values - supremum) / lam
            inner, nu = lambda_f(phi, spec, shifted_domain)
            value = inner.scale(lam) + (lam * prob.radius + supremum)
            nu = nu + supremum / lam
        else:
            phi = batch.values / lam
            inner, nu = lambda_f(phi, spec, sample_range_domain(spec, phi))
            value = inner.scale(lam) + lam * prob.radius
        return value, nu, batch.certificate

    objective = _LambdaObjective(evaluate)
    attack = full_attack_values(
        prob.fam, prob.theta, prob.cost, prob.sample, prob.inner_cfg
    )
    lam, value, nu, boundary = _search_lambda(
        objective, float(np.max(attack.values)), prob.outer_tol
    )
    return _solution(objective, lam, value, nu, boundary, (attack.certificate,))


def kl_dro_dual(prob: DualProblem):
    """inf over lam > 0 of lam r + lam log E_{P_n} exp(L^c_lam / lam)"""
    spec = prob.divergence
    if spec is None or spec.family is not DivergenceFamily.KL:
        raise DroException(
            "kl_dro_dual requires the KL divergence", DroException.ExceptionType.Domain
        )

    def evaluate(lam):
        batch = c_transform_values(
            prob.fam, prob.theta, prob.cost, lam, prob.sample, prob.inner_cfg
        )
        value = lam * prob.radius + lam * log_mean_exp(batch.values / lam)
        return ExtendedReal.of(value), None, batch.certificate

    objective = _LambdaObjective(evaluate)
    attack = full_attack_values(
        prob.fam, prob.theta, prob.cost, prob.sample, prob.inner_cfg
    )
    lam, value, nu, boundary = _search_lambda(
        objective, float(np.max(attack.values)), prob.outer_tol
    )
    solution = _solution(objective, lam, value, nu, boundary, (attack.certificate,))
    if lam > 0:
        # optimal nu of the cumulant functional in closed form
        batch = c_transform_values(
            prob.fam, prob.theta, prob.cost, lam, prob.sample, prob.inner_cfg
        )
        nu = log_mean_exp(batch.values / lam) - 1.0
        solution = dataclasses.replace(solution, nu_opt=nu, rho_opt=lam * nu)
    return solution


def solve_dual(prob: DualProblem):
    if prob.divergence is None:
        return ot_dro_dual(prob)
    if prob.divergence.family is DivergenceFamily.KL and prob.nu_rule is NuRule.SampleRange:
        return kl_dro_dual(prob)
    return otreg_fdiv_dual(prob)


def empirical_risk(prob: DualProblem):
    return float(
        np.mean(loss_values(prob.fam, prob.theta, prob.sample.x, prob.sample.y))
    )


def lambda_limit_check(prob: DualProblem, lambda_grid):
    """
    Compares |lam Lambda_f[L^c_lam / lam] - E L^{c_delta}| with
    lam psi*(L_X / lam) + beta ((f*)'(beta / lam + s0) - (f*)'(s0)).
    """
    spec = prob.divergence
    if spec is None:
        raise DroException(
            "lambda_limit_check requires a divergence",
            DroException.ExceptionType.Domain,
        )
    fam, cost = prob.fam, prob.cost
    hard = c_delta_transform_values(
        fam, prob.theta, cost.delta, cost.norm, prob.sample, prob.inner_cfg
    )
    expected = float(np.mean(hard.values))
    report = CheckReport("lambda_limit_check")
    for lam in np.asarray(lambda_grid, dtype=float):
        batch = c_transform_values(
            fam, prob.theta, cost, lam, prob.sample, prob.inner_cfg
        )
        phi = batch.values / lam
        inner, _ = lambda_f(phi, spec, sample_range_domain(spec, phi))
        actual = abs(float(inner) * lam - expected)
        bound = float(cost.slack(lam, fam.lipschitz_x)) + fam.beta * (
            float(spec.conjugate_derivative(fam.beta / lam + spec.s0))
            - float(spec.conjugate_derivative(spec.s0))
        )
        report.record(
            {"lambda": float(lam), "actual": actual, "bound": bound},
            actual <= bound + 1e-8,
        )
    return report
