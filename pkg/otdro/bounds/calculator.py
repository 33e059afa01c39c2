import dataclasses
import logging
import typing
from math import ceil, sqrt

import numpy as np

import otdro.default as default
from ..divergence import DivergenceConstants, FDivergenceSpec
from ..exceptions import DroException
from ..objective import ObjectiveFamily, covering_number_bound
from ..transport import PenaltyFamily, TransportCost, lambda_star_values
from ..utils import gauss_legendre_integral

_logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class BoundConfig:
    """
    split_gamma : h1 = gamma * eps and h2 = (1 - gamma) * eps in D_n. None
        selects the optimum of the closed-form derivation.
    split_three : (g1, g2, g3) proportional split of eps in R~_n
    lambda_n_scale, lambda_n_exponent : lambda_n = C n^r. A None exponent
        selects r = max((q - 1) / 2, 1 / 2) for PowerLaw and 1 / 2 otherwise.
    p0 : class-probability floor used to pick nu~
    """

    split_gamma: typing.Optional[float] = None
    split_three: typing.Tuple[float, float, float] = (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)
    lambda_n_scale: float = 1.0
    lambda_n_exponent: typing.Optional[float] = None
    p0: float = 0.25
    quadrature_points: int = default.QUADRATURE_POINTS
    quadrature_order: int = default.QUADRATURE_PANEL_ORDER

    def __post_init__(self):
        if self.split_gamma is not None and not 0.0 < self.split_gamma < 1.0:
            raise DroException(
                "split_gamma must lie in (0, 1), got {}".format(self.split_gamma),
                DroException.ExceptionType.Configuration,
            )
        splits = tuple(float(s) for s in self.split_three)
        if len(splits) != 3 or min(splits) <= 0 or abs(sum(splits) - 1.0) > 1e-12:
            raise DroException(
                "split_three must be 3 positive reals summing to 1, got {}".format(
                    self.split_three
                ),
                DroException.ExceptionType.Configuration,
            )
        object.__setattr__(self, "split_three", splits)
        if self.lambda_n_scale <= 0:
            raise DroException(
                "lambda_n_scale must be > 0", DroException.ExceptionType.Configuration
            )
        if not 0.0 < self.p0 < 1.0:
            raise DroException(
                "p0 must lie in (0, 1), got {}".format(self.p0),
                DroException.ExceptionType.Configuration,
            )
        if self.quadrature_order < 1 or self.quadrature_points < self.quadrature_order:
            raise DroException(
                "quadrature needs points >= order >= 1",
                DroException.ExceptionType.Configuration,
            )

    def to_dict(self):
        return dataclasses.asdict(self)


@dataclasses.dataclass(frozen=True)
class ClassConstants:
    """Constants of the loss class and the cost entering every bound"""

    beta: float
    lipschitz_x: float
    lipschitz_theta: float
    k: int
    M: float

    @staticmethod
    def of(fam: ObjectiveFamily, cost: TransportCost):
        return ClassConstants(
            fam.beta, fam.lipschitz_x, fam.lipschitz_theta, fam.param_dim, cost.M
        )


def _check_n(n):
    if n < 1:
        raise DroException(
            "n must be >= 1, got {}".format(n), DroException.ExceptionType.Domain
        )


def _integrate(integrand, upper, cfg):
    value = gauss_legendre_integral(
        integrand, upper, cfg.quadrature_points, cfg.quadrature_order
    )
    if not np.isfinite(value):
        raise DroException(
            "Entropy integral diverges on (0, {}]".format(upper),
            DroException.ExceptionType.Convergence,
        )
    return value


def lambda_n(cost: TransportCost, n, cfg=BoundConfig()):
    exponent = cfg.lambda_n_exponent
    if exponent is None:
        penalty = cost.penalty
        if penalty.family is PenaltyFamily.PowerLaw:
            exponent = max(0.5 * (penalty.q - 1.0), 0.5)
        else:
            exponent = 0.5
    return cfg.lambda_n_scale * float(n) ** exponent


def _has_lambda_factor(cost):
    return not cost.is_hard and cost.M > 0


def _lambda_factor_log(fam, cost, eps2):
    """log(ceil(M lambda*(eps2) / (2 eps2)) + 1), vectorised over eps2"""
    eps2 = np.asarray(eps2, dtype=float)
    if not _has_lambda_factor(cost):
        return np.zeros_like(eps2)
    lam = lambda_star_values(cost.penalty, eps2, fam.lipschitz_x)
    return np.log(np.ceil(cost.M * lam / (2.0 * eps2)) + 1.0)


def covering_bound_gc(fam, cost, eps1, eps2):
    """
    log N(eps1 + eps2, G_c) bounded through the lambda-grid product
    (ceil(M lambda*(eps2) / (2 eps2)) + 1) N(eps1, G).
    """
    if eps1 <= 0 or eps2 <= 0:
        raise DroException(
            "eps1 and eps2 must be > 0, got {}, {}".format(eps1, eps2),
            DroException.ExceptionType.Domain,
        )
    factor = float(_lambda_factor_log(fam, cost, np.asarray([eps2]))[0])
    return factor + covering_number_bound(fam, eps1)


def _split_terms(fam, cost):
    """
    (A, B) of the closed-form derivation, the optimal split being
    gamma = sqrt(B) / (sqrt(A) + sqrt(B)).
    """
    c = ClassConstants.of(fam, cost)
    b_term = 2.0 * c.k * c.lipschitz_theta / c.beta
    penalty = cost.penalty
    if penalty.family is PenaltyFamily.HardBall:
        return 0.0, b_term
    if penalty.family is PenaltyFamily.PowerLaw:
        a, q = penalty.alpha, penalty.q
        inner = (
            c.M * (c.lipschitz_x / q) ** q * (q - 1.0) ** (q - 1.0)
            / (2.0 * a * c.beta ** q)
        )
        return q * (inner + 1.0), b_term
    return c.M * c.lipschitz_x / (2.0 * penalty.linear_threshold * c.beta), b_term


def optimal_split(fam, cost):
    if not _has_lambda_factor(cost):
        return 1.0
    a_term, b_term = _split_terms(fam, cost)
    if a_term == 0:
        return 1.0
    return sqrt(b_term) / (sqrt(a_term) + sqrt(b_term))


def dn_bound(fam, cost, n, cfg=BoundConfig()):
    """
    12 n^-1/2 int_0^beta sqrt(log((ceil(M lambda*(h2) / (2 h2)) + 1) N(h1, G)))

    Parameters
    ----------
    fam : ObjectiveFamily
    cost : TransportCost
    n : int
        Sample size
    cfg : BoundConfig
        Split and quadrature settings

    Returns
    -------
    float
    """
    _check_n(n)
    if not _has_lambda_factor(cost):
        gamma = 1.0
    else:
        gamma = optimal_split(fam, cost) if cfg.split_gamma is None else cfg.split_gamma

    def integrand(eps):
        log_product = covering_number_bound(fam, gamma * eps)
        if gamma < 1.0:
            log_product = log_product + _lambda_factor_log(fam, cost, (1.0 - gamma) * eps)
        return np.sqrt(log_product)

    value = 12.0 / sqrt(n) * _integrate(integrand, fam.beta, cfg)
    _logger.debug("D_n(n={}, gamma={:.6f}) = {:.6e}".format(n, gamma, value))
    return value


def dn_closed_forms(fam, cost, n):
    _check_n(n)
    if not fam.verified:
        raise DroException(
            "Closed forms need a shipped loss family, got {}".format(fam.kind.name),
            DroException.ExceptionType.Configuration,
        )
    c = ClassConstants.of(fam, cost)
    penalty = cost.penalty
    root_n = sqrt(n)
    if penalty.family is PenaltyFamily.HardBall:
        return 24.0 * sqrt(2.0 * c.lipschitz_theta * c.beta * c.k / n)
    if penalty.family is PenaltyFamily.PowerLaw:
        a_term, b_term = _split_terms(fam, cost)
        return 24.0 / root_n * c.beta * (sqrt(a_term) + sqrt(b_term))

    eta = penalty.linear_threshold
    return (
        24.0
        / root_n
        * c.beta
        * sqrt(
            1.0
            + c.M * c.lipschitz_x / (2.0 * eta * c.beta)
            + 2.0 * c.k * c.lipschitz_theta / c.beta
            + 2.0 / c.beta * sqrt(c.k * c.M * c.lipschitz_x * c.lipschitz_theta / eta)
        )
    )


def entropy_integral(fam, upper, cfg=BoundConfig(), scale=1.0):
    """int_0^upper sqrt(log N(eps / scale, G)) d eps"""
    return _integrate(
        lambda eps: np.sqrt(covering_number_bound(fam, eps / scale)), upper, cfg
    )


def rn_bound(fam, cost, spec: FDivergenceSpec, n, cfg=BoundConfig()):
    _check_n(n)
    lam_n = lambda_n(cost, n, cfg)
    beta = fam.beta
    slack = 0.0 if cost.is_hard else float(cost.slack(lam_n, fam.lipschitz_x))
    s0 = spec.s0
    drift = float(
        spec.conjugate_derivative(beta / lam_n + s0) - spec.conjugate_derivative(s0)
    )
    entropy = 24.0 / sqrt(n) * entropy_integral(fam, beta, cfg)
    value = 2.0 * slack + 2.0 * beta * drift + entropy
    _logger.debug(
        "R_n(n={}, lambda_n={:.4e}) = {:.4e} + {:.4e} + {:.4e}".format(
            n, lam_n, 2.0 * slack, 2.0 * beta * drift, entropy
        )
    )
    return value


def slope_constants(fam, spec: FDivergenceSpec, consts: DivergenceConstants):
    """(C1, C2) bounding the lambda-slope and the nu-scale of g"""
    nu_tilde = consts.nu_tilde
    c2 = float(spec.conjugate_derivative(-nu_tilde))
    c1 = (
        float(spec.conjugate(-nu_tilde))
        - consts.inf_fstar
        + consts.tail_sup
        + c2 * (max(-consts.s0, -nu_tilde) + consts.M)
    )
    return c1, c2


def rn_tilde_bound(fam, cost, spec, n, cfg, consts: DivergenceConstants):
    _check_n(n)
    if consts.nu_tilde >= -consts.s0:
        raise DroException(
            "nu~ = {} leaves the domain [nu~, -s0] empty".format(consts.nu_tilde),
            DroException.ExceptionType.Domain,
            {"nu_tilde": consts.nu_tilde, "s0": consts.s0},
        )
    lam_n = lambda_n(cost, n, cfg)
    c1, c2 = slope_constants(fam, spec, consts)
    g1, g2, g3 = cfg.split_three
    width = -consts.s0 - consts.nu_tilde

    def integrand(eps):
        log_product = (
            np.log(np.ceil(lam_n * c1 / (2.0 * g1 * eps)))
            + np.log(np.ceil(width * lam_n * c2 / (g2 * eps)))
            + covering_number_bound(fam, g3 * eps / c2)
        )
        return np.sqrt(np.maximum(log_product, 0.0))

    value = 24.0 / sqrt(n) * _integrate(integrand, fam.beta * c2, cfg)
    _logger.debug(
        "R~_n(n={}, lambda_n={:.4e}, C1={:.4e}, C2={:.4e}) = {:.6e}".format(
            n, lam_n, c1, c2, value
        )
    )
    return value


def lambda_factor(fam, cost, eps2):
    """The integer ceil(M lambda*(eps2) / (2 eps2)) + 1"""
    if not _has_lambda_factor(cost):
        return 1
    lam = float(lambda_star_values(cost.penalty, np.asarray([eps2]), fam.lipschitz_x)[0])
    return int(ceil(cost.M * lam / (2.0 * eps2))) + 1
