import dataclasses
import logging
import typing
from enum import Enum
from math import log1p, sqrt

import numpy as np
from scipy.special import expit

from ..exceptions import DroException
from ..transport import Norm

_logger = logging.getLogger(__name__)

THETA_NORM_SLACK = 1e-12


class ObjectiveKind(Enum):
    ClampedLinearMargin = "clamped_linear_margin"
    SaturatedLogistic = "saturated_logistic"
    UserDefined = "user_defined"


@dataclasses.dataclass(frozen=True)
class UserLoss:
    """
    Loss supplied as callables with constants asserted by the user. The
    callables are vectorised over rows: loss(theta, x, y) -> (n,) and
    grad_x(theta, x, y) -> (n, d). None of the constants can be checked,
    reports carry them as unverified.
    """

    loss: typing.Callable
    grad_x: typing.Callable
    beta: float
    lipschitz_x: float
    lipschitz_theta: float
    supremum: typing.Optional[typing.Callable] = None


@dataclasses.dataclass(frozen=True)
class ObjectiveFamily:
    """
    Bounded loss class L_theta on the box [-box, box]^dim with theta in the
    unit L2 ball of R^dim.

    The two shipped kinds are functions of the linear score
    u = offset - y <theta, x>, y in {-1, +1}:

    * ClampedLinearMargin : clamp(beta / 2 - y <theta, x>, 0, beta)
    * SaturatedLogistic : beta * sigmoid(slope * (-y <theta, x>)), the slope
      being chosen so that x -> L is lipschitz_x-Lipschitz in `norm`
    """

    kind: ObjectiveKind
    dim: int
    beta: float = 1.0
    box: float = 1.0
    norm: Norm = Norm.L2
    lipschitz_x_target: typing.Optional[float] = None
    user: typing.Optional[UserLoss] = None

    def __post_init__(self):
        if self.dim < 1:
            raise DroException(
                "dim must be >= 1", DroException.ExceptionType.Domain
            )
        if self.beta <= 0 or self.box <= 0:
            raise DroException(
                "beta and box must be > 0", DroException.ExceptionType.Domain
            )
        if self.kind is ObjectiveKind.SaturatedLogistic:
            if self.lipschitz_x_target is None or self.lipschitz_x_target <= 0:
                raise DroException(
                    "SaturatedLogistic requires lipschitz_x_target > 0",
                    DroException.ExceptionType.Domain,
                )
        if (self.kind is ObjectiveKind.UserDefined) != (self.user is not None):
            raise DroException(
                "A UserLoss is given exactly for the UserDefined kind",
                DroException.ExceptionType.Domain,
            )

    @staticmethod
    def user_defined(dim, user, box=1.0, norm=Norm.L2):
        _logger.warning(
            "User-defined loss constants (beta={}, L_X={}, L_Theta={}) are "
            "unverified".format(user.beta, user.lipschitz_x, user.lipschitz_theta)
        )
        return ObjectiveFamily(
            ObjectiveKind.UserDefined, dim, user.beta, box, norm, user=user
        )

    @property
    def param_dim(self):
        return self.dim

    @property
    def theta_norm(self):
        return Norm.L2

    @property
    def is_linear(self):
        return self.kind is not ObjectiveKind.UserDefined

    @property
    def verified(self):
        return self.is_linear

    @property
    def offset(self):
        return 0.5 * self.beta if self.kind is ObjectiveKind.ClampedLinearMargin else 0.0

    @property
    def slope(self):
        if self.kind is ObjectiveKind.SaturatedLogistic:
            return 4.0 * self.lipschitz_x_target / (
                self.beta * self.norm.dual_bound(self.dim)
            )
        return 1.0

    @property
    def lipschitz_x(self):
        if self.kind is ObjectiveKind.ClampedLinearMargin:
            return self.norm.dual_bound(self.dim)
        if self.kind is ObjectiveKind.SaturatedLogistic:
            return self.lipschitz_x_target
        return self.user.lipschitz_x

    @property
    def lipschitz_theta(self):
        radius = self.box * sqrt(self.dim)
        if self.kind is ObjectiveKind.ClampedLinearMargin:
            return radius
        if self.kind is ObjectiveKind.SaturatedLogistic:
            return 0.25 * self.beta * self.slope * radius
        return self.user.lipschitz_theta

    def link(self, u):
        """Outer function G of the score, L = G(u)"""
        u = np.asarray(u, dtype=float)
        if self.kind is ObjectiveKind.ClampedLinearMargin:
            return np.clip(u, 0.0, self.beta)
        return self.beta * expit(self.slope * u)

    def link_derivative(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind is ObjectiveKind.ClampedLinearMargin:
            return ((u > 0.0) & (u < self.beta)).astype(float)
        sigma = expit(self.slope * u)
        return self.beta * self.slope * sigma * (1.0 - sigma)

    def to_dict(self):
        values = {
            "kind": self.kind.value,
            "dim": self.dim,
            "beta": self.beta,
            "box": self.box,
            "norm": self.norm.value,
            "L_X": self.lipschitz_x,
            "L_Theta": self.lipschitz_theta,
            "verified": self.verified,
        }
        if self.lipschitz_x_target is not None:
            values["lipschitz_x_target"] = self.lipschitz_x_target
        return values


def check_theta(fam, theta):
    theta = np.asarray(theta, dtype=float).reshape(-1)
    if theta.shape != (fam.dim,):
        raise DroException(
            "theta must have {} entries, got {}".format(fam.dim, theta.shape[0]),
            DroException.ExceptionType.Domain,
        )
    if np.linalg.norm(theta) > 1.0 + THETA_NORM_SLACK:
        raise DroException(
            "theta must lie in the unit ball, |theta| = {}".format(
                np.linalg.norm(theta)
            ),
            DroException.ExceptionType.Domain,
        )
    return theta


def _check_labels(fam, y):
    if fam.is_linear and np.any(np.abs(y) != 1):
        raise DroException(
            "{} expects labels in {{-1, +1}}".format(fam.kind.name),
            DroException.ExceptionType.Domain,
        )


def linear_score(fam, theta, y):
    """
    (u0, a) with L(x~) = G(u0 + <a, x~>) for the points labelled y:
    u0 = offset, a = -y theta.
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    _check_labels(fam, y)
    u0 = np.full(y.shape, fam.offset)
    return u0, -y[:, None] * theta[None, :]


def loss_values(fam, theta, x, y):
    theta = check_theta(fam, theta)
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if not fam.is_linear:
        return np.asarray(fam.user.loss(theta, x, y), dtype=float)
    _check_labels(fam, y)
    return fam.link(fam.offset - y * (x @ theta))


def loss_eval(fam, theta, z):
    x, y = z
    return float(loss_values(fam, theta, np.atleast_1d(x)[None, :], [y])[0])


def loss_grad_x_values(fam, theta, x, y):
    theta = check_theta(fam, theta)
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if not fam.is_linear:
        return np.asarray(fam.user.grad_x(theta, x, y), dtype=float)
    _check_labels(fam, y)
    u = fam.offset - y * (x @ theta)
    return fam.link_derivative(u)[:, None] * (-y[:, None] * theta[None, :])


def loss_grad_x(fam, theta, z):
    x, y = z
    return loss_grad_x_values(fam, theta, np.atleast_1d(x)[None, :], [y])[0]


def loss_supremum(fam, theta):
    """sup over Z of L_theta"""
    theta = check_theta(fam, theta)
    if fam.is_linear:
        return float(fam.link(fam.offset + fam.box * np.sum(np.abs(theta))))
    if fam.user.supremum is not None:
        return float(fam.user.supremum(theta))
    _logger.info("No supremum supplied for the user loss, using beta")
    return fam.beta


def covering_number_bound(fam, eps):
    """log of (1 + 2 L_Theta / eps)^k"""
    if np.any(np.asarray(eps) <= 0):
        raise DroException("eps must be > 0", DroException.ExceptionType.Domain)
    if np.ndim(eps) == 0:
        return fam.param_dim * log1p(2.0 * fam.lipschitz_theta / float(eps))
    return fam.param_dim * np.log1p(2.0 * fam.lipschitz_theta / np.asarray(eps))
