import dataclasses
import logging
from enum import Enum

import numpy as np
import pandas as pd

import otdro.default as default
from ..exceptions import DroException
from ..objective import (
    Dataset,
    ObjectiveKind,
    check_theta,
    linear_score,
    loss_grad_x_values,
    loss_values,
)
from ..transport import Norm, PenaltyFamily, PenaltySpec, TransportCost
from ..utils import golden_section_maximize_batch

_logger = logging.getLogger(__name__)


class InnerStrategy(Enum):
    Grid1D = "grid_1d"
    MultiStartAscent = "multi_start_ascent"


class Certificate(Enum):
    Exact = "exact"
    LowerBound = "lower_bound"

    @staticmethod
    def combine(*certificates):
        if all(c is Certificate.Exact for c in certificates):
            return Certificate.Exact
        return Certificate.LowerBound


@dataclasses.dataclass(frozen=True)
class InnerSolverConfig:
    strategy: InnerStrategy = InnerStrategy.Grid1D
    restarts: int = default.INNER_RESTARTS
    steps: int = default.INNER_STEPS
    step_size: float = default.INNER_STEP_SIZE
    grid_points: int = default.INNER_GRID_POINTS
    tolerance: float = default.INNER_TOLERANCE
    seed: int = default.SEED

    def __post_init__(self):
        if self.restarts < 1:
            raise DroException(
                "restarts must be >= 1", DroException.ExceptionType.Configuration
            )
        if self.tolerance <= 0:
            raise DroException(
                "tolerance must be > 0", DroException.ExceptionType.Configuration
            )
        if self.grid_points < 3 or self.steps < 1 or self.step_size <= 0:
            raise DroException(
                "grid_points >= 3, steps >= 1 and step_size > 0 are required",
                DroException.ExceptionType.Configuration,
            )


@dataclasses.dataclass(frozen=True)
class TransformResult:
    value: float
    argmax_x: np.ndarray
    certificate: Certificate


@dataclasses.dataclass(frozen=True)
class TransformBatch:
    """Per-point transforms of a dataset"""

    values: np.ndarray
    argmax_x: np.ndarray
    certificate: Certificate

    def __getitem__(self, i):
        return TransformResult(
            float(self.values[i]), self.argmax_x[i], self.certificate
        )

    def to_frame(self):
        frame = pd.DataFrame(
            self.argmax_x,
            columns=["argmax_x_{}".format(i + 1) for i in range(self.argmax_x.shape[1])],
        )
        frame.insert(0, "value", self.values)
        frame["certificate"] = self.certificate.value
        return frame


class GainProfile:
    """
    h(t) = max <a, v> over displacements |v| <= t keeping x + v in the box,
    for every row of a. Only moves toward sign(a) help, each coordinate
    being capped by the room left in the box.
    """

    def __init__(self, a, x, box, norm: Norm):
        a = np.atleast_2d(a)
        x = np.atleast_2d(x)
        self._norm = norm
        self._sign = np.sign(a)
        self._abs_a = np.abs(a)
        caps = np.where(a > 0, box - x, box + x)
        self._caps = np.where(self._abs_a > 0, np.maximum(caps, 0.0), 0.0)

        if norm is Norm.Linf:
            self.saturation = np.max(self._caps, axis=1)
            return

        self.saturation = np.sqrt(np.sum(self._caps ** 2, axis=1))
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = np.where(self._abs_a > 0, self._caps / self._abs_a, 0.0)
        order = np.argsort(ratios, axis=1, kind="stable")
        r = np.take_along_axis(ratios, order, axis=1)
        c = np.take_along_axis(self._caps, order, axis=1)
        abs_a = np.take_along_axis(self._abs_a, order, axis=1)

        zeros = np.zeros((a.shape[0], 1))
        self._prefix_c2 = np.concatenate([zeros, np.cumsum(c ** 2, axis=1)], axis=1)
        self._prefix_ac = np.concatenate([zeros, np.cumsum(abs_a * c, axis=1)], axis=1)
        suffix = np.cumsum((abs_a ** 2)[:, ::-1], axis=1)[:, ::-1]
        self._suffix_a2 = np.concatenate([suffix, zeros], axis=1)
        self._breakpoints = self._prefix_c2[:, :-1] + r ** 2 * self._suffix_a2[:, :-1]

    def _segment(self, t):
        """Index of the capped prefix and water level tau for t of shape (n, g)"""
        t2 = np.minimum(t, self.saturation[:, None]) ** 2
        k = np.sum(self._breakpoints[:, None, :] < t2[:, :, None], axis=2)
        prefix_c2 = np.take_along_axis(self._prefix_c2, k, axis=1)
        suffix_a2 = np.take_along_axis(self._suffix_a2, k, axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            tau = np.where(
                suffix_a2 > 0,
                np.sqrt(np.maximum(t2 - prefix_c2, 0.0) / suffix_a2),
                0.0,
            )
        return k, tau, suffix_a2

    def gain(self, t):
        t = np.asarray(t, dtype=float)
        squeeze = t.ndim == 1
        t = t[:, None] if squeeze else t
        if self._norm is Norm.Linf:
            value = np.sum(
                self._abs_a[:, None, :]
                * np.minimum(t[:, :, None], self._caps[:, None, :]),
                axis=2,
            )
        else:
            k, tau, suffix_a2 = self._segment(t)
            value = np.take_along_axis(self._prefix_ac, k, axis=1) + tau * suffix_a2
        return value[:, 0] if squeeze else value

    def displacement(self, t):
        """A maximizing displacement v for t of shape (n,)"""
        t = np.asarray(t, dtype=float)
        if self._norm is Norm.Linf:
            w = np.minimum(t[:, None], self._caps)
        else:
            _, tau, suffix_a2 = self._segment(t[:, None])
            w = np.minimum(self._caps, tau[:, 0][:, None] * self._abs_a)
            # every coordinate capped, including when rounding puts the
            # last breakpoint just below t^2
            capped = (t >= self.saturation) | (suffix_a2[:, 0] <= 0)
            w = np.where(capped[:, None], self._caps, w)
        return self._sign * w


def _check_lambda(lam):
    if not lam > 0:
        raise DroException(
            "lambda must be > 0, got {}".format(lam), DroException.ExceptionType.Domain
        )


def _linear_setup(fam, theta, data, norm):
    u0, a = linear_score(fam, theta, data.y)
    u0 = u0 + np.einsum("ij,ij->i", a, data.x)
    return u0, GainProfile(a, data.x, fam.box, norm)


def _attack(fam, profile, u0, data, t):
    t = np.minimum(t, profile.saturation)
    return fam.link(u0 + profile.gain(t)), data.x + profile.displacement(t)


def _soft_linear(fam, cost, lam, data, cfg, u0, profile):
    delta = cost.delta
    lo = np.minimum(delta, profile.saturation)
    hi = profile.saturation

    def objective(t):
        return fam.link(u0 + profile.gain(t)) - lam * cost.profile(t)

    if fam.kind is ObjectiveKind.ClampedLinearMargin:
        beta = fam.beta

        def concave_part(t):
            return np.minimum(u0 + profile.gain(t), beta) - lam * cost.profile(t)

        t_best, best = golden_section_maximize_batch(
            concave_part, lo, hi, default.RADIAL_TOLERANCE
        )
        # the positive part of the clamp is attained at t = delta
        zero_wins = best < 0.0
        t_best = np.where(zero_wins, lo, t_best)
        values = np.maximum(best, 0.0)
        certificate = Certificate.Exact
    else:
        grid = lo[:, None] + (hi - lo)[:, None] * np.linspace(0.0, 1.0, cfg.grid_points)
        scores = (
            fam.link(u0[:, None] + profile.gain(grid)) - lam * cost.profile(grid)
        )
        i = np.argmax(scores, axis=1)
        rows = np.arange(len(i))
        left = grid[rows, np.maximum(i - 1, 0)]
        right = grid[rows, np.minimum(i + 1, cfg.grid_points - 1)]
        t_best, values = golden_section_maximize_batch(
            objective, left, right, default.RADIAL_TOLERANCE
        )
        take = scores[rows, i] > values
        t_best = np.where(take, grid[rows, i], t_best)
        values = np.where(take, scores[rows, i], values)
        certificate = Certificate.LowerBound

    argmax = data.x + profile.displacement(t_best)
    return TransformBatch(values, argmax, certificate)


def _project(x_tilde, x, box, radius, norm):
    """Projection onto the box, after the radius-ball around x when given"""
    if radius is not None:
        d = x_tilde - x
        if norm is Norm.L2:
            length = np.linalg.norm(d, axis=-1, keepdims=True)
            with np.errstate(divide="ignore", invalid="ignore"):
                factor = np.where(length > radius, radius / length, 1.0)
            d = d * factor
        else:
            d = np.clip(d, -radius, radius)
        x_tilde = x + d
    return np.clip(x_tilde, -box, box)


def _distance_gradient(d, norm):
    if norm is Norm.L2:
        length = np.linalg.norm(d, axis=-1, keepdims=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(length > 0, d / length, 0.0)
    j = np.argmax(np.abs(d), axis=-1)
    g = np.zeros_like(d)
    np.put_along_axis(g, j[..., None], np.sign(np.take_along_axis(d, j[..., None], -1)), -1)
    return g


def _ascent(fam, theta, cost, lam, data, cfg, radius):
    """
    Multi-start normalised projected gradient ascent on
    x~ -> L(x~) - lam phi(|x~ - x|). The first start is x itself. A step is
    kept only when it improves the point's value, otherwise its size is
    halved. lam = 0 with radius None maximizes L over the box.
    """
    rng = np.random.default_rng(cfg.seed)
    box = fam.box
    x = data.x
    n, d = x.shape
    norm = cost.norm

    def objective(points):
        values = loss_values(fam, theta, points, data.y)
        if lam == 0 or radius is not None:
            return values
        return values - lam * cost.profile(norm.of(points - x))

    best_x = x.copy()
    best = objective(x)
    for restart in range(cfg.restarts):
        if restart == 0:
            current = x.copy()
        else:
            current = _project(
                rng.uniform(-box, box, (n, d)), x, box, radius, norm
            )
        current_values = objective(current)
        size = np.full((n, 1), cfg.step_size * box)
        for _ in range(cfg.steps):
            grad = loss_grad_x_values(fam, theta, current, data.y)
            if lam > 0 and radius is None:
                offset = current - x
                slope = cost.profile_derivative(norm.of(offset))
                grad = grad - lam * slope[:, None] * _distance_gradient(offset, norm)
            length = np.linalg.norm(grad, axis=1, keepdims=True)
            with np.errstate(divide="ignore", invalid="ignore"):
                direction = np.where(length > 0, grad / length, 0.0)
            candidate = _project(current + size * direction, x, box, radius, norm)
            values = objective(candidate)
            accept = values > current_values
            current = np.where(accept[:, None], candidate, current)
            current_values = np.where(accept, values, current_values)
            size = np.where(accept[:, None], size, 0.5 * size)
        take = current_values > best
        best = np.where(take, current_values, best)
        best_x = np.where(take[:, None], current, best_x)
    return TransformBatch(best, best_x, Certificate.LowerBound)


def c_delta_transform_values(fam, theta, delta, norm, data: Dataset, cfg=None):
    """Max of L_theta(., y) over the closed delta-ball around each x, in the box"""
    theta = check_theta(fam, theta)
    if delta < 0:
        raise DroException("delta must be >= 0", DroException.ExceptionType.Domain)
    if fam.is_linear:
        u0, profile = _linear_setup(fam, theta, data, norm)
        t = np.full(data.n, float(delta))
        values, argmax = _attack(fam, profile, u0, data, t)
        return TransformBatch(values, argmax, Certificate.Exact)

    hard = TransportCost(PenaltySpec(PenaltyFamily.HardBall), delta, norm)
    return _ascent(fam, theta, hard, 0.0, data, cfg or InnerSolverConfig(), delta)


def c_delta_transform(fam, theta, delta, norm, z, cfg=None):
    x, y = z
    batch = c_delta_transform_values(
        fam, theta, delta, norm, Dataset(np.atleast_1d(x)[None, :], [y]), cfg
    )
    return float(batch.values[0])


def c_transform_values(fam, theta, cost, lam, data: Dataset, cfg=None):
    """L^c_lam at every point of the dataset"""
    _check_lambda(lam)
    cfg = cfg or InnerSolverConfig()
    theta = check_theta(fam, theta)
    if cost.is_hard:
        return c_delta_transform_values(fam, theta, cost.delta, cost.norm, data, cfg)

    if not fam.is_linear or cfg.strategy is InnerStrategy.MultiStartAscent:
        batch = _ascent(fam, theta, cost, lam, data, cfg, None)
        _logger.debug(
            "Ascent transform at lambda={:.4e}, lower bound certificate".format(lam)
        )
        return batch

    u0, profile = _linear_setup(fam, theta, data, cost.norm)
    return _soft_linear(fam, cost, lam, data, cfg, u0, profile)


def c_transform(fam, theta, cost, lam, z, cfg=None):
    x, y = z
    return c_transform_values(
        fam, theta, cost, lam, Dataset(np.atleast_1d(x)[None, :], [y]), cfg
    )[0]


def full_attack_values(fam, theta, cost, data: Dataset, cfg=None):
    """
    lim lam -> 0+ of L^c_lam: the supremum of L(., y) over the finite-cost
    set of each point, the whole box for real-valued penalties.
    """
    theta = check_theta(fam, theta)
    if cost.is_hard:
        return c_delta_transform_values(fam, theta, cost.delta, cost.norm, data, cfg)
    if fam.is_linear:
        u0, profile = _linear_setup(fam, theta, data, cost.norm)
        values, argmax = _attack(fam, profile, u0, data, profile.saturation)
        return TransformBatch(values, argmax, Certificate.Exact)
    return _ascent(fam, theta, cost, 0.0, data, cfg or InnerSolverConfig(), None)


def full_attack_transform(fam, theta, cost, z, cfg=None):
    x, y = z
    batch = full_attack_values(
        fam, theta, cost, Dataset(np.atleast_1d(x)[None, :], [y]), cfg
    )
    return float(batch.values[0])


def delta_transform_gap(fam, theta, cost, lam, data: Dataset, cfg=None):
    """max over the sample of L^c_lam - L^{c_delta}"""
    soft = c_transform_values(fam, theta, cost, lam, data, cfg)
    hard = c_delta_transform_values(fam, theta, cost.delta, cost.norm, data, cfg)
    return float(np.max(soft.values - hard.values))
