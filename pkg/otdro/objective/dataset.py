import dataclasses
import logging
import pathlib
import typing

import numpy as np
import pandas as pd

from ..exceptions import DroException

_logger = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class Dataset:
    """Sample points z_i = (x_i, y_i), x of shape (n, d) and y of shape (n,)"""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.atleast_2d(np.asarray(self.x, dtype=float))
        y = np.asarray(self.y, dtype=float).reshape(-1)
        if x.shape[0] == 0 or y.shape[0] == 0:
            raise DroException(
                "A dataset holds at least one point", DroException.ExceptionType.Data
            )
        if x.shape[0] != y.shape[0]:
            raise DroException(
                "{} predictors for {} labels".format(x.shape[0], y.shape[0]),
                DroException.ExceptionType.Data,
            )
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise DroException(
                "Dataset entries must be finite", DroException.ExceptionType.Data
            )
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __len__(self):
        return self.x.shape[0]

    @property
    def n(self):
        return self.x.shape[0]

    @property
    def dim(self):
        return self.x.shape[1]

    @property
    def labels(self):
        return np.unique(self.y)

    @property
    def class_probs(self):
        labels, counts = np.unique(self.y, return_counts=True)
        return {float(label): count / self.n for label, count in zip(labels, counts)}

    @property
    def min_class_prob(self):
        return min(self.class_probs.values())

    def point(self, i):
        return self.x[i], self.y[i]

    def subset(self, indices):
        return Dataset(self.x[indices], self.y[indices])

    def to_frame(self):
        frame = pd.DataFrame(
            self.x, columns=["x_{}".format(i + 1) for i in range(self.dim)]
        )
        frame["y"] = self.y
        return frame

    @staticmethod
    def from_frame(frame: pd.DataFrame):
        columns = ["x_{}".format(i + 1) for i in range(len(frame.columns) - 1)]
        if list(frame.columns) != columns + ["y"]:
            raise DroException(
                "Dataset columns must be x_1..x_d, y",
                DroException.ExceptionType.Data,
                {"columns": list(frame.columns)},
            )
        try:
            values = frame.to_numpy(dtype=float)
        except ValueError as e:
            raise DroException(
                "Dataset entries must be numeric", DroException.ExceptionType.Data
            ) from e
        return Dataset(values[:, :-1], values[:, -1])


def read_csv(path: pathlib.Path):
    try:
        frame = pd.read_csv(path)
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise DroException(
            "Malformed dataset file {}".format(path), DroException.ExceptionType.Data
        ) from e
    return Dataset.from_frame(frame)


def write_csv(dataset: Dataset, path: pathlib.Path):
    dataset.to_frame().to_csv(path, index=False, float_format="%.17g")


@dataclasses.dataclass(frozen=True)
class GeneratorConfig:
    """
    Two-component Gaussian mixture per class. The positive class uses the
    `centers`, the negative class their negation, so the generator is
    symmetric under a label flip when p_plus = 1/2.
    """

    dim: int = 2
    box: float = 1.0
    p_plus: float = 0.5
    centers: typing.Tuple[typing.Tuple[float, ...], ...] = ((0.5, 0.0), (0.3, 0.3))
    component_weights: typing.Tuple[float, ...] = (0.5, 0.5)
    sigma: float = 0.3

    def __post_init__(self):
        if not 0.0 < self.p_plus < 1.0:
            raise DroException(
                "p_plus must lie in (0, 1)", DroException.ExceptionType.Configuration
            )
        if len(self.centers) != len(self.component_weights):
            raise DroException(
                "One weight per mixture component is required",
                DroException.ExceptionType.Configuration,
            )
        if any(len(c) != self.dim for c in self.centers):
            raise DroException(
                "Mixture centers must have {} entries".format(self.dim),
                DroException.ExceptionType.Configuration,
            )
        if abs(sum(self.component_weights) - 1.0) > 1e-12 or min(
            self.component_weights
        ) < 0:
            raise DroException(
                "Mixture weights must be a probability vector",
                DroException.ExceptionType.Configuration,
            )
        if self.sigma < 0 or self.box <= 0:
            raise DroException(
                "sigma must be >= 0 and box > 0",
                DroException.ExceptionType.Configuration,
            )


class MixtureGenerator:
    def __init__(self, cfg: GeneratorConfig):
        self._cfg = cfg
        self._centers = np.asarray(cfg.centers, dtype=float)
        self._weights = np.asarray(cfg.component_weights, dtype=float)

    @property
    def config(self):
        return self._cfg

    @property
    def class_probs(self):
        return {-1.0: 1.0 - self._cfg.p_plus, 1.0: self._cfg.p_plus}

    def sample(self, n, rng: np.random.Generator):
        y = np.where(rng.random(n) < self._cfg.p_plus, 1.0, -1.0)
        component = rng.choice(len(self._weights), size=n, p=self._weights)
        noise = rng.standard_normal((n, self._cfg.dim))
        x = y[:, None] * self._centers[component] + self._cfg.sigma * noise
        clipped = np.clip(x, -self._cfg.box, self._cfg.box)
        _logger.debug(
            "Drew {} points, {} clipped to the box".format(
                n, int(np.sum(np.any(clipped != x, axis=1)))
            )
        )
        return Dataset(clipped, y)
