import dataclasses
import logging
import typing
from enum import Enum

import otdro.default as default
from ..bounds import BoundConfig, TheoremKind
from ..divergence import FDivergenceSpec
from ..exceptions import DroException
from ..objective import GeneratorConfig, ObjectiveFamily
from ..solvers import ErmSearch, InnerSolverConfig, NuRule
from ..transport import TransportCost

_logger = logging.getLogger(__name__)

MIN_TRIALS = 100
REFERENCE_FACTOR = 50


class Scenario(Enum):
    OtValues = "ot_values"
    OtErm = "ot_erm"
    OtRegValues = "otreg_values"
    OtRegErm = "otreg_erm"

    @property
    def theorem(self):
        return TheoremKind(self.value)

    @property
    def regularized(self):
        return self.theorem.regularized

    @property
    def erm(self):
        return self.theorem.erm


@dataclasses.dataclass(frozen=True)
class ExperimentConfig:
    fam: ObjectiveFamily
    cost: TransportCost
    scenario: Scenario = Scenario.OtValues
    divergence: typing.Optional[FDivergenceSpec] = None
    generator: GeneratorConfig = GeneratorConfig()
    bounds: BoundConfig = BoundConfig()
    inner: InnerSolverConfig = InnerSolverConfig()
    nu_rule: NuRule = NuRule.SampleRange
    n_train: int = 200
    n_reference: int = 10000
    trials: int = 500
    radius: float = 0.1
    eps_grid: typing.Tuple[float, ...] = (0.05, 0.1, 0.2)
    seed: int = default.SEED
    theta_points: typing.Optional[int] = None
    erm_search: ErmSearch = ErmSearch.Grid
    erm_budget: int = 9
    delta_opt: float = 0.0
    workers: int = 1

    def __post_init__(self):
        if self.scenario.regularized != (self.divergence is not None):
            raise DroException(
                "Scenario {} {} a divergence".format(
                    self.scenario.value,
                    "requires" if self.scenario.regularized else "takes no",
                ),
                DroException.ExceptionType.Configuration,
            )
        if self.generator.dim != self.fam.dim or self.generator.box != self.fam.box:
            raise DroException(
                "Generator and loss family disagree on the predictor space",
                DroException.ExceptionType.Configuration,
                {"generator": (self.generator.dim, self.generator.box),
                 "family": (self.fam.dim, self.fam.box)},
            )
        if self.n_train < 2 or self.n_reference < REFERENCE_FACTOR * self.n_train:
            raise DroException(
                "n_reference must be >= {} n_train".format(REFERENCE_FACTOR),
                DroException.ExceptionType.Configuration,
                {"n_train": self.n_train, "n_reference": self.n_reference},
            )
        if self.trials < MIN_TRIALS:
            raise DroException(
                "Frequency estimates need >= {} trials".format(MIN_TRIALS),
                DroException.ExceptionType.Configuration,
            )
        if not self.eps_grid or min(self.eps_grid) < 0:
            raise DroException(
                "eps_grid must hold deviations >= 0",
                DroException.ExceptionType.Configuration,
            )
        if self.workers < 1 or self.radius <= 0 or not 0 <= self.delta_opt <= 1:
            raise DroException(
                "workers >= 1, radius > 0 and delta_opt in [0, 1] are required",
                DroException.ExceptionType.Configuration,
            )
        if self.theta_points is not None and self.theta_points < 2:
            raise DroException(
                "theta_points must be >= 2", DroException.ExceptionType.Configuration
            )

    def to_dict(self):
        return {
            "scenario": self.scenario.value,
            "family": self.fam.to_dict(),
            "cost": self.cost.to_dict(),
            "divergence": None if self.divergence is None else self.divergence.to_dict(),
            "generator": dataclasses.asdict(self.generator),
            "bounds": self.bounds.to_dict(),
            "n_train": self.n_train,
            "n_reference": self.n_reference,
            "trials": self.trials,
            "radius": self.radius,
            "eps_grid": list(self.eps_grid),
            "seed": self.seed,
            "theta_points": self.theta_points,
            "erm_search": self.erm_search.value,
            "erm_budget": self.erm_budget,
            "delta_opt": self.delta_opt,
        }
