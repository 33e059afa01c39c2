import json
import logging
import pathlib

from ..bounds import BoundConfig
from ..divergence import DivergenceFamily, FDivergenceSpec
from ..objective import GeneratorConfig, ObjectiveFamily, ObjectiveKind
from ..oracle import PrimalMethod, PrimalSolverConfig
from ..solvers import ErmSearch, InnerSolverConfig, InnerStrategy, NuRule
from ..transport import (
    Norm,
    PenaltyFamily,
    PenaltySpec,
    TransportCost,
    diameter_bound,
)
from .config_exception import ConfigException
from .sections import RunDocument

_logger = logging.getLogger(__name__)


def _subset(section, keys):
    if section is None:
        return {}
    return {k: section.get(k) for k in keys if section.get(k) is not None}


class ConfigBuilder:
    @staticmethod
    def load_document(path: pathlib.Path):
        try:
            with open(path) as f:
                values = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigException("RunDocument", str(path), str(e)) from e
        if not isinstance(values, dict):
            raise ConfigException("RunDocument", str(path), "expected a JSON object")
        return RunDocument(values).validate()

    @staticmethod
    def create_divergence(section):
        if section is None:
            return None
        family = DivergenceFamily(section.get("family"))
        return FDivergenceSpec(family, section.get("alpha"))

    @staticmethod
    def create_family(section):
        return ObjectiveFamily(
            ObjectiveKind(section.get("kind")),
            section.get("dim"),
            section.get("beta", 1.0),
            section.get("box", 1.0),
            Norm(section.get("norm", "l2")),
            section.get("lipschitz_x"),
        )

    @staticmethod
    def create_penalty(section):
        return PenaltySpec(
            PenaltyFamily(section.get("family")),
            section.get("alpha"),
            section.get("q"),
            section.get("eta"),
        )

    @staticmethod
    def create_cost(section, fam: ObjectiveFamily):
        """M defaults to the largest finite cost on the box of the family"""
        penalty = ConfigBuilder.create_penalty(section.get("penalty"))
        delta = section.get("delta", 0.0)
        norm = Norm(section.get("norm", "l2"))
        M = section.get("M")
        if M is None:
            M = diameter_bound(penalty, delta, norm, fam.box, fam.dim)
            _logger.info("Cost bound M set to the box diameter cost {:.6g}".format(M))
        return TransportCost(penalty, delta, norm, M)

    @staticmethod
    def create_inner_config(section):
        values = _subset(
            section,
            ["restarts", "steps", "step_size", "grid_points", "tolerance", "seed"],
        )
        if section is not None and section.get("strategy") is not None:
            values["strategy"] = InnerStrategy(section.get("strategy"))
        return InnerSolverConfig(**values)

    @staticmethod
    def create_bound_config(section):
        values = _subset(
            section,
            [
                "split_gamma", "lambda_n_scale", "lambda_n_exponent", "p0",
                "quadrature_points", "quadrature_order",
            ],
        )
        if section is not None and section.get("split_three") is not None:
            values["split_three"] = tuple(section.get("split_three"))
        return BoundConfig(**values)

    @staticmethod
    def create_primal_config(section):
        values = _subset(section, ["max_iterations", "tolerance", "step_size"])
        if section is not None and section.get("method") is not None:
            values["method"] = PrimalMethod(section.get("method"))
        return PrimalSolverConfig(**values)

    @staticmethod
    def create_generator_config(section, fam: ObjectiveFamily):
        values = _subset(section, ["p_plus", "sigma"])
        if section is not None and section.get("centers") is not None:
            values["centers"] = tuple(tuple(c) for c in section.get("centers"))
        if section is not None and section.get("component_weights") is not None:
            values["component_weights"] = tuple(section.get("component_weights"))
        elif "centers" in values:
            values["component_weights"] = (1.0 / len(values["centers"]),) * len(
                values["centers"]
            )
        if "centers" not in values and fam.dim != 2:
            values["centers"] = ((0.5,) + (0.0,) * (fam.dim - 1),)
            values["component_weights"] = (1.0,)
        return GeneratorConfig(dim=fam.dim, box=fam.box, **values)

    @staticmethod
    def create_experiment_config(document: RunDocument):
        from ..runner.config import ExperimentConfig, Scenario

        section = document.section("experiment")
        if section is None:
            raise ConfigException("RunDocument", "experiment", "field is required")
        fam = ConfigBuilder.create_family(document.section("family"))
        values = _subset(
            section,
            [
                "n_train", "n_reference", "trials", "radius", "seed",
                "theta_points", "erm_budget", "delta_opt", "workers",
            ],
        )
        if section.get("eps_grid") is not None:
            values["eps_grid"] = tuple(section.get("eps_grid"))
        if section.get("erm_search") is not None:
            values["erm_search"] = ErmSearch(section.get("erm_search"))
        problem = document.section("problem")
        if problem is not None and problem.get("nu_rule") is not None:
            values["nu_rule"] = NuRule(problem.get("nu_rule"))
        return ExperimentConfig(
            fam,
            ConfigBuilder.create_cost(document.section("cost"), fam),
            Scenario(section.get("scenario")),
            ConfigBuilder.create_divergence(document.section("divergence")),
            ConfigBuilder.create_generator_config(document.section("generator"), fam),
            ConfigBuilder.create_bound_config(document.section("bounds")),
            ConfigBuilder.create_inner_config(document.section("inner")),
            **values
        )
