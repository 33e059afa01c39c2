import logging
import pathlib

import numpy as np

import otdro.default as default
from ..config import ConfigBuilder, ConfigException, RunDocument
from ..objective import MixtureGenerator, read_csv
from ..solvers import DualProblem, NuRule
from ..utils import substream_rng

_logger = logging.getLogger(__name__)

PRIMAL_CHECK_STREAM = 2
PRIMAL_CHECK_MAX_SOURCES = 8


class ProblemFactory:
    """Factory class turning run documents into dual problems and samples"""

    @staticmethod
    def _problem_section(document: RunDocument):
        section = document.section("problem")
        if section is None:
            raise ConfigException("RunDocument", "problem", "field is required")
        return section

    @staticmethod
    def create_sample(document: RunDocument, rng=None, n=None):
        """
        Returns the sample the problem is solved on.

        Parameters
        ----------
        document : RunDocument
            A validated run document holding a problem section
        rng : numpy.random.Generator or None, optional
            Generator used when the sample is drawn. If None, the problem
            seed (or the package default seed) is used, default : None
        n : int or None, optional
            Size override for drawn samples, default : None

        Returns
        -------
        Dataset
            The sample file content when `sample` is given, a draw of the
            mixture generator otherwise

        """
        section = ProblemFactory._problem_section(document)
        fam = ConfigBuilder.create_family(document.section("family"))
        if section.get("sample") is not None:
            path = pathlib.Path(section.get("sample"))
            _logger.info("Reading sample from {}".format(path))
            sample = read_csv(path)
            if sample.dim != fam.dim:
                raise ConfigException(
                    "ProblemSection", "sample",
                    "{} has {} features, the family expects {}".format(
                        path, sample.dim, fam.dim
                    ),
                )
            return sample

        if rng is None:
            rng = np.random.default_rng(section.get("seed", default.SEED))
        generator = MixtureGenerator(
            ConfigBuilder.create_generator_config(document.section("generator"), fam)
        )
        return generator.sample(n or section.get("n"), rng)

    @staticmethod
    def create_problem(document: RunDocument, sample=None):
        """
        Builds the dual problem of the document.

        Parameters
        ----------
        document : RunDocument
            A validated run document holding family, cost and problem sections
        sample : Dataset or None, optional
            If None, the sample is created from the problem section,
            default : None

        Returns
        -------
        DualProblem

        """
        section = ProblemFactory._problem_section(document)
        fam = ConfigBuilder.create_family(document.section("family"))
        if sample is None:
            sample = ProblemFactory.create_sample(document)
        return DualProblem(
            fam,
            np.asarray(section.get("theta"), dtype=float),
            ConfigBuilder.create_cost(document.section("cost"), fam),
            section.get("radius"),
            sample,
            ConfigBuilder.create_divergence(document.section("divergence")),
            ConfigBuilder.create_inner_config(document.section("inner")),
            section.get("outer_tol", default.OUTER_TOLERANCE),
            NuRule(section.get("nu_rule", NuRule.SampleRange.value)),
        )

    @staticmethod
    def create_check_problems(document: RunDocument, instances):
        """
        Returns `instances` problems small enough for the primal oracles.
        Each draws at most eight sources from its own substream of the
        problem seed; a sample file yields one problem on its first rows.
        """
        section = ProblemFactory._problem_section(document)
        if section.get("sample") is not None:
            sample = ProblemFactory.create_sample(document)
            if sample.n > PRIMAL_CHECK_MAX_SOURCES:
                _logger.info(
                    "Primal check keeps the first {} of {} sources".format(
                        PRIMAL_CHECK_MAX_SOURCES, sample.n
                    )
                )
                sample = sample.subset(np.arange(PRIMAL_CHECK_MAX_SOURCES))
            return [ProblemFactory.create_problem(document, sample)]

        seed = section.get("seed", default.SEED)
        n = min(section.get("n"), PRIMAL_CHECK_MAX_SOURCES)
        return [
            ProblemFactory.create_problem(
                document,
                ProblemFactory.create_sample(
                    document, substream_rng(seed, PRIMAL_CHECK_STREAM, i), n
                ),
            )
            for i in range(instances)
        ]
