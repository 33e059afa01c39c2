import numpy as np

from ...divergence import DivergenceFamily, FDivergenceSpec
from ...objective import Dataset, ObjectiveFamily, ObjectiveKind
from ...solvers import DualProblem, InnerSolverConfig
from ...transport import (
    Norm,
    PenaltyFamily,
    PenaltySpec,
    TransportCost,
    diameter_bound,
)


class ProblemHelper:
    @staticmethod
    def get_penalties():
        return [
            PenaltySpec(PenaltyFamily.HardBall),
            PenaltySpec(PenaltyFamily.PowerLaw, alpha=1.0, q=2.0),
            PenaltySpec(PenaltyFamily.PowerPlusLinear, alpha=1.0, q=2.0, eta=0.5),
            PenaltySpec(PenaltyFamily.Exponential, alpha=0.5, q=1.0),
        ]

    @staticmethod
    def get_divergences():
        return [
            FDivergenceSpec(DivergenceFamily.KL),
            FDivergenceSpec(DivergenceFamily.Alpha, 2.0),
        ]

    @staticmethod
    def get_cost(penalty, delta=0.1, norm=Norm.L2, box=1.0, dim=1):
        return TransportCost(
            penalty, delta, norm, diameter_bound(penalty, delta, norm, box, dim)
        )

    @staticmethod
    def get_ramp_point():
        """theta and z with L(x~) = clamp(0.5 + x~, 0, 1) around x = 0"""
        fam = ObjectiveFamily(ObjectiveKind.ClampedLinearMargin, 1)
        return fam, np.array([1.0]), (np.array([0.0]), -1.0)

    @staticmethod
    def get_random_dataset(rng, n, dim, box=1.0):
        x = rng.uniform(-box, box, (n, dim))
        y = rng.choice([-1.0, 1.0], n)
        y[0], y[-1] = -1.0, 1.0
        return Dataset(x, y)

    @staticmethod
    def get_random_theta(rng, dim):
        theta = rng.normal(size=dim)
        return theta / np.linalg.norm(theta) * rng.uniform(0.2, 1.0)

    @staticmethod
    def get_random_problem(
        rng,
        n=6,
        dim=2,
        penalty=None,
        divergence=None,
        radius=0.1,
        kind=ObjectiveKind.ClampedLinearMargin,
        delta=0.1,
        norm=Norm.L2,
        inner_cfg=InnerSolverConfig(),
    ):
        if penalty is None:
            penalty = PenaltySpec(PenaltyFamily.PowerLaw, alpha=1.0, q=2.0)
        fam = ObjectiveFamily(
            kind,
            dim,
            norm=norm,
            lipschitz_x_target=1.0
            if kind is ObjectiveKind.SaturatedLogistic
            else None,
        )
        return DualProblem(
            fam,
            ProblemHelper.get_random_theta(rng, dim),
            ProblemHelper.get_cost(penalty, delta, norm, fam.box, dim),
            radius,
            ProblemHelper.get_random_dataset(rng, n, dim, fam.box),
            divergence,
            inner_cfg,
        )
