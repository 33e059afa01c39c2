from .ctransform import (
    Certificate,
    GainProfile,
    InnerSolverConfig,
    InnerStrategy,
    TransformBatch,
    TransformResult,
    c_delta_transform,
    c_delta_transform_values,
    c_transform,
    c_transform_values,
    delta_transform_gap,
    full_attack_transform,
    full_attack_values,
)
from .cumulant import NuRule, lambda_f, log_mean_exp, sample_range_domain
from .dual import (
    DualProblem,
    DualSolution,
    empirical_risk,
    kl_dro_dual,
    lambda_limit_check,
    ot_dro_dual,
    otreg_fdiv_dual,
    solve_dual,
)
from .erm import ErmResult, ErmSearch, erm_minimize, points_per_axis, theta_grid
