from .calculator import (
    BoundConfig,
    ClassConstants,
    covering_bound_gc,
    dn_bound,
    dn_closed_forms,
    entropy_integral,
    lambda_factor,
    lambda_n,
    optimal_split,
    rn_bound,
    rn_tilde_bound,
    slope_constants,
)
from .tails import (
    TailConstants,
    TailProbability,
    TheoremKind,
    class_tail,
    tail_probabilities,
)
from .g_function import g_function_bounds_check, g_values
from .report import BoundReport, build_bound_report
