from .simplex import LinearProgram, LpResult, LpStatus, solve_lp
from .primal import (
    FiniteInstance,
    PrimalMethod,
    PrimalResult,
    PrimalSolverConfig,
    build_finite_instance,
    ot_primal_lp,
    otreg_primal_convex,
    weak_duality_check,
)
