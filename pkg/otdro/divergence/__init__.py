from .f_divergence import (
    DivergenceConstants,
    DivergenceFamily,
    FDivergenceSpec,
    divergence_constants,
    f_divergence_finite,
    f_eval,
    f_star_eval,
    f_star_right_deriv,
    select_nu_tilde,
    tail_sup,
)
