from .penalty import (
    PenaltyFamily,
    PenaltySpec,
    lambda_star,
    lambda_star_values,
    psi_eval,
    psi_star,
)
from .cost import Norm, TransportCost, cost_eval, diameter_bound, validate_M
