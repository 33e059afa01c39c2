from .family import (
    ObjectiveFamily,
    ObjectiveKind,
    UserLoss,
    check_theta,
    covering_number_bound,
    linear_score,
    loss_eval,
    loss_grad_x,
    loss_grad_x_values,
    loss_supremum,
    loss_values,
)
from .dataset import Dataset, GeneratorConfig, MixtureGenerator, read_csv, write_csv
