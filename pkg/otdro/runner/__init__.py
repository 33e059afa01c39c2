from .config import ExperimentConfig, Scenario
from .records import TrialRecord, read_summary, read_trials, write_records, write_summary
from .experiment import (
    ExperimentBounds,
    experiment_bounds,
    experiment_theta_grid,
    optimal_value,
    run_concentration,
    run_erm_experiment,
    summarize,
)
from .plots import emit_plots
