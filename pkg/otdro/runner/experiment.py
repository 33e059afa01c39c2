import concurrent.futures
import contextlib
import dataclasses
import functools
import json
import logging
import multiprocessing
import pathlib
import time
import typing
from math import sqrt

import numpy as np

import otdro.default as default
from ..bounds import TailConstants, build_bound_report, tail_probabilities
from ..exceptions import DroException
from ..factory import RunInfos
from ..objective import Dataset, MixtureGenerator
from ..solvers import DualProblem, erm_minimize, points_per_axis, solve_dual, theta_grid
from ..utils import substream_rng
from ..utils.logging import RunLogging, install_worker_logging
from .config import ExperimentConfig
from .records import TrialRecord, write_records, write_summary

_logger = logging.getLogger(__name__)

REFERENCE_STREAM = 0
TRIAL_STREAM = 1
GRID_ERROR_FRACTION = 20
DRIFT_FRACTION = 10
MAX_POINTS_PER_AXIS = 21
MAX_GRID_SIZE = 20000
CHECKED_TAIL = 0.5
STDERR_FACTOR = 3.0


@dataclasses.dataclass(frozen=True)
class ExperimentBounds:
    envelope: float
    tails: typing.Dict[float, object]
    report: object


@dataclasses.dataclass(frozen=True)
class _TrialContext:
    cfg: ExperimentConfig
    thetas: np.ndarray
    reference_value: float
    reference: typing.Optional[Dataset] = None


def experiment_bounds(cfg: ExperimentConfig):
    """Envelope of the scenario at n_train and its tail at every eps of the grid"""
    class_probs = ()
    if cfg.scenario.regularized:
        class_probs = tuple(MixtureGenerator(cfg.generator).class_probs.values())
    report = build_bound_report(
        cfg.fam,
        cfg.cost,
        cfg.n_train,
        cfg.eps_grid[0],
        cfg.bounds,
        cfg.divergence,
        class_probs,
        cfg.delta_opt,
    )
    if cfg.scenario.regularized:
        consts = TailConstants(
            cfg.fam.beta, report.C2, class_probs, cfg.bounds.p0, cfg.delta_opt
        )
    else:
        consts = TailConstants(cfg.fam.beta, delta_opt=cfg.delta_opt)
    tails = {
        eps: tail_probabilities(cfg.scenario.theorem, cfg.n_train, eps, consts)
        for eps in cfg.eps_grid
    }
    return ExperimentBounds(report.envelope(cfg.scenario.regularized), tails, report)


def experiment_theta_grid(cfg: ExperimentConfig, envelope):
    """
    Theta grid whose resolution keeps the grid error of the optimal value
    below envelope / 20, the robust values being L_Theta-Lipschitz in theta.
    """
    k = cfg.fam.param_dim
    if cfg.theta_points is not None:
        count = cfg.theta_points
    else:
        spacing = envelope / (
            0.5 * GRID_ERROR_FRACTION * cfg.fam.lipschitz_theta * sqrt(k)
        )
        count = points_per_axis(spacing)
        if count > MAX_POINTS_PER_AXIS:
            _logger.info(
                "Theta grid capped at {} points per axis, {} required".format(
                    MAX_POINTS_PER_AXIS, count
                )
            )
            count = MAX_POINTS_PER_AXIS
    if count ** k > MAX_GRID_SIZE:
        raise DroException(
            "A theta grid of {}^{} points is too large".format(count, k),
            DroException.ExceptionType.Configuration,
            {"points_per_axis": count, "k": k},
        )
    return theta_grid(k, count)


def _problem(cfg: ExperimentConfig, theta, sample):
    return DualProblem(
        cfg.fam,
        theta,
        cfg.cost,
        cfg.radius,
        sample,
        cfg.divergence,
        cfg.inner,
        nu_rule=cfg.nu_rule,
    )


def optimal_value(cfg: ExperimentConfig, thetas, sample):
    """min over the theta grid of the dual value on `sample`"""
    prob = _problem(cfg, thetas[0], sample)
    values = np.array([solve_dual(prob.with_theta(t)).value for t in thetas])
    i = int(np.argmin(values))
    return thetas[i], float(values[i])


def _draw(cfg: ExperimentConfig, n, stream, index):
    return MixtureGenerator(cfg.generator).sample(
        n, substream_rng(cfg.seed, stream, index)
    )


def _reference(cfg: ExperimentConfig, thetas, envelope):
    """
    Reference value on n_reference points and its drift when the reference
    sample is doubled.
    """
    doubled = _draw(cfg, 2 * cfg.n_reference, REFERENCE_STREAM, 0)
    reference = doubled.subset(np.arange(cfg.n_reference))
    _, value = optimal_value(cfg, thetas, reference)
    _, value_doubled = optimal_value(cfg, thetas, doubled)
    drift = abs(value_doubled - value)
    _logger.info(
        "Reference value {:.6f} on {} points, drift {:.3e} when doubled".format(
            value, cfg.n_reference, drift
        )
    )
    if drift > envelope / DRIFT_FRACTION:
        _logger.warning(
            "Reference drift {:.3e} exceeds envelope / {} = {:.3e}".format(
                drift, DRIFT_FRACTION, envelope / DRIFT_FRACTION
            )
        )
    return reference, value, drift


def _concentration_trial(context: _TrialContext, trial):
    start = time.perf_counter()
    cfg = context.cfg
    sample = _draw(cfg, cfg.n_train, TRIAL_STREAM, trial)
    _, value = optimal_value(cfg, context.thetas, sample)
    _logger.debug("Trial {} : optimal value {:.6f}".format(trial, value))
    return TrialRecord(
        trial,
        value,
        context.reference_value,
        value - context.reference_value,
        time.perf_counter() - start,
    )


def _erm_trial(context: _TrialContext, trial):
    start = time.perf_counter()
    cfg = context.cfg
    sample = _draw(cfg, cfg.n_train, TRIAL_STREAM, trial)
    result = erm_minimize(
        _problem(cfg, np.zeros(cfg.fam.param_dim), sample),
        cfg.erm_search,
        cfg.erm_budget,
    )
    risk = solve_dual(_problem(cfg, result.theta_star, context.reference)).value
    excess = risk - context.reference_value
    _logger.debug(
        "Trial {} : ERM value {:.6f}, excess {:.3e}".format(trial, result.value, excess)
    )
    return TrialRecord(
        trial,
        result.value,
        context.reference_value,
        excess,
        time.perf_counter() - start,
        tuple(float(t) for t in result.theta_star),
        excess,
        result.eps_opt,
    )


def _run_trials(trial_fn, context: _TrialContext, logs: RunLogging, out_dir):
    cfg = context.cfg
    run = functools.partial(trial_fn, context)
    records = []
    try:
        if cfg.workers == 1:
            for trial in range(cfg.trials):
                records.append(run(trial))
        else:
            with concurrent.futures.ProcessPoolExecutor(
                cfg.workers,
                initializer=install_worker_logging,
                initargs=(logs.record_queue,),
            ) as pool:
                chunk = max(1, cfg.trials // (4 * cfg.workers))
                for record in pool.map(run, range(cfg.trials), chunksize=chunk):
                    records.append(record)
    except Exception as e:
        write_records(records, out_dir)
        _logger.exception(
            "Trials failed, {} completed trials flushed".format(len(records))
        )
        if isinstance(e, DroException):
            raise DroException(
                e.message,
                e.err_type,
                dict(e.diagnostics, completed_trials=len(records)),
                logs.log_file,
            ) from e
        raise
    return records


def summarize(records, bounds: ExperimentBounds, cfg: ExperimentConfig, drift):
    """
    Exceedance frequency of every (eps, side) cell against the tail.
    Cells whose tail exceeds 1/2 are reported but not checked.
    """
    records = sorted(records, key=lambda r: r.trial)
    deviation = np.array([r.deviation for r in records])
    trials = len(records)
    if cfg.scenario.erm:
        eps_opt = np.array([r.eps_opt for r in records])
        sides = [("upper", deviation, 2.0 * bounds.envelope, eps_opt)]
    else:
        zero = np.zeros(trials)
        sides = [
            ("upper", deviation, bounds.envelope, zero),
            ("lower", -deviation, bounds.envelope, zero),
        ]

    rows = []
    for eps in cfg.eps_grid:
        tail = bounds.tails[eps]
        stderr = sqrt(tail.value * (1.0 - tail.value) / trials)
        checked = tail.value <= CHECKED_TAIL
        for side, values, level, shift in sides:
            exceedances = int(np.sum(values >= level + shift + eps))
            frequency = exceedances / trials
            passed = (not checked) or frequency <= tail.value + STDERR_FACTOR * stderr
            rows.append(
                {
                    "eps": eps,
                    "side": side,
                    "envelope": bounds.envelope,
                    "threshold": level + eps,
                    "tail": tail.value,
                    "clamped": tail.clamped,
                    "checked": checked,
                    "exceedances": exceedances,
                    "frequency": frequency,
                    "stderr": stderr,
                    "passed": passed,
                    "reference_drift": drift,
                }
            )
            log = _logger.info if passed else _logger.error
            log(
                "eps={} {} : frequency {:.4f}, tail {:.4f}{}".format(
                    eps, side, frequency, tail.value, "" if checked else " (unchecked)"
                )
            )
    return rows


def _run(cfg: ExperimentConfig, out_dir, trial_fn):
    out_dir = pathlib.Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    with contextlib.ExitStack() as stack:
        record_queue = None
        if cfg.workers > 1:
            record_queue = stack.enter_context(multiprocessing.Manager()).Queue()
        logs = stack.enter_context(
            RunLogging(
                out_dir / default.LOG_NAME,
                "[{}]".format(cfg.scenario.value),
                record_queue=record_queue,
            )
        )
        _logger.info(
            "Running {} : n_train={}, n_reference={}, {} trials".format(
                cfg.scenario.value, cfg.n_train, cfg.n_reference, cfg.trials
            )
        )
        bounds = experiment_bounds(cfg)
        bounds_json = out_dir / "bounds.json"
        bounds_json.write_text(bounds.report.serialize())
        config_json = out_dir / "experiment.json"
        config_json.write_text(json.dumps(cfg.to_dict(), sort_keys=True, indent=4))

        thetas = experiment_theta_grid(cfg, bounds.envelope)
        _logger.info("Optimal values over {} grid points".format(len(thetas)))
        reference, value, drift = _reference(cfg, thetas, bounds.envelope)
        context = _TrialContext(
            cfg, thetas, value, reference if cfg.scenario.erm else None
        )

        records = _run_trials(trial_fn, context, logs, out_dir)
        trials_csv, timings_csv = write_records(records, out_dir)
        rows = summarize(records, bounds, cfg, drift)
        summary_csv = write_summary(rows, out_dir)
        passed = all(row["passed"] for row in rows)
        _logger.info("Run {}".format("passed" if passed else "failed"))

    return RunInfos(
        out_dir,
        trials_csv,
        summary_csv,
        timings_csv,
        logs.log_file,
        passed,
        bounds_json=bounds_json,
        config_json=config_json,
    )


def run_concentration(cfg: ExperimentConfig, out_dir: pathlib.Path):
    """
    Monte Carlo check of the optimal-value concentration inequalities.

    Each trial draws n_train points from its own substream and computes the
    optimal dual value over the theta grid. The deviation from the reference
    value is compared, on each side, with envelope + eps.

    Parameters
    ----------
    cfg : ExperimentConfig
        Its scenario must be ot_values or otreg_values
    out_dir : pathlib.Path
        Receives trials.csv, timings.csv, summary.csv, bounds.json,
        experiment.json and the run log

    Returns
    -------
    RunInfos
    """
    if cfg.scenario.erm:
        raise DroException(
            "run_concentration takes a values scenario, got {}".format(
                cfg.scenario.value
            ),
            DroException.ExceptionType.Configuration,
        )
    return _run(cfg, out_dir, _concentration_trial)


def run_erm_experiment(cfg: ExperimentConfig, out_dir: pathlib.Path):
    """
    Monte Carlo check of the ERM excess-risk inequalities. The excess of
    each trial's minimizer on the reference sample is compared with
    2 envelope + eps_opt + eps, eps_opt being the trial's own optimization
    gap estimate.
    """
    if not cfg.scenario.erm:
        raise DroException(
            "run_erm_experiment takes an ERM scenario, got {}".format(
                cfg.scenario.value
            ),
            DroException.ExceptionType.Configuration,
        )
    return _run(cfg, out_dir, _erm_trial)
