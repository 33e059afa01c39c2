"""
CSV layout of experiment runs.

trials.csv, one row per trial, sorted by trial id:
    trial            trial id, also the RNG substream index
    empirical_value  optimal empirical dual value (ERM value for ERM runs)
    reference_value  same quantity on the reference sample
    deviation        empirical_value - reference_value (ERM excess for ERM runs)
    erm_theta        ';'-joined minimizer, empty for concentration runs
    erm_excess       reference risk of erm_theta minus the reference optimum
    eps_opt          optimization gap reported by the ERM search

timings.csv : trial, wall_time (seconds). Kept apart so that trials.csv
and summary.csv only depend on the configuration.

summary.csv, one row per (eps, side):
    eps, side ('upper' or 'lower'), envelope, threshold, tail, clamped,
    checked, exceedances, frequency, stderr, passed, reference_drift
"""
import dataclasses
import math
import pathlib
import typing

import numpy as np
import pandas as pd

from ..exceptions import DroException

FLOAT_FORMAT = "%.17g"
TRIAL_COLUMNS = [
    "trial",
    "empirical_value",
    "reference_value",
    "deviation",
    "erm_theta",
    "erm_excess",
    "eps_opt",
]
SUMMARY_COLUMNS = [
    "eps",
    "side",
    "envelope",
    "threshold",
    "tail",
    "clamped",
    "checked",
    "exceedances",
    "frequency",
    "stderr",
    "passed",
    "reference_drift",
]


@dataclasses.dataclass(frozen=True)
class TrialRecord:
    trial: int
    empirical_value: float
    reference_value: float
    deviation: float
    wall_time: float
    erm_theta: typing.Optional[typing.Tuple[float, ...]] = None
    erm_excess: typing.Optional[float] = None
    eps_opt: typing.Optional[float] = None

    def __post_init__(self):
        if not math.isfinite(self.deviation):
            raise DroException(
                "Trial {} has a non-finite deviation".format(self.trial),
                DroException.ExceptionType.Verification,
                {"trial": self.trial, "deviation": self.deviation},
            )

    def to_row(self):
        return {
            "trial": self.trial,
            "empirical_value": self.empirical_value,
            "reference_value": self.reference_value,
            "deviation": self.deviation,
            "erm_theta": ""
            if self.erm_theta is None
            else ";".join(repr(float(t)) for t in self.erm_theta),
            "erm_excess": np.nan if self.erm_excess is None else self.erm_excess,
            "eps_opt": np.nan if self.eps_opt is None else self.eps_opt,
        }


def write_records(records, out_dir: pathlib.Path):
    """Writes trials.csv and timings.csv, returns both paths"""
    records = sorted(records, key=lambda r: r.trial)
    trials_csv = pathlib.Path(out_dir) / "trials.csv"
    timings_csv = pathlib.Path(out_dir) / "timings.csv"
    pd.DataFrame([r.to_row() for r in records], columns=TRIAL_COLUMNS).to_csv(
        trials_csv, index=False, float_format=FLOAT_FORMAT
    )
    pd.DataFrame(
        {"trial": [r.trial for r in records], "wall_time": [r.wall_time for r in records]}
    ).to_csv(timings_csv, index=False, float_format=FLOAT_FORMAT)
    return trials_csv, timings_csv


def write_summary(rows, out_dir: pathlib.Path):
    summary_csv = pathlib.Path(out_dir) / "summary.csv"
    pd.DataFrame(rows, columns=SUMMARY_COLUMNS).to_csv(
        summary_csv, index=False, float_format=FLOAT_FORMAT
    )
    return summary_csv


def _read(path, columns, what):
    path = pathlib.Path(path)
    try:
        frame = pd.read_csv(path, keep_default_na=False, na_values=[""])
    except (FileNotFoundError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise DroException(
            "Unreadable {} file {}".format(what, path), DroException.ExceptionType.Data
        ) from e
    missing = [c for c in columns if c not in frame.columns]
    if missing or frame.empty:
        raise DroException(
            "Malformed {} file {}".format(what, path),
            DroException.ExceptionType.Data,
            {"missing_columns": missing, "rows": len(frame)},
        )
    return frame


def read_trials(path: pathlib.Path):
    frame = _read(path, TRIAL_COLUMNS, "trials")
    deviation = pd.to_numeric(frame["deviation"], errors="coerce").to_numpy(dtype=float)
    if not np.all(np.isfinite(deviation)):
        raise DroException(
            "Non-finite deviations in {}".format(path), DroException.ExceptionType.Data
        )
    return frame.sort_values("trial", kind="mergesort").reset_index(drop=True)


def read_summary(path: pathlib.Path):
    return _read(path, SUMMARY_COLUMNS, "summary")
