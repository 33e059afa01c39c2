import math

import pytest

from ...exceptions import DroException
from ..records import TrialRecord, read_trials, write_records, write_summary


def _records():
    return [
        TrialRecord(1, 0.5, 0.4, 0.1, 0.02, (0.1, -0.2), 0.1, 0.0),
        TrialRecord(0, 0.3, 0.4, -0.1, 0.01, (0.0, 0.5), -0.1, 1e-3),
    ]


def test_trials_round_trip(tmp_path):
    trials_csv, timings_csv = write_records(_records(), tmp_path)
    frame = read_trials(trials_csv)
    assert list(frame["trial"]) == [0, 1]
    assert frame["erm_theta"][1] == "0.1;-0.2"
    assert frame["deviation"][0] == -0.1
    assert "wall_time" not in frame.columns
    assert timings_csv.read_text().splitlines()[0] == "trial,wall_time"


def test_concentration_rows_leave_erm_columns_empty(tmp_path):
    trials_csv, _ = write_records([TrialRecord(0, 0.3, 0.4, -0.1, 0.01)], tmp_path)
    assert trials_csv.read_text().splitlines()[1].endswith(",,,")
    assert math.isnan(read_trials(trials_csv)["eps_opt"][0])


def test_non_finite_deviation():
    with pytest.raises(DroException) as err:
        TrialRecord(3, 0.3, float("inf"), float("nan"), 0.0)
    assert err.value.diagnostics["trial"] == 3


def test_malformed_files(tmp_path):
    empty, _ = write_records([], tmp_path)
    with pytest.raises(DroException) as err:
        read_trials(empty)
    assert err.value.err_type is DroException.ExceptionType.Data

    broken = tmp_path / "broken.csv"
    broken.write_text("trial,deviation\n0,0.1\n")
    with pytest.raises(DroException):
        read_trials(broken)
    with pytest.raises(DroException):
        read_trials(tmp_path / "missing.csv")

    summary = write_summary([], tmp_path)
    assert summary.read_text().startswith("eps,side,envelope")


if __name__ == "__main__":
    pytest.main([__file__])
