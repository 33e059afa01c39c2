import logging

import pytest

from ...exceptions import DroException
from ..checks import CheckReport
from ..logging import RunLogging

_logger = logging.getLogger("otdro.utils.tests")


def test_tagged_lines(tmp_path):
    log_file = tmp_path / "logs" / "run.log"
    with RunLogging(log_file, "[trial]"):
        _logger.info("first record")
        _logger.debug("below the level")
        _logger.warning("second record")
    _logger.info("after stop")

    lines = log_file.read_text().splitlines()
    assert lines == [
        "[trial][INFO] otdro.utils.tests : first record",
        "[trial][WARNING] otdro.utils.tests : second record",
    ]


def test_stop_is_idempotent(tmp_path):
    logs = RunLogging(tmp_path / "run.log").start()
    logs.stop()
    logs.stop()
    assert not logging.getLogger("otdro").handlers


def test_check_report():
    report = CheckReport("bounds")
    assert report.record({"a": 1.0}, True)
    report.raise_on_failure()
    other = CheckReport("more")
    other.record({"a": 2.0}, False)
    report.extend(other)
    assert not report.passed
    assert list(report.to_frame()["passed"]) == [True, False]
    with pytest.raises(DroException) as err:
        report.raise_on_failure()
    assert err.value.err_type is DroException.ExceptionType.Verification
    assert err.value.diagnostics["a"] == 2.0


if __name__ == "__main__":
    pytest.main([__file__])
