import dataclasses
import logging
import typing

import pandas as pd

from ..exceptions import DroException

_logger = logging.getLogger(__name__)


@dataclasses.dataclass
class CheckReport:
    """
    Outcome of an assertion run over many cases. Each row is a dict of the
    quantities compared; failing rows are kept as witnesses.
    """

    name: str
    rows: typing.List[dict] = dataclasses.field(default_factory=list)
    failures: typing.List[dict] = dataclasses.field(default_factory=list)

    @property
    def passed(self):
        return not self.failures

    def record(self, row: dict, ok: bool):
        row = dict(row, passed=bool(ok))
        self.rows.append(row)
        if not ok:
            self.failures.append(row)
        return ok

    def extend(self, other: "CheckReport"):
        self.rows.extend(other.rows)
        self.failures.extend(other.failures)
        return self

    def to_frame(self):
        return pd.DataFrame(self.rows)

    def raise_on_failure(self):
        if self.passed:
            return
        _logger.error(
            "{} failed on {} of {} cases".format(
                self.name, len(self.failures), len(self.rows)
            )
        )
        raise DroException(
            "{} failed on {} of {} cases".format(
                self.name, len(self.failures), len(self.rows)
            ),
            DroException.ExceptionType.Verification,
            self.failures[0],
        )
