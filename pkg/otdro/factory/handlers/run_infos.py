import json
import pathlib

from ..common import InfosMapping


class RunInfos(InfosMapping):
    def __init__(
        self,
        out_dir: pathlib.Path,
        trials_csv: pathlib.Path = None,
        summary_csv: pathlib.Path = None,
        timings_csv: pathlib.Path = None,
        log_file: pathlib.Path = None,
        passed: bool = True,
        **kwargs
    ):
        super().__init__(**kwargs)
        self.declare("out_dir", pathlib.Path(out_dir))
        self.declare("trials_csv", trials_csv)
        self.declare("summary_csv", summary_csv)
        self.declare("timings_csv", timings_csv)
        self.declare("log_file", log_file)
        self.declare("passed", passed)

    def get_out_dir(self) -> pathlib.Path:
        return self._out_dir

    def get_trials_csv(self) -> pathlib.Path:
        return self._trials_csv

    def get_summary_csv(self) -> pathlib.Path:
        return self._summary_csv

    def get_timings_csv(self) -> pathlib.Path:
        return self._timings_csv

    def get_log_file(self) -> pathlib.Path:
        return self._log_file

    def has_passed(self) -> bool:
        return self._passed

    def set_passed(self, passed: bool):
        self._passed = passed

    def serialize(self):
        return json.dumps(
            {k: str(v) if isinstance(v, pathlib.Path) else v for k, v in self.items()},
            sort_keys=True,
            indent=4,
        )

    @classmethod
    def from_dict(cls, infos):
        return RunInfos(**infos)
