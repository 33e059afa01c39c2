from .run_infos import RunInfos
