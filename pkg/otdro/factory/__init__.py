from ._problem_factory import ProblemFactory
from .handlers import RunInfos
