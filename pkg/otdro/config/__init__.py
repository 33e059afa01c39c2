from .config_exception import ConfigException
from .json_data import JsonData
from .sections import (
    BoundsSection,
    CostSection,
    DivergenceSection,
    ExperimentSection,
    FamilySection,
    GeneratorSection,
    InnerSection,
    PenaltySection,
    PrimalSection,
    ProblemSection,
    RunDocument,
)
from .config_builder import ConfigBuilder
