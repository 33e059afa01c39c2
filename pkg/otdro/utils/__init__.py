from .extended_real import ExtendedReal
from .numerics import (
    GoldenResult,
    bisection_batch,
    gauss_legendre_integral,
    golden_section_maximize_batch,
    golden_section_minimize,
    substream_rng,
)
from .checks import CheckReport
