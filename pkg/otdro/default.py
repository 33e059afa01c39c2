import pathlib
import typing

LAMBDA_BRACKET_LO: typing.Final[float] = 1e-3
LAMBDA_BRACKET_HI: typing.Final[float] = 1e3
LAMBDA_BRACKET_GROWTH: typing.Final[float] = 4.0
LAMBDA_FLOOR: typing.Final[float] = 1e-8
LAMBDA_CEILING: typing.Final[float] = 1e12

OUTER_TOLERANCE: typing.Final[float] = 1e-9
NU_TOLERANCE: typing.Final[float] = 1e-11
RADIAL_TOLERANCE: typing.Final[float] = 1e-12
GOLDEN_MAX_ITERATIONS: typing.Final[int] = 500

BISECTION_ITERATIONS: typing.Final[int] = 200
BISECTION_RELATIVE_TOLERANCE: typing.Final[float] = 1e-10

LP_TOLERANCE: typing.Final[float] = 1e-9

PRIMAL_MAX_ITERATIONS: typing.Final[int] = 500
PRIMAL_TOLERANCE: typing.Final[float] = 1e-12
PRIMAL_STEP_SIZE: typing.Final[float] = 0.05
PRIMAL_BISECTION_STEPS: typing.Final[int] = 200
PRIMAL_MASS_FLOOR: typing.Final[float] = 1e-300

QUADRATURE_POINTS: typing.Final[int] = 2048
QUADRATURE_PANEL_ORDER: typing.Final[int] = 16

ALPHA_MAX: typing.Final[float] = 64.0

INNER_RESTARTS: typing.Final[int] = 8
INNER_STEPS: typing.Final[int] = 200
INNER_STEP_SIZE: typing.Final[float] = 0.1
INNER_GRID_POINTS: typing.Final[int] = 257
INNER_TOLERANCE: typing.Final[float] = 1e-6

CHECK_SLACK: typing.Final[float] = 1e-7

SEED: typing.Final[int] = 20240611
OUTPUT_PATH: typing.Final[pathlib.Path] = pathlib.Path("results")
LOG_NAME: typing.Final[str] = "run.log"
