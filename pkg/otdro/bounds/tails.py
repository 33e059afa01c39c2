import dataclasses
import logging
import typing
from enum import Enum
from math import exp

from ..exceptions import DroException

_logger = logging.getLogger(__name__)


class TheoremKind(Enum):
    OtValues = "ot_values"
    OtErm = "ot_erm"
    OtRegValues = "otreg_values"
    OtRegErm = "otreg_erm"

    @property
    def regularized(self):
        return self in (TheoremKind.OtRegValues, TheoremKind.OtRegErm)

    @property
    def erm(self):
        return self in (TheoremKind.OtErm, TheoremKind.OtRegErm)


@dataclasses.dataclass(frozen=True)
class TailConstants:
    """
    beta bounds the loss; c2 = (f*)'(-nu~) and the class probabilities with
    their floor p0 enter the regularized tails; delta_opt is the optimizer
    failure probability of the ERM tails.
    """

    beta: float
    c2: typing.Optional[float] = None
    class_probs: typing.Tuple[float, ...] = ()
    p0: typing.Optional[float] = None
    delta_opt: float = 0.0


@dataclasses.dataclass(frozen=True)
class TailProbability:
    value: float
    raw: float
    clamped: bool

    def __float__(self):
        return self.value


def class_tail(n, class_probs, p0):
    """sum over classes of exp(-2 n (p_y - p0)^2)"""
    return sum(exp(-2.0 * n * (p - p0) ** 2) for p in class_probs)


def _regularized_consts(consts):
    if consts.c2 is None or consts.p0 is None or not consts.class_probs:
        raise DroException(
            "Regularized tails need c2, p0 and the class probabilities",
            DroException.ExceptionType.Configuration,
        )
    if any(p <= consts.p0 for p in consts.class_probs):
        raise DroException(
            "p0 = {} must lie below every class probability {}".format(
                consts.p0, consts.class_probs
            ),
            DroException.ExceptionType.Domain,
        )


def tail_probabilities(theorem: TheoremKind, n, eps, consts: TailConstants):
    """
    Right-hand side of the concentration inequality selected by `theorem`
    at sample size n and deviation eps. Values above 1 are clamped and the
    clamp is logged.

    Returns
    -------
    TailProbability
    """
    if n < 1 or eps < 0:
        raise DroException(
            "Tails need n >= 1 and eps >= 0, got n={}, eps={}".format(n, eps),
            DroException.ExceptionType.Domain,
        )
    beta = consts.beta
    if theorem.regularized:
        _regularized_consts(consts)
        scaled = beta * consts.c2
        classes = class_tail(n, consts.class_probs, consts.p0)

    if theorem is TheoremKind.OtValues:
        raw = exp(-2.0 * eps ** 2 * n / beta ** 2)
    elif theorem is TheoremKind.OtErm:
        raw = exp(-eps ** 2 * n / (2.0 * beta ** 2)) + consts.delta_opt
    elif theorem is TheoremKind.OtRegValues:
        raw = (
            exp(-2.0 * n * eps ** 2 / beta ** 2)
            + exp(-2.0 * n * eps ** 2 / scaled ** 2)
            + classes
        )
    else:
        raw = (
            consts.delta_opt
            + 2.0 * exp(-n * eps ** 2 / (2.0 * beta ** 2))
            + 2.0 * exp(-n * eps ** 2 / (2.0 * scaled ** 2))
            + 2.0 * classes
        )

    if raw > 1.0:
        _logger.warning(
            "{} tail {:.4e} at n={}, eps={} clamped to 1".format(
                theorem.value, raw, n, eps
            )
        )
        return TailProbability(1.0, raw, True)
    return TailProbability(raw, raw, False)
