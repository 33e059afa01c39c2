import dataclasses
import json
import logging
import typing
from math import log

from ..divergence import FDivergenceSpec, divergence_constants
from ..exceptions import DroException
from .calculator import (
    BoundConfig,
    ClassConstants,
    dn_bound,
    dn_closed_forms,
    lambda_n,
    rn_bound,
    rn_tilde_bound,
    slope_constants,
)
from .tails import TailConstants, TheoremKind, tail_probabilities

_logger = logging.getLogger(__name__)


@dataclasses.dataclass
class BoundReport:
    n: int
    eps: float
    D_n: float
    D_n_closed_form: typing.Optional[float]
    lambda_n: float
    constants: dict
    tails: typing.Dict[str, float] = dataclasses.field(default_factory=dict)
    clamped_tails: typing.List[str] = dataclasses.field(default_factory=list)
    R_n: typing.Optional[float] = None
    R_n_tilde: typing.Optional[float] = None
    C1: typing.Optional[float] = None
    C2: typing.Optional[float] = None
    verified_constants: bool = True

    def quantities(self):
        values = {"D_n": self.D_n}
        for key in ("D_n_closed_form", "R_n", "R_n_tilde", "C1", "C2"):
            if getattr(self, key) is not None:
                values[key] = getattr(self, key)
        values.update({"tail_" + k: v for k, v in self.tails.items()})
        return values

    def to_dict(self):
        values = dataclasses.asdict(self)
        values["log"] = {
            key: (log(value) if value > 0 else None)
            for key, value in self.quantities().items()
        }
        return values

    def serialize(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=4)

    def envelope(self, regularized):
        """2 D_n for the OT theorems, max(R_n, R~_n) for the regularized ones"""
        if regularized:
            return max(self.R_n, self.R_n_tilde)
        return 2.0 * self.D_n


def build_bound_report(
    fam,
    cost,
    n,
    eps,
    cfg=BoundConfig(),
    spec: typing.Optional[FDivergenceSpec] = None,
    class_probs=(),
    delta_opt=0.0,
):
    """
    Every bound of the OT theorems at (n, eps), plus those of the
    regularized theorems when a divergence is given.

    Parameters
    ----------
    fam : ObjectiveFamily
    cost : TransportCost
    n : int
    eps : float
    cfg : BoundConfig
    spec : FDivergenceSpec, optional
    class_probs : sequence of float
        Class probabilities, needed by the regularized tails
    delta_opt : float
        Optimizer failure probability entering the ERM tails

    Returns
    -------
    BoundReport
    """
    c = ClassConstants.of(fam, cost)
    constants = dataclasses.asdict(c)
    closed = dn_closed_forms(fam, cost, n) if fam.verified else None
    report = BoundReport(
        n=n,
        eps=eps,
        D_n=dn_bound(fam, cost, n, cfg),
        D_n_closed_form=closed,
        lambda_n=lambda_n(cost, n, cfg),
        constants=constants,
        verified_constants=fam.verified,
    )
    tail_consts = TailConstants(c.beta, delta_opt=delta_opt)
    theorems = [TheoremKind.OtValues, TheoremKind.OtErm]

    if spec is not None:
        consts = divergence_constants(spec, cfg.p0, cost.M)
        c1, c2 = slope_constants(fam, spec, consts)
        report.C1, report.C2 = c1, c2
        report.R_n = rn_bound(fam, cost, spec, n, cfg)
        report.R_n_tilde = rn_tilde_bound(fam, cost, spec, n, cfg, consts)
        constants.update(
            {
                "s0": consts.s0,
                "nu_tilde": consts.nu_tilde,
                "sup_c_tilde": consts.M,
                "tail_sup": consts.tail_sup,
                "p0": consts.p0,
            }
        )
        if class_probs:
            tail_consts = TailConstants(
                c.beta, c2, tuple(class_probs), cfg.p0, delta_opt
            )
            theorems += [TheoremKind.OtRegValues, TheoremKind.OtRegErm]
        else:
            _logger.info("No class probabilities given, regularized tails skipped")

    for theorem in theorems:
        tail = tail_probabilities(theorem, n, eps, tail_consts)
        report.tails[theorem.value] = tail.value
        if tail.clamped:
            report.clamped_tails.append(theorem.value)

    bad = {k: v for k, v in report.quantities().items() if not 0.0 <= v < float("inf")}
    if bad:
        raise DroException(
            "Bound report holds non-finite or negative entries",
            DroException.ExceptionType.Verification,
            bad,
        )
    _logger.info(
        "Bounds at n={}: D_n={:.4e}{}".format(
            n,
            report.D_n,
            ""
            if report.R_n is None
            else ", R_n={:.4e}, R~_n={:.4e}".format(report.R_n, report.R_n_tilde),
        )
    )
    return report
