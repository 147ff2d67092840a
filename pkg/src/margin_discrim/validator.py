"""Independent recomputation of all probability functionals from a POVM.

Everything is derived directly from joint outcome probabilities
(1/2) tr[E_mu rho_a] with equal priors, so this module is the ground
truth against which closed forms, oracles, and simulations are checked.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ValidationError
from .linalg import Observable2, Povm3, StatePair, expectation
from .margin import MarginCondition

# Conditioning probabilities below this are treated as zero weight.
ZERO_WEIGHT = 1e-14

FEASIBILITY_TOL = 1e-9


@dataclass(frozen=True)
class DiscriminationReport:
    """Success, error, and inconclusive probabilities of one measurement.

    ``p_error_given_1`` is the probability that the input was the second
    state when the first was announced, and vice versa; both are defined
    as 0 when the announcing outcome has zero weight, where the margin
    constraint is vacuous.
    """

    p_success: float
    p_error_given_1: float
    p_error_given_2: float
    p_mean_error: float
    p_inconclusive: float
    psd_ok: bool
    complete_ok: bool
    ranks: tuple

    def __post_init__(self):
        total = self.p_success + self.p_mean_error + self.p_inconclusive
        if abs(total - 1.0) > 1e-10:
            raise ValidationError("success, mean-error and inconclusive must sum to 1")
        for name in ("p_success", "p_error_given_1", "p_error_given_2",
                     "p_mean_error", "p_inconclusive"):
            value = getattr(self, name)
            if not -1e-10 <= value <= 1.0 + 1e-10:
                raise ValidationError(f"{name} = {value!r} lies outside [0, 1]")

    def to_json(self) -> dict:
        return {
            "p_success": self.p_success,
            "p_error_given_1": self.p_error_given_1,
            "p_error_given_2": self.p_error_given_2,
            "p_mean_error": self.p_mean_error,
            "p_inconclusive": self.p_inconclusive,
            "psd_ok": self.psd_ok,
            "complete_ok": self.complete_ok,
            "ranks": list(self.ranks),
        }


def joint_probability(effect: Observable2, state_index: int, pair: StatePair) -> float:
    """Joint probability of drawing state ``state_index`` and firing ``effect``."""
    if not effect.is_psd():
        raise ValidationError("effect is not positive semidefinite")
    if state_index not in (1, 2):
        raise ValidationError("state_index must be 1 or 2")
    n = pair.n1 if state_index == 1 else pair.n2
    return 0.5 * expectation(effect, n)


def evaluate(povm: Povm3, pair: StatePair) -> DiscriminationReport:
    """Full probability breakdown of ``povm`` on the state pair."""
    joints = [
        (joint_probability(e, 1, pair), joint_probability(e, 2, pair))
        for e in povm.elements
    ]
    p_success = joints[0][0] + joints[1][1]
    p_mean_error = joints[0][1] + joints[1][0]
    p_inconclusive = joints[2][0] + joints[2][1]

    weight_1 = joints[0][0] + joints[0][1]
    weight_2 = joints[1][0] + joints[1][1]
    p_err_1 = joints[0][1] / weight_1 if weight_1 > ZERO_WEIGHT else 0.0
    p_err_2 = joints[1][0] / weight_2 if weight_2 > ZERO_WEIGHT else 0.0

    return DiscriminationReport(
        p_success=p_success,
        p_error_given_1=p_err_1,
        p_error_given_2=p_err_2,
        p_mean_error=p_mean_error,
        p_inconclusive=p_inconclusive,
        psd_ok=all(e.is_psd() for e in povm.elements),
        complete_ok=True,
        ranks=tuple(e.rank() for e in povm.elements),
    )


def check_margin(report: DiscriminationReport, cond: MarginCondition) -> float:
    """Slack of the margin condition; feasible iff slack >= -FEASIBILITY_TOL."""
    if cond.kind == "strong":
        return cond.m - max(report.p_error_given_1, report.p_error_given_2)
    return cond.m - report.p_mean_error


def margin_feasible(report: DiscriminationReport, cond: MarginCondition) -> bool:
    return check_margin(report, cond) >= -FEASIBILITY_TOL
