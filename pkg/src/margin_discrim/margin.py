"""Closed-form solution of two-state discrimination with an error margin.

The measurement has three outcomes: guess the first state, guess the
second, or give up ("I do not know").  The error margin ``m`` bounds
either each conditional error probability (strong condition) or the mean
error probability (weak condition).  Below the critical margin the
optimum is an amplified unambiguous measurement; above it the optimum is
the projective minimum-error measurement, whose conditional errors
already sit at the critical margin.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, RegimeError, ValidationError
from .linalg import (
    ATOL_EXACT,
    Observable2,
    Povm3,
    StatePair,
    reflection_about_bisector,
)

CONDITION_KINDS = ("strong", "weak")


@dataclass(frozen=True)
class MarginCondition:
    """Error-margin constraint: ``kind`` is "strong" or "weak", m in [0, 1]."""

    kind: str
    m: float

    def __post_init__(self):
        if self.kind not in CONDITION_KINDS:
            raise DomainError(f"condition kind must be one of {CONDITION_KINDS}")
        if not (0.0 <= self.m <= 1.0):
            raise DomainError("error margin m must lie in [0, 1]")


def _check_fidelity(fidelity: float) -> None:
    if not (0.0 <= fidelity < 1.0):
        raise DomainError(
            "fidelity must satisfy 0 <= |<phi1|phi2>| < 1; identical states "
            "cannot be discriminated"
        )


def _check_margin(m: float) -> None:
    if not (0.0 <= m <= 1.0):
        raise DomainError("error margin m must lie in [0, 1]")


def critical_margin(fidelity: float) -> float:
    """Margin above which the minimum-error measurement is already feasible."""
    _check_fidelity(fidelity)
    return 0.5 * (1.0 - math.sqrt(1.0 - fidelity * fidelity))


def amplification_factor(m: float) -> float:
    """Multiplier on the unambiguous success probability, defined for m < 1/2.

    Increases monotonically from 1 at m = 0; the closed form only ever
    evaluates it for m below the critical margin, which is < 1/2.
    """
    if not (0.0 <= m < 0.5):
        raise DomainError("amplification factor requires 0 <= m < 1/2")
    return (1.0 - m) / (1.0 - 2.0 * m) ** 2 * (1.0 + 2.0 * math.sqrt(m * (1.0 - m)))


def minimum_error_success(fidelity: float) -> float:
    """Success probability of the unconstrained (projective) optimum."""
    _check_fidelity(fidelity)
    return 0.5 * (1.0 + math.sqrt(1.0 - fidelity * fidelity))


def success_strong(fidelity: float, m: float) -> float:
    """Maximum success probability under the strong margin condition."""
    _check_fidelity(fidelity)
    _check_margin(m)
    if m >= critical_margin(fidelity):
        return minimum_error_success(fidelity)
    return amplification_factor(m) * (1.0 - fidelity)


def success_weak(fidelity: float, m: float) -> float:
    """Maximum success probability under the weak (mean-error) condition."""
    _check_fidelity(fidelity)
    _check_margin(m)
    if m >= critical_margin(fidelity):
        return minimum_error_success(fidelity)
    return (math.sqrt(m) + math.sqrt(1.0 - fidelity)) ** 2


@dataclass(frozen=True)
class ReducedParams:
    """Coordinates (alpha, x, y) of the symmetry-reduced optimization.

    The first two effects share the scalar ``alpha`` and have Bloch parts
    x * (n1+n2)/2 + y * (n1-n2)/2 and its bisector reflection.  The rank
    conditions eliminate alpha and x in favor of y:

        alpha = T y^2 + 1/4,    sqrt(S) |x| = (1 - 4 T y^2) / 4,

    which also bounds |y| by 1 / (2 sqrt(T)).
    """

    alpha: float
    x: float
    y: float
    S: float
    T: float

    def __post_init__(self):
        if abs(self.S + self.T - 1.0) > ATOL_EXACT or self.T <= 0.0:
            raise ValidationError("S and T must be nonnegative with S + T = 1, T > 0")
        if abs(self.alpha - (self.T * self.y**2 + 0.25)) > ATOL_EXACT:
            raise ValidationError("alpha must equal T y^2 + 1/4")
        lhs = math.sqrt(self.S) * abs(self.x)
        rhs = 0.25 * (1.0 - 4.0 * self.T * self.y**2)
        if abs(lhs - rhs) > ATOL_EXACT:
            raise ValidationError("sqrt(S)|x| must equal (1 - 4 T y^2)/4")
        if abs(self.y) > 1.0 / (2.0 * math.sqrt(self.T)) + ATOL_EXACT:
            raise ValidationError("|y| must not exceed 1/(2 sqrt(T))")

    def objective(self) -> float:
        """Success probability alpha + S x + T y of these parameters."""
        return self.alpha + self.S * self.x + self.T * self.y


def _reduced_from_y(y: float, S: float, T: float) -> ReducedParams:
    sqrt_s = math.sqrt(S)
    quarter = 0.25 * (1.0 - 4.0 * T * y * y)
    # For orthogonal states (S = 0) the x coordinate drops out entirely.
    x = 0.0 if sqrt_s < 1e-14 else -quarter / sqrt_s
    return ReducedParams(T * y * y + 0.25, x, y, S, T)


def _check_reduced_regime(S: float, T: float, m: float) -> None:
    if abs(S + T - 1.0) > ATOL_EXACT or not (0.0 <= S < 1.0):
        raise DomainError("S and T must satisfy S + T = 1 with 0 <= S < 1")
    _check_margin(m)
    mc = critical_margin(math.sqrt(S))
    if m > mc + ATOL_EXACT:
        raise RegimeError(
            f"margin m = {m!r} exceeds the critical margin {mc!r}; the "
            "minimum-error measurement is optimal there"
        )


def reduced_params_strong(S: float, T: float, m: float) -> ReducedParams:
    """Optimal reduced coordinates under the strong condition, m <= m_c.

    y sits at the larger root of the active margin constraint; x is
    negative (the positive-x branch is infeasible below m_c).
    """
    _check_reduced_regime(S, T, m)
    y = (1.0 + 2.0 * math.sqrt(m * (1.0 - m))) / (2.0 * (1.0 + math.sqrt(S)) * (1.0 - 2.0 * m))
    return _reduced_from_y(min(y, 1.0 / (2.0 * math.sqrt(T))), S, T)


def reduced_params_weak(S: float, T: float, m: float) -> ReducedParams:
    """Optimal reduced coordinates under the weak condition, m <= m_c."""
    _check_reduced_regime(S, T, m)
    sqrt_s = math.sqrt(S)
    y = (1.0 + 2.0 * math.sqrt(m / (1.0 - sqrt_s))) / (2.0 * (1.0 + sqrt_s))
    return _reduced_from_y(min(y, 1.0 / (2.0 * math.sqrt(T))), S, T)


def build_povm(pair: StatePair, rp: ReducedParams) -> Povm3:
    """Assemble the explicit three-outcome POVM from reduced coordinates.

    The first two elements are rank <= 1 by the parametrization; the
    inconclusive element is rank <= 1 as well because the completeness
    constraint is saturated.
    """
    if abs(rp.S - pair.S) > 1e-10:
        raise ValidationError("reduced parameters were computed for a different overlap")
    half_sum = 0.5 * (pair.n1 + pair.n2)
    half_diff = 0.5 * (pair.n1 - pair.n2)
    beta1 = rp.x * half_sum + rp.y * half_diff
    beta2 = reflection_about_bisector(pair) @ beta1
    e1 = Observable2(rp.alpha, beta1)
    e2 = Observable2(rp.alpha, beta2)
    e3 = Observable2(1.0 - 2.0 * rp.alpha, -(beta1 + beta2))
    return Povm3(e1, e2, e3)


def helstrom_povm(pair: StatePair) -> Povm3:
    """Projective minimum-error measurement; the inconclusive effect is zero."""
    d = pair.n1 - pair.n2
    u = d / np.linalg.norm(d)
    return Povm3(
        Observable2(0.5, 0.5 * u),
        Observable2(0.5, -0.5 * u),
        Observable2.zero(),
    )


def optimal_povm(pair: StatePair, cond: MarginCondition) -> Povm3:
    """Optimal POVM for the given margin condition.

    At and above the critical margin this is the minimum-error projective
    measurement (the two branches agree in value at the crossover).
    """
    if cond.m >= critical_margin(pair.fidelity):
        return helstrom_povm(pair)
    if cond.kind == "strong":
        rp = reduced_params_strong(pair.S, pair.T, cond.m)
    else:
        rp = reduced_params_weak(pair.S, pair.T, cond.m)
    return build_povm(pair, rp)


def success_probability(fidelity: float, cond: MarginCondition) -> float:
    """Closed-form optimum for either condition kind."""
    if cond.kind == "strong":
        return success_strong(fidelity, cond.m)
    return success_weak(fidelity, cond.m)
