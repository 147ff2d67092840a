"""Operator algebra on the two-dimensional span of two pure states.

States are pairs of complex amplitudes, density operators are unit Bloch
vectors, and measurement effects are parametrized as ``alpha * I +
beta . sigma`` with a real scalar and a real 3-vector.  All values are
immutable after construction and every operation is a pure function, so
everything here is safe for unrestricted concurrent use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidationError

# Identities that should hold to floating-point accuracy.
ATOL_EXACT = 1e-12
# Positivity / completeness of POVMs assembled through longer chains.
ATOL_PSD = 1e-10

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (PAULI_X, PAULI_Y, PAULI_Z)


def _frozen_array(values, shape, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True).reshape(shape)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized pure state with two complex amplitudes."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen_array(self.amplitudes, (2,), complex)
        object.__setattr__(self, "amplitudes", amps)
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > ATOL_EXACT:
            raise ValidationError(
                f"pure state must be normalized: |psi| = {norm!r} differs from 1 "
                f"by more than {ATOL_EXACT}"
            )

    def overlap(self, other: "PureState") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def projector(self) -> "Observable2":
        """Rank-1 effect |psi><psi| in (alpha, beta) form."""
        return Observable2(0.5, 0.5 * bloch_from_state(self))

    def to_json(self) -> list:
        return [[float(a.real), float(a.imag)] for a in self.amplitudes]

    @classmethod
    def from_json(cls, data) -> "PureState":
        return cls(np.array([complex(re, im) for re, im in data]))


def bloch_from_state(psi: PureState) -> np.ndarray:
    """Bloch vector of |psi><psi|; components are the Pauli expectations."""
    a, b = psi.amplitudes
    ab = np.conj(a) * b
    n = np.array([2.0 * ab.real, 2.0 * ab.imag, abs(a) ** 2 - abs(b) ** 2])
    n.setflags(write=False)
    return n


def state_from_bloch(n) -> PureState:
    """Pure state whose density operator has the given unit Bloch vector."""
    n = np.asarray(n, dtype=float).reshape(3)
    if abs(np.linalg.norm(n) - 1.0) > ATOL_EXACT:
        raise ValidationError("Bloch vector of a pure state must have unit norm")
    theta = math.acos(min(1.0, max(-1.0, n[2])))
    phi = math.atan2(n[1], n[0])
    return PureState(
        np.array([math.cos(theta / 2), math.sin(theta / 2) * np.exp(1j * phi)])
    )


@dataclass(frozen=True, eq=False)
class StatePair:
    """Two distinct pure states with their overlap geometry.

    The global phase of ``phi2`` is fixed so that <phi1|phi2> is real and
    nonnegative.  ``S`` is the squared fidelity and ``T = 1 - S``.  Pairs
    with fidelity 1 (indistinguishable states) are rejected.
    """

    phi1: PureState
    phi2: PureState
    fidelity: float
    S: float
    T: float

    def __post_init__(self):
        z = self.phi1.overlap(self.phi2)
        if abs(z.imag) > ATOL_EXACT or z.real < -ATOL_EXACT:
            raise ValidationError("<phi1|phi2> must be real and nonnegative")
        f = abs(z)
        if not (0.0 <= self.fidelity < 1.0):
            raise DomainError(
                "fidelity must satisfy 0 <= |<phi1|phi2>| < 1; the two states "
                "must not coincide"
            )
        if abs(f - self.fidelity) > 1e-10:
            raise ValidationError("fidelity field is inconsistent with the states")
        if abs(self.S - self.fidelity**2) > ATOL_EXACT or abs(self.S + self.T - 1.0) > ATOL_EXACT:
            raise ValidationError("S, T must equal fidelity^2 and 1 - fidelity^2")
        object.__setattr__(self, "_n1", bloch_from_state(self.phi1))
        object.__setattr__(self, "_n2", bloch_from_state(self.phi2))

    @property
    def n1(self) -> np.ndarray:
        return self._n1

    @property
    def n2(self) -> np.ndarray:
        return self._n2

    @classmethod
    def from_states(cls, phi1: PureState, phi2: PureState) -> "StatePair":
        """Build a pair from arbitrary states, fixing the phase of phi2."""
        z = phi1.overlap(phi2)
        f = abs(z)
        if f >= 1.0 - ATOL_EXACT:
            raise DomainError(
                "states are indistinguishable: |<phi1|phi2>| = 1 is excluded"
            )
        if f > 0.0:
            phi2 = PureState(phi2.amplitudes * (np.conj(z) / f))
        return cls(phi1, phi2, f, f * f, 1.0 - f * f)

    @classmethod
    def from_fidelity(cls, fidelity: float) -> "StatePair":
        """Canonical pair with Bloch vectors in the xz-plane, symmetric about z.

        n1 = (sqrt(T), 0, sqrt(S)) and n2 = (-sqrt(T), 0, sqrt(S)), so the
        bisector reflection is diag(-1, 1, 1).
        """
        if not (0.0 <= fidelity < 1.0):
            raise DomainError(
                "fidelity must satisfy 0 <= |<phi1|phi2>| < 1; the two states "
                "must not coincide"
            )
        theta = math.acos(fidelity)
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        phi1 = PureState(np.array([c, s], dtype=complex))
        phi2 = PureState(np.array([c, -s], dtype=complex))
        return cls.from_states(phi1, phi2)

    def swapped(self) -> "StatePair":
        return StatePair.from_states(self.phi2, self.phi1)


@dataclass(frozen=True, eq=False)
class Observable2:
    """Hermitian operator alpha * I + beta . sigma on the 2D subspace."""

    alpha: float
    beta: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "alpha", float(self.alpha))
        object.__setattr__(self, "beta", _frozen_array(self.beta, (3,), float))

    @property
    def beta_norm(self) -> float:
        return float(np.linalg.norm(self.beta))

    def eigenvalues(self) -> tuple:
        b = self.beta_norm
        return (self.alpha - b, self.alpha + b)

    def is_psd(self, atol: float = ATOL_PSD) -> bool:
        return self.alpha >= self.beta_norm - atol

    def rank(self, atol: float = ATOL_PSD) -> int:
        return sum(1 for ev in self.eigenvalues() if ev > atol)

    def to_json(self) -> dict:
        return {"alpha": self.alpha, "beta": [float(v) for v in self.beta]}

    @classmethod
    def from_json(cls, data) -> "Observable2":
        return cls(data["alpha"], np.asarray(data["beta"], dtype=float))

    @classmethod
    def identity(cls) -> "Observable2":
        return cls(1.0, np.zeros(3))

    @classmethod
    def zero(cls) -> "Observable2":
        return cls(0.0, np.zeros(3))


def expectation(effect: Observable2, n) -> float:
    """tr[E rho] for rho = (1 + n . sigma) / 2, i.e. alpha + beta . n."""
    n = np.asarray(n, dtype=float).reshape(3)
    return float(effect.alpha + effect.beta @ n)


def operator_matrix(effect: Observable2) -> np.ndarray:
    """Explicit 2x2 complex matrix alpha * I + sum_k beta_k sigma_k."""
    mat = effect.alpha * np.eye(2, dtype=complex)
    for bk, sigma in zip(effect.beta, PAULI):
        mat = mat + bk * sigma
    return mat


def reflection_between_bloch(n1, n2) -> np.ndarray:
    """Orthogonal reflection O with O n1 = n2 and O n2 = n1.

    O is the Householder reflection through the plane orthogonal to
    n1 - n2, so O^2 = I and det O = -1.
    """
    n1 = np.asarray(n1, dtype=float).reshape(3)
    n2 = np.asarray(n2, dtype=float).reshape(3)
    d = n1 - n2
    dn = np.linalg.norm(d)
    if dn < 1e-9:
        raise ValidationError(
            "Bloch vectors coincide; the bisector reflection is undefined"
        )
    u = d / dn
    return np.eye(3) - 2.0 * np.outer(u, u)


def reflection_about_bisector(pair: StatePair) -> np.ndarray:
    return reflection_between_bloch(pair.n1, pair.n2)


@dataclass(frozen=True, eq=False)
class Povm3:
    """Three-outcome POVM on the 2D subspace.

    Every element must be positive semidefinite and the three elements
    must sum to the identity, both within ``ATOL_PSD``.
    """

    e1: Observable2
    e2: Observable2
    e3: Observable2

    def __post_init__(self):
        for label, e in (("e1", self.e1), ("e2", self.e2), ("e3", self.e3)):
            if not e.is_psd():
                raise ValidationError(
                    f"POVM element {label} is not positive semidefinite: "
                    f"alpha = {e.alpha!r} < |beta| = {e.beta_norm!r}"
                )
        alpha_sum = self.e1.alpha + self.e2.alpha + self.e3.alpha
        beta_sum = self.e1.beta + self.e2.beta + self.e3.beta
        if abs(alpha_sum - 1.0) > ATOL_PSD or np.linalg.norm(beta_sum) > ATOL_PSD:
            raise ValidationError(
                "POVM completeness fails: elements do not sum to the identity"
            )

    @property
    def elements(self) -> tuple:
        return (self.e1, self.e2, self.e3)

    def to_json(self) -> dict:
        return {"e1": self.e1.to_json(), "e2": self.e2.to_json(), "e3": self.e3.to_json()}

    @classmethod
    def from_json(cls, data) -> "Povm3":
        return cls(
            Observable2.from_json(data["e1"]),
            Observable2.from_json(data["e2"]),
            Observable2.from_json(data["e3"]),
        )
