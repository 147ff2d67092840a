"""One-way LOCC realization of rank-1 three-outcome POVMs on a 2D subspace.

Any three-element POVM of a two-dimensional subspace V of a bipartite
space whose elements all have rank at most 1 can be read as the optimal
unambiguous measurement of a fictitious two-state problem, and that
measurement can be carried out by Alice measuring first (with an
ancilla) and Bob finishing conditioned on her outcome.  The chain here
is constructive: identify the POVM, search numerically for the
ancilla-assisted decomposition of the two problem states over an
orthonormal Alice basis, assemble the local POVM, and verify that it
compresses back to the global one on V.

Bipartite states are d_A x d_B complex matrices with unit Frobenius
norm; operators on the full space act on the row-major flattening.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import (
    DecompositionSearchError,
    DomainError,
    NotRepresentableError,
    RegimeError,
    ValidationError,
)
from .linalg import StatePair, PureState, operator_matrix
from .margin import MarginCondition, optimal_povm
from .validator import DiscriminationReport

RANK_TOL = 1e-9
PERP_TOL = 1e-12
ACCEPT_TOL = 1e-9
WEIGHT_TOL = 1e-12

DEFAULT_BUDGET = 40000
DEFAULT_ANCILLA = 2


def _as_state_matrix(phi) -> np.ndarray:
    mat = np.asarray(phi, dtype=complex)
    if mat.ndim != 2:
        raise ValidationError("bipartite state must be a 2D amplitude matrix")
    if abs(np.linalg.norm(mat) - 1.0) > 1e-12:
        raise ValidationError("bipartite state must have unit Frobenius norm")
    return mat


def _fix_pair_phase(phi1: np.ndarray, phi2: np.ndarray):
    """Rotate phi2's global phase so the overlap is real and nonnegative."""
    z = complex(np.vdot(phi1, phi2))
    if abs(z) > 0:
        phi2 = phi2 * (np.conj(z) / abs(z))
    return phi1, phi2, abs(z)


def _orth_in_span(anchor: np.ndarray, other: np.ndarray) -> np.ndarray:
    """Unit vector in span{anchor, other} orthogonal to anchor.

    The phase is fixed so the overlap with ``other`` is real positive,
    which is the unique-up-to-phase freedom of the construction.
    """
    residual = other - np.vdot(anchor, other) * anchor
    norm = np.linalg.norm(residual)
    if norm < PERP_TOL:
        raise ValidationError("states are parallel; no orthogonal direction in span")
    return residual / norm


def global_unambiguous_povm(phi1, phi2, s: float, t: float):
    """Optimal unambiguous-discrimination POVM on the span of two states.

    ``phi1`` occurs with prior ``s`` and ``phi2`` with prior ``t``.  Valid
    in the regime sqrt(s/t), sqrt(t/s) >= overlap, where each conclusive
    effect is a weighted projector onto the direction orthogonal to the
    opposite state; outside it a conclusive effect would need negative
    weight.  Returns (E1, E2, E3) as full-space matrices.
    """
    m1 = _as_state_matrix(phi1)
    m2 = _as_state_matrix(phi2)
    if not (s > 0 and t > 0 and abs(s + t - 1.0) <= 1e-10):
        raise DomainError("priors must be positive and sum to 1")
    v1, v2, g = _fix_pair_phase(m1.reshape(-1), m2.reshape(-1))
    if g >= 1.0 - PERP_TOL:
        raise DomainError("states are indistinguishable: overlap 1 is excluded")
    r = math.sqrt(t / s)
    if r < g - 1e-12 or 1.0 / r < g - 1e-12:
        raise RegimeError(
            "priors too lopsided for unambiguous effects: require "
            "sqrt(s/t) and sqrt(t/s) >= overlap"
        )
    perp2 = _orth_in_span(v2, v1)  # orthogonal to phi2, detects phi1
    perp1 = _orth_in_span(v1, v2)  # orthogonal to phi1, detects phi2
    denom = 1.0 - g * g
    a1 = max(0.0, (1.0 - r * g) / denom)
    a2 = max(0.0, (1.0 - g / r) / denom)
    e1 = a1 * np.outer(perp2, perp2.conj())
    e2 = a2 * np.outer(perp1, perp1.conj())
    projector = np.outer(v1, v1.conj()) + np.outer(perp1, perp1.conj())
    e3 = projector - e1 - e2
    return e1, e2, e3


def _top_rank1(effect: np.ndarray):
    """(weight, direction) of a PSD matrix certified to have rank <= 1."""
    effect = np.asarray(effect, dtype=complex)
    if np.linalg.norm(effect - effect.conj().T) > 1e-10:
        raise ValidationError("POVM element is not Hermitian")
    evals, evecs = np.linalg.eigh(effect)
    if evals[0] < -RANK_TOL:
        raise ValidationError("POVM element is not positive semidefinite")
    if effect.shape[0] >= 2 and evals[-2] > RANK_TOL:
        raise NotRepresentableError(
            f"POVM element has rank > 1 (second eigenvalue {evals[-2]:.3e})"
        )
    return float(evals[-1]), evecs[:, -1]


@dataclass(frozen=True, eq=False)
class UnambiguousProblem:
    """Two-state unambiguous-discrimination problem matching a rank-1 POVM.

    The measurement detects ``psi2_perp`` (prior ``s``) against
    ``psi1_perp`` (prior ``t``); ``r = sqrt(t/s)`` and both r and 1/r
    dominate the overlap of the problem states.
    """

    psi1_perp: np.ndarray
    psi2_perp: np.ndarray
    s: float
    t: float
    r: float
    overlap: float
    b1: float
    b2: float

    def __post_init__(self):
        if abs(self.s + self.t - 1.0) > 1e-10 or self.s <= 0 or self.t <= 0:
            raise ValidationError("priors must be positive and sum to 1")
        if abs(self.r - math.sqrt(self.t / self.s)) > 1e-9:
            raise ValidationError("r must equal sqrt(t/s)")
        if self.r < self.overlap - 1e-9 or 1.0 / self.r < self.overlap - 1e-9:
            raise ValidationError("r and 1/r must dominate the state overlap")


def povm_to_unambiguous(povm) -> UnambiguousProblem:
    """Identify a rank-1 POVM triple on V with an unambiguous problem.

    Requires every element of rank <= 1 and the greater eigenvalue of
    E1 + E2 equal to 1 (equivalently, the inconclusive effect has rank
    <= 1 on V).  With orthogonal conclusive directions the prior ratio is
    unidentifiable and the symmetric choice s = t = 1/2 is returned.
    """
    e1, e2, e3 = (np.asarray(e, dtype=complex) for e in povm)
    b1, psi1 = _top_rank1(e1)
    b2, psi2 = _top_rank1(e2)
    _top_rank1(e3)
    if b1 < 1e-10 or b2 < 1e-10:
        raise NotRepresentableError(
            "a conclusive effect vanishes; the prior identification is "
            "underdetermined"
        )
    q = abs(np.vdot(psi1, psi2))
    if q >= 1.0 - PERP_TOL:
        raise NotRepresentableError("conclusive effects are parallel")

    top = np.linalg.eigvalsh(e1 + e2)[-1]
    if abs(top - 1.0) > 1e-9:
        raise NotRepresentableError(
            f"greater eigenvalue of E1 + E2 is {top!r}, expected 1"
        )

    if q < 1e-9:
        if abs(b1 - 1.0) > 1e-8 or abs(b2 - 1.0) > 1e-8:
            raise NotRepresentableError(
                "orthogonal conclusive effects with non-unit weights do not "
                "arise from an unambiguous optimum"
            )
        r = 1.0
        q = 0.0
    else:
        r = (1.0 - b1 * (1.0 - q * q)) / q
        b2_implied = (1.0 - q / r) / (1.0 - q * q) if r > 0 else np.inf
        if r <= 0 or abs(b2_implied - b2) > 1e-8:
            raise NotRepresentableError(
                "effect weights are inconsistent with a common prior ratio"
            )

    s = 1.0 / (1.0 + r * r)
    t = 1.0 - s
    psi2_perp = _orth_in_span(psi2, psi1)
    psi1_perp = _orth_in_span(psi1, psi2)
    # Phase the problem states so their mutual overlap is real nonnegative.
    z = complex(np.vdot(psi2_perp, psi1_perp))
    if abs(z) > 0:
        psi1_perp = psi1_perp * (np.conj(z) / abs(z))
    return UnambiguousProblem(
        psi1_perp=psi1_perp,
        psi2_perp=psi2_perp,
        s=s,
        t=t,
        r=r,
        overlap=q,
        b1=b1,
        b2=b2,
    )


@dataclass(frozen=True, eq=False)
class AliceDecomposition:
    """Ancilla-assisted rewriting of two bipartite states over an Alice basis.

    ``alice_states`` are orthonormal vectors of the ancilla + Alice space;
    conditioned on outcome I the (unnormalized) Bob remainders of the two
    states are sqrt(weights_s[I]) * bob_eta[I] and sqrt(weights_t[I]) *
    bob_gamma[I], with every branch overlap real, nonnegative, and
    dominated by the branch prior ratios.
    """

    alice_states: list
    weights_s: np.ndarray
    weights_t: np.ndarray
    bob_eta: list
    bob_gamma: list
    s: float
    t: float
    ancilla_dim: int
    d_alice: int
    d_bob: int

    @property
    def branches(self) -> int:
        return len(self.alice_states)

    def branch_overlaps(self) -> np.ndarray:
        return np.array(
            [complex(np.vdot(eta, gamma)) for eta, gamma in zip(self.bob_eta, self.bob_gamma)]
        )

    def violations(self) -> dict:
        """Largest violation of each invariant family, for acceptance checks.

        Branch inequalities are checked in the weight-multiplied form
        sqrt(s_I t_I) c_I <= s_I / r and <= r t_I, which stays defined
        when a branch weight vanishes.
        """
        r = math.sqrt(self.t / self.s)
        w = np.sqrt(self.weights_s * self.weights_t) * self.branch_overlaps()
        imag = float(np.max(np.abs(w.imag))) if len(w) else 0.0
        neg = float(np.max(np.maximum(0.0, -w.real))) if len(w) else 0.0
        ineq1 = float(np.max(np.maximum(0.0, w.real - self.weights_s / r)))
        ineq2 = float(np.max(np.maximum(0.0, w.real - r * self.weights_t)))
        sums = max(abs(self.weights_s.sum() - 1.0), abs(self.weights_t.sum() - 1.0))
        return {
            "imag_overlap": imag,
            "negative_overlap": neg,
            "branch_ratio_1": ineq1,
            "branch_ratio_2": ineq2,
            "weight_sums": float(sums),
        }

    def max_violation(self) -> float:
        return max(self.violations().values())


def _hermitian_from_params(theta: np.ndarray, dim: int) -> np.ndarray:
    herm = np.zeros((dim, dim), dtype=complex)
    herm[np.diag_indices(dim)] = theta[:dim]
    k = dim
    for i in range(dim):
        for j in range(i + 1, dim):
            herm[i, j] = theta[k] + 1j * theta[k + 1]
            herm[j, i] = theta[k] - 1j * theta[k + 1]
            k += 2
    return herm


def _cayley_unitary(theta: np.ndarray, dim: int) -> np.ndarray:
    """Unitary (I - iK)^-1 (I + iK) for the Hermitian K built from theta."""
    herm = _hermitian_from_params(theta, dim)
    eye = np.eye(dim, dtype=complex)
    return np.linalg.solve(eye - 1j * herm, eye + 1j * herm)


def _branch_diagnostics(basis: np.ndarray, m1: np.ndarray, m2: np.ndarray):
    """Per-branch weights and cross moments for an Alice basis (columns)."""
    a1 = basis.conj().T @ m1
    a2 = basis.conj().T @ m2
    s_vec = np.einsum("ik,ik->i", a1, a1.conj()).real
    t_vec = np.einsum("ik,ik->i", a2, a2.conj()).real
    w_vec = np.einsum("ik,ik->i", a1, a2.conj())
    return s_vec, t_vec, w_vec


def _search_residual(s_vec, t_vec, w_vec, r, slack=0.0):
    """Squared residual of the decomposition conditions.

    ``slack`` pushes the inequalities strictly inside so the exact
    imaginary-part polish afterwards cannot tip them back out; it scales
    with the branch weight so genuinely degenerate branches stay legal.
    """
    res = float(np.sum(w_vec.imag ** 2))
    res += float(np.sum(np.maximum(0.0, -w_vec.real) ** 2))
    bound1 = s_vec / r - slack * s_vec
    bound2 = r * t_vec - slack * t_vec
    res += float(np.sum(np.maximum(0.0, w_vec.real - bound1) ** 2))
    res += float(np.sum(np.maximum(0.0, w_vec.real - bound2) ** 2))
    return res


def _polish_imag(basis: np.ndarray, weighted: np.ndarray) -> np.ndarray:
    """Zero the imaginary parts of diag(U^dag W U) by exact plane rotations.

    The diagonal imaginary parts sum to Im tr(W) = 0, so entries of
    opposite sign can be paired and one of each pair annihilated by a
    real rotation in their plane; the required tangent solves a
    quadratic.  Each step strictly shrinks the total imaginary mass.
    """
    basis = basis.copy()
    dim = basis.shape[1]
    for _ in range(6 * dim):
        cross = basis.conj().T @ weighted @ basis
        diag_im = cross.diagonal().imag
        i = int(np.argmax(np.abs(diag_im)))
        if abs(diag_im[i]) < 5e-15:
            break
        opposing = np.where(np.sign(diag_im) == -np.sign(diag_im[i]))[0]
        if len(opposing) == 0:
            break
        j = opposing[int(np.argmax(np.abs(diag_im[opposing])))]
        im_a, im_d = diag_im[i], diag_im[j]
        im_b = (cross[i, j] + cross[j, i]).imag
        if abs(im_d) > 1e-300:
            disc = im_b * im_b - 4.0 * im_a * im_d
            if disc < 0:
                break
            root = math.sqrt(disc)
            cands = [(-im_b + root) / (2.0 * im_d), (-im_b - root) / (2.0 * im_d)]
            tan = min(cands, key=abs)
        elif abs(im_b) > 1e-300:
            tan = -im_a / im_b
        else:
            break
        c = 1.0 / math.sqrt(1.0 + tan * tan)
        s = tan * c
        col_i = basis[:, i].copy()
        col_j = basis[:, j].copy()
        basis[:, i] = c * col_i + s * col_j
        basis[:, j] = -s * col_i + c * col_j
    return basis


def find_alice_decomposition(
    phi1,
    phi2,
    s: float,
    t: float,
    ancilla_dim: int = DEFAULT_ANCILLA,
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
) -> AliceDecomposition:
    """Search for an Alice basis realizing the two-state decomposition.

    Parametrizes the orthonormal basis of the ancilla + Alice space by a
    unitary, minimizes the squared violation of the branch conditions
    with seeded multi-start downhill simplex, then cancels the remaining
    imaginary parts exactly with plane rotations.  A candidate is
    accepted only when every invariant holds within ``ACCEPT_TOL``; the
    search itself is never trusted.

    Raises ``DecompositionSearchError`` with the best violation
    magnitudes if the budget is exhausted first.
    """
    m1 = _as_state_matrix(phi1)
    m2 = _as_state_matrix(phi2)
    if m1.shape != m2.shape:
        raise ValidationError("the two states must share the same local dimensions")
    overlap = complex(np.vdot(m1, m2))
    if abs(overlap.imag) > 1e-9 or overlap.real < -1e-9:
        raise ValidationError("states must be phased so their overlap is nonnegative")
    g = abs(overlap)
    if not (s > 0 and t > 0 and abs(s + t - 1.0) <= 1e-10):
        raise DomainError("priors must be positive and sum to 1")
    r = math.sqrt(t / s)
    if r < g - 1e-12 or 1.0 / r < g - 1e-12:
        raise RegimeError("require sqrt(s/t) and sqrt(t/s) >= overlap")
    if ancilla_dim < 1:
        raise DomainError("ancilla dimension must be at least 1")

    d_alice, d_bob = m1.shape
    dim = ancilla_dim * d_alice
    big1 = np.zeros((dim, d_bob), dtype=complex)
    big2 = np.zeros((dim, d_bob), dtype=complex)
    big1[:d_alice] = m1
    big2[:d_alice] = m2
    weighted = big1 @ big2.conj().T

    n_params = dim * dim
    herm_w = 0.5 * (weighted + weighted.conj().T)
    eig_basis = np.linalg.eigh(herm_w)[1]

    rng_children = np.random.SeedSequence(seed).spawn(6)
    base_unitaries = [np.eye(dim, dtype=complex), eig_basis]
    for child in rng_children:
        gen = np.random.default_rng(child)
        z = gen.normal(size=(dim, dim)) + 1j * gen.normal(size=(dim, dim))
        q, rr = np.linalg.qr(z)
        base_unitaries.append(q * (np.diagonal(rr) / np.abs(np.diagonal(rr))).conj())

    per_start = max(500, budget // len(base_unitaries))

    def attempt(basis):
        polished = _polish_imag(basis, weighted)
        s_vec, t_vec, w_vec = _branch_diagnostics(polished, big1, big2)
        worst = max(
            float(np.max(np.abs(w_vec.imag))),
            float(np.max(np.maximum(0.0, -w_vec.real))),
            float(np.max(np.maximum(0.0, w_vec.real - s_vec / r))),
            float(np.max(np.maximum(0.0, w_vec.real - r * t_vec))),
        )
        return polished, worst

    def run_start(u0):
        polished, worst = attempt(u0)

        def objective(theta):
            basis = u0 @ _cayley_unitary(theta, dim)
            s_vec, t_vec, w_vec = _branch_diagnostics(basis, big1, big2)
            return _search_residual(s_vec, t_vec, w_vec, r, slack=1e-6)

        x0 = np.zeros(n_params)
        simplex = np.vstack([x0] + [x0 + 0.3 * np.eye(n_params)[i] for i in range(n_params)])
        res = minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options={
                "maxfev": per_start,
                "xatol": 1e-12,
                "fatol": 1e-18,
                "adaptive": True,
                "initial_simplex": simplex,
            },
        )
        candidate = u0 @ _cayley_unitary(res.x, dim)
        cand_polished, cand_worst = attempt(candidate)
        if cand_worst < worst:
            return cand_polished, cand_worst
        return polished, worst

    best_violation = math.inf
    best_report = None
    # Cheap pass first: a base basis may already work after the exact
    # imaginary-part cleanup (product-like instances always do).
    for u0 in base_unitaries:
        polished, worst = attempt(u0)
        if worst <= ACCEPT_TOL:
            return _assemble_decomposition(
                polished, big1, big2, s, t, ancilla_dim, d_alice, d_bob
            )
        if worst < best_violation:
            best_violation, best_report = worst, polished

    for u0 in base_unitaries:
        polished, worst = run_start(u0)
        if worst <= ACCEPT_TOL:
            return _assemble_decomposition(
                polished, big1, big2, s, t, ancilla_dim, d_alice, d_bob
            )
        if worst < best_violation:
            best_violation, best_report = worst, polished

    s_vec, t_vec, w_vec = _branch_diagnostics(best_report, big1, big2)
    raise DecompositionSearchError(
        f"decomposition search exhausted budget {budget} with worst "
        f"violation {best_violation:.3e}",
        violations={
            "imag_overlap": float(np.max(np.abs(w_vec.imag))),
            "negative_overlap": float(np.max(np.maximum(0.0, -w_vec.real))),
            "branch_ratio_1": float(np.max(np.maximum(0.0, w_vec.real - s_vec / r))),
            "branch_ratio_2": float(np.max(np.maximum(0.0, w_vec.real - r * t_vec))),
        },
    )


def _assemble_decomposition(basis, big1, big2, s, t, ancilla_dim, d_alice, d_bob):
    rows1 = basis.conj().T @ big1
    rows2 = basis.conj().T @ big2
    weights_s = np.einsum("ik,ik->i", rows1, rows1.conj()).real.clip(min=0.0)
    weights_t = np.einsum("ik,ik->i", rows2, rows2.conj()).real.clip(min=0.0)
    eta = []
    gamma = []
    fallback = np.zeros(d_bob, dtype=complex)
    fallback[0] = 1.0
    for i in range(basis.shape[1]):
        g_i = rows2[i] / math.sqrt(weights_t[i]) if weights_t[i] > WEIGHT_TOL else None
        e_i = rows1[i] / math.sqrt(weights_s[i]) if weights_s[i] > WEIGHT_TOL else None
        if e_i is None and g_i is None:
            e_i = g_i = fallback
        elif e_i is None:
            e_i = g_i
        elif g_i is None:
            g_i = e_i
        eta.append(e_i)
        gamma.append(g_i)
    return AliceDecomposition(
        alice_states=[basis[:, i].copy() for i in range(basis.shape[1])],
        weights_s=weights_s,
        weights_t=weights_t,
        bob_eta=eta,
        bob_gamma=gamma,
        s=float(s),
        t=float(t),
        ancilla_dim=ancilla_dim,
        d_alice=d_alice,
        d_bob=d_bob,
    )


@dataclass(frozen=True, eq=False)
class LoccPovm:
    """One-way LOCC POVM: Alice effects with Bob POVMs per outcome."""

    alice_effects: list
    bob_effects: list  # one (e1, e2, e3) triple per Alice outcome
    d_alice: int
    d_bob: int

    def elements(self):
        """The three global effects sum_I alice_I (x) bob_mu(I)."""
        dim = self.d_alice * self.d_bob
        out = [np.zeros((dim, dim), dtype=complex) for _ in range(3)]
        for alice, bob_triple in zip(self.alice_effects, self.bob_effects):
            for mu in range(3):
                out[mu] += np.kron(alice, bob_triple[mu])
        return out


def build_locc_povm(dec: AliceDecomposition, s: float, t: float) -> LoccPovm:
    """Assemble the conditional POVM from an accepted decomposition.

    Bob's conclusive effects on branch I are weighted projectors onto the
    directions orthogonal to the opposite conditional state; his
    inconclusive effect absorbs the rest of his identity, so the three
    always sum to the identity on Bob's full space.  Branches where a
    weight vanishes or the conditional states coincide degenerate to the
    certain announcement or to a pure give-up, respectively.
    """
    if dec.max_violation() > 1e-8:
        raise ValidationError("decomposition violates its invariants")
    r = math.sqrt(t / s)
    eye_b = np.eye(dec.d_bob, dtype=complex)
    alice_effects = []
    bob_effects = []
    for i in range(dec.branches):
        top_block = dec.alice_states[i][: dec.d_alice]
        alice_effects.append(np.outer(top_block, top_block.conj()))

        s_i = dec.weights_s[i]
        t_i = dec.weights_t[i]
        eta = dec.bob_eta[i]
        gamma = dec.bob_gamma[i]
        if s_i <= WEIGHT_TOL and t_i <= WEIGHT_TOL:
            bob_effects.append((np.zeros_like(eye_b), np.zeros_like(eye_b), eye_b.copy()))
            continue
        if s_i <= WEIGHT_TOL:
            e2 = np.outer(gamma, gamma.conj())
            bob_effects.append((np.zeros_like(eye_b), e2, eye_b - e2))
            continue
        if t_i <= WEIGHT_TOL:
            e1 = np.outer(eta, eta.conj())
            bob_effects.append((e1, np.zeros_like(eye_b), eye_b - e1))
            continue

        c = complex(np.vdot(eta, gamma))
        if abs(c.imag) > 1e-8 or c.real < -1e-8:
            raise ValidationError("branch overlap must be real and nonnegative")
        c_r = min(max(c.real, 0.0), 1.0)
        if c_r >= 1.0 - PERP_TOL:
            # The branch states coincide: no information, Bob gives up.
            bob_effects.append((np.zeros_like(eye_b), np.zeros_like(eye_b), eye_b.copy()))
            continue
        r_i = r * math.sqrt(t_i / s_i)
        denom = 1.0 - c_r * c_r
        k1 = (1.0 - r_i * c_r) / denom
        k2 = (1.0 - c_r / r_i) / denom
        if k1 < -1e-9 or k2 < -1e-9:
            raise ValidationError("branch prior ratio falls outside the regime")
        k1, k2 = max(k1, 0.0), max(k2, 0.0)
        gamma_perp = _orth_in_span(gamma, eta)
        eta_perp = _orth_in_span(eta, gamma)
        e1 = k1 * np.outer(gamma_perp, gamma_perp.conj())
        e2 = k2 * np.outer(eta_perp, eta_perp.conj())
        bob_effects.append((e1, e2, eye_b - e1 - e2))
    return LoccPovm(
        alice_effects=alice_effects,
        bob_effects=bob_effects,
        d_alice=dec.d_alice,
        d_bob=dec.d_bob,
    )


def verify_compression(global_povm, locc: LoccPovm, v_basis) -> float:
    """Largest matrix-element deviation of the LOCC POVM on the subspace.

    Returns max over the three effects and over the 2x2 grid of subspace
    matrix elements of |<v_i| E_mu - E_mu_locc |v_j>|; the local protocol
    reproduces the global measurement on V exactly when this vanishes.
    """
    locc_elements = locc.elements()
    v1, v2 = (np.asarray(v, dtype=complex).reshape(-1) for v in v_basis)
    worst = 0.0
    for e_global, e_locc in zip(global_povm, locc_elements):
        diff = np.asarray(e_global, dtype=complex) - e_locc
        for left in (v1, v2):
            for right in (v1, v2):
                worst = max(worst, abs(complex(left.conj() @ diff @ right)))
    return worst


def evaluate_full(effects, phi1, phi2) -> DiscriminationReport:
    """Probability report of a full-space POVM triple on two pure states."""
    m1 = _as_state_matrix(phi1).reshape(-1)
    m2 = _as_state_matrix(phi2).reshape(-1)
    joints = np.zeros((3, 2))
    ranks = []
    psd_ok = True
    total = np.zeros((len(m1), len(m1)), dtype=complex)
    for mu, e in enumerate(effects):
        e = np.asarray(e, dtype=complex)
        total = total + e
        evals = np.linalg.eigvalsh(e)
        psd_ok = psd_ok and evals[0] >= -1e-8
        ranks.append(int(np.sum(evals > 1e-8)))
        joints[mu, 0] = 0.5 * max(0.0, (m1.conj() @ e @ m1).real)
        joints[mu, 1] = 0.5 * max(0.0, (m2.conj() @ e @ m2).real)
    complete_ok = bool(np.linalg.norm(total - np.eye(len(m1))) <= 1e-8)
    weight_1 = joints[0, 0] + joints[0, 1]
    weight_2 = joints[1, 0] + joints[1, 1]
    return DiscriminationReport(
        p_success=float(joints[0, 0] + joints[1, 1]),
        p_error_given_1=float(joints[0, 1] / weight_1) if weight_1 > 1e-14 else 0.0,
        p_error_given_2=float(joints[1, 0] / weight_2) if weight_2 > 1e-14 else 0.0,
        p_mean_error=float(joints[0, 1] + joints[1, 0]),
        p_inconclusive=float(joints[2, 0] + joints[2, 1]),
        psd_ok=bool(psd_ok),
        complete_ok=complete_ok,
        ranks=tuple(ranks),
    )


@dataclass(frozen=True, eq=False)
class LoccPipelineResult:
    """Everything the one-way LOCC construction produced along the way."""

    locc: LoccPovm
    deviation: float
    problem: UnambiguousProblem
    decomposition: AliceDecomposition
    global_povm: list
    v_basis: tuple


def locc_pipeline(
    phi1,
    phi2,
    cond: MarginCondition,
    ancilla_dim: int = DEFAULT_ANCILLA,
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
) -> LoccPipelineResult:
    """Full pipeline: optimal margin POVM realized by one-way LOCC.

    Solves the margin problem on the span of the two bipartite states,
    identifies the optimal POVM with an unambiguous problem, decomposes
    that problem's states over an Alice basis, assembles the local POVM,
    and verifies the compression back onto the subspace.
    """
    m1 = _as_state_matrix(phi1)
    m2 = _as_state_matrix(phi2)
    if m1.shape != m2.shape:
        raise ValidationError("the two states must share the same local dimensions")
    v1 = m1.reshape(-1)
    v2 = m2.reshape(-1)
    v1, v2, g = _fix_pair_phase(v1, v2)
    if g >= 1.0 - 1e-12:
        raise DomainError(
            "states are indistinguishable: |<phi1|phi2>| = 1 is excluded"
        )

    # Margin problem in coordinates on V = span{phi1, phi2}.
    basis2 = _orth_in_span(v1, v2)
    pair = StatePair.from_states(
        PureState(np.array([1.0, 0.0], dtype=complex)),
        PureState(np.array([g, math.sqrt(1.0 - g * g)], dtype=complex)),
    )
    povm2 = optimal_povm(pair, cond)
    lift = np.column_stack([v1, basis2])
    lifted = [lift @ operator_matrix(e) @ lift.conj().T for e in povm2.elements]

    problem = povm_to_unambiguous(lifted)
    d_alice, d_bob = m1.shape
    dec = find_alice_decomposition(
        problem.psi2_perp.reshape(d_alice, d_bob),
        problem.psi1_perp.reshape(d_alice, d_bob),
        problem.s,
        problem.t,
        ancilla_dim=ancilla_dim,
        budget=budget,
        seed=seed,
    )
    locc = build_locc_povm(dec, problem.s, problem.t)
    deviation = verify_compression(lifted, locc, (v1, basis2))
    return LoccPipelineResult(
        locc=locc,
        deviation=deviation,
        problem=problem,
        decomposition=dec,
        global_povm=lifted,
        v_basis=(v1, basis2),
    )


def margin_povm_to_locc(
    phi1,
    phi2,
    cond: MarginCondition,
    ancilla_dim: int = DEFAULT_ANCILLA,
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
):
    """The LOCC POVM for the margin problem and its compression deviation."""
    result = locc_pipeline(
        phi1, phi2, cond, ancilla_dim=ancilla_dim, budget=budget, seed=seed
    )
    return result.locc, result.deviation
