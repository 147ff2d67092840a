"""Seeded Monte Carlo simulation of the discrimination experiment.

Each shot draws a true state with equal priors, then an outcome with the
Born probabilities of the POVM.  Shots are generated in fixed-size
chunks, each with its own RNG substream spawned from the seed, so the
merged count table is identical no matter how many workers execute the
chunks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ValidationError
from .linalg import Povm3, StatePair, expectation
from .parallel import map_ordered
from .validator import DiscriminationReport

CHUNK_SHOTS = 1 << 16

# Born probabilities this far below zero are roundoff and get clamped;
# anything worse indicates a genuinely invalid effect.
NEGATIVITY_TOL = 1e-10


@dataclass(frozen=True)
class SimulationResult:
    """Empirical counts and frequencies of a finite-shot experiment."""

    shots: int
    counts: np.ndarray  # 2 x 3, [true state - 1, outcome - 1]
    empirical_report: DiscriminationReport
    stderr: dict

    def to_json(self) -> dict:
        return {
            "shots": self.shots,
            "counts": [[int(c) for c in row] for row in self.counts],
            "empirical_report": self.empirical_report.to_json(),
            "stderr": dict(self.stderr),
        }


def _born_row(povm: Povm3, n) -> np.ndarray:
    probs = np.array([expectation(e, n) for e in povm.elements])
    if probs.min() < -NEGATIVITY_TOL or probs.max() > 1.0 + NEGATIVITY_TOL:
        raise ValidationError(
            f"Born probabilities {probs} fall outside [0, 1] beyond roundoff"
        )
    probs = np.clip(probs, 0.0, None)
    return probs / probs.sum()


def simulate(povm: Povm3, pair: StatePair, shots: int, seed: int) -> SimulationResult:
    """Run ``shots`` discrimination rounds and tabulate outcomes.

    Deterministic for fixed (seed, shots); the chunked RNG layout makes
    the result independent of the worker count.
    """
    if shots < 1:
        raise DomainError("shots must be a positive integer")
    p1 = _born_row(povm, pair.n1)
    p2 = _born_row(povm, pair.n2)

    n_chunks = (shots + CHUNK_SHOTS - 1) // CHUNK_SHOTS
    sizes = [min(CHUNK_SHOTS, shots - i * CHUNK_SHOTS) for i in range(n_chunks)]
    children = np.random.SeedSequence(seed).spawn(n_chunks)

    def run_chunk(args):
        size, child = args
        rng = np.random.default_rng(child)
        n_first = int(rng.binomial(size, 0.5))
        row1 = rng.multinomial(n_first, p1)
        row2 = rng.multinomial(size - n_first, p2)
        return np.stack([row1, row2])

    tables = map_ordered(run_chunk, list(zip(sizes, children)))
    counts = np.sum(tables, axis=0)

    report = _empirical_report(counts, shots, povm)
    stderr = _standard_errors(counts, shots)
    return SimulationResult(shots=shots, counts=counts, empirical_report=report, stderr=stderr)


def _empirical_report(counts, shots, povm) -> DiscriminationReport:
    n_out = counts.sum(axis=0)
    p_success = (counts[0, 0] + counts[1, 1]) / shots
    p_mean_error = (counts[1, 0] + counts[0, 1]) / shots
    p_inconclusive = n_out[2] / shots
    p_err_1 = counts[1, 0] / n_out[0] if n_out[0] > 0 else 0.0
    p_err_2 = counts[0, 1] / n_out[1] if n_out[1] > 0 else 0.0
    return DiscriminationReport(
        p_success=float(p_success),
        p_error_given_1=float(p_err_1),
        p_error_given_2=float(p_err_2),
        p_mean_error=float(p_mean_error),
        p_inconclusive=float(p_inconclusive),
        psd_ok=all(e.is_psd() for e in povm.elements),
        complete_ok=True,
        ranks=tuple(e.rank() for e in povm.elements),
    )


def _standard_errors(counts, shots) -> dict:
    n_out = counts.sum(axis=0)

    def freq_se(p_hat):
        return math.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / shots)

    def ratio_se(p_hat, denom):
        # Delta method for the conditional-error ratio estimator.
        if denom <= 0:
            return 0.0
        return math.sqrt(max(p_hat * (1.0 - p_hat), 0.0) / denom)

    p_success = (counts[0, 0] + counts[1, 1]) / shots
    p_mean_error = (counts[1, 0] + counts[0, 1]) / shots
    p_inconclusive = n_out[2] / shots
    p_err_1 = counts[1, 0] / n_out[0] if n_out[0] > 0 else 0.0
    p_err_2 = counts[0, 1] / n_out[1] if n_out[1] > 0 else 0.0
    return {
        "p_success": freq_se(p_success),
        "p_error_given_1": ratio_se(p_err_1, n_out[0]),
        "p_error_given_2": ratio_se(p_err_2, n_out[1]),
        "p_mean_error": freq_se(p_mean_error),
        "p_inconclusive": freq_se(p_inconclusive),
    }
