"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines and timings.
"""

import json
import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from margin_discrim import (
    DomainError,
    MarginCondition,
    NotRepresentableError,
    Observable2,
    PureState,
    StatePair,
    check_margin,
    critical_margin,
    evaluate,
    f_poly,
    g_poly,
    helstrom_povm,
    joint_probability,
    margin_feasible,
    minimum_error_success,
    operator_matrix,
    optimal_povm,
    oracle_general,
    oracle_reduced,
    reduced_params_strong,
    reduced_params_weak,
    simulate,
    success_strong,
    success_weak,
)
from margin_discrim.cli import main
from margin_discrim.locc import (
    evaluate_full,
    global_unambiguous_povm,
    margin_povm_to_locc,
    povm_to_unambiguous,
)
from margin_discrim.errors import DecompositionSearchError
from conftest import random_two_qubit_pair


@contextmanager
def criterion(number, description, limit_seconds):
    start = time.time()
    try:
        yield
    except Exception:
        print(f"ACCEPTANCE {number} FAIL: {description} ({time.time() - start:.1f}s)")
        raise
    elapsed = time.time() - start
    print(f"ACCEPTANCE {number} PASS: {description} ({elapsed:.1f}s)")
    assert elapsed < limit_seconds, f"criterion {number} exceeded {limit_seconds}s"


def test_criterion_1_closed_form_anchors():
    with criterion(1, "closed form matches both branch anchors", 1.0):
        rng = np.random.default_rng(101)
        for fid in rng.uniform(0.0, 0.99, size=100):
            assert abs(success_strong(fid, 0.0) - (1.0 - fid)) <= 1e-12
            plateau = 0.5 * (1.0 + math.sqrt(1.0 - fid * fid))
            mc = critical_margin(fid)
            m = rng.uniform(mc, 1.0)
            assert abs(success_strong(fid, m) - plateau) <= 1e-12


def test_criterion_2_curve_reproduction(tmp_path):
    with criterion(2, "curve CLI reproduces the success-probability figure", 1.0):
        out = tmp_path / "curve.csv"
        assert main(["curve", "--fidelity", "0.9", "--m-steps", "101",
                     "--out", str(out)]) == 0
        lines = out.read_text().strip().split("\n")
        assert lines[0] == "m,p_strong,p_weak,p_unambiguous,p_minimum_error"
        rows = [tuple(float(v) for v in line.split(",")) for line in lines[1:]]
        assert len(rows) == 101

        m0 = rows[0]
        assert abs(m0[1] - 0.1) <= 1e-12 and abs(m0[2] - 0.1) <= 1e-12
        plateau = 0.717944947
        for m, p_strong, p_weak, p_u, p_me in rows:
            if m >= 0.2820550529:
                assert abs(p_strong - plateau) <= 1e-9
                assert abs(p_weak - plateau) <= 1e-9
            assert p_weak >= p_strong - 1e-12
            assert p_u <= p_strong + 1e-12 and p_weak <= p_me + 1e-12

        # continuity: every jump is bounded by twice the local slope
        # (independent finite differences of the closed forms) times the step
        step = 0.01
        h = 1e-7
        for func, col in ((success_strong, 1), (success_weak, 2)):
            for left, right in zip(rows[:-1], rows[1:]):
                jump = abs(right[col] - left[col])
                slope = max(
                    abs(func(0.9, min(1.0, mm + h)) - func(0.9, max(0.0, mm - h)))
                    / (2 * h)
                    for mm in (left[0] + h, 0.5 * (left[0] + right[0]), right[0] - h)
                )
                assert jump <= 2.0 * slope * step + 1e-12


def test_criterion_3_reduced_oracle_grid():
    with criterion(3, "reduced oracle matches closed forms on a 20x20 grid", 30.0):
        for fid in np.linspace(0.0, 0.99, 20):
            S, T = fid * fid, 1.0 - fid * fid
            mc = critical_margin(fid)
            for m in np.linspace(0.0, mc, 20):
                for kind in ("strong", "weak"):
                    closed = (
                        success_strong(fid, m) if kind == "strong" else success_weak(fid, m)
                    )
                    result = oracle_reduced(S, T, m, kind, 100000)
                    assert result.feasible
                    assert abs(result.p_best - closed) <= 1e-8, (fid, m, kind)


def test_criterion_4_general_oracle_instances():
    with criterion(4, "general 8-parameter oracle agrees on 50 random instances", 300.0):
        rng = np.random.default_rng(404)
        for i in range(50):
            fid = rng.uniform(0.0, 0.97)
            m = rng.uniform(0.0, 1.0)
            kind = "strong" if i % 2 == 0 else "weak"
            pair = StatePair.from_fidelity(fid)
            closed = success_strong(fid, m) if kind == "strong" else success_weak(fid, m)
            result = oracle_general(pair, MarginCondition(kind, m), 100000, 1000 + i)
            assert result.feasible, (fid, m, kind)
            assert abs(result.p_best - closed) <= 1e-4, (fid, m, kind, result.p_best, closed)


def test_criterion_5_constraint_quadratic_identities():
    with criterion(5, "constraint-quadratic identities on 1000 random samples", 1.0):
        rng = np.random.default_rng(505)
        y_grid = np.linspace(-1.0, 1.0, 1001)
        for _ in range(1000):
            fid = rng.uniform(0.01, 0.99)
            S, T = fid * fid, 1.0 - fid * fid
            mc = critical_margin(fid)
            m = rng.uniform(0.0, mc * 0.9999999)
            sqrt_s, sqrt_t = math.sqrt(S), math.sqrt(T)
            y_edge = 1.0 / (2.0 * sqrt_t)

            y_max = reduced_params_strong(S, T, m).y
            assert abs(g_poly(y_max, S, T, m)) <= 1e-12

            y0 = 1.0 / (2.0 * (1.0 - 2.0 * m) * (1.0 + sqrt_s))
            assert g_poly(y0, S, T, m) <= 1e-15

            edge_value = 0.5 * (1.0 - sqrt_t / (1.0 - 2.0 * m))
            assert abs(f_poly(y_edge, S, T, m) - edge_value) <= 1e-12
            assert abs(g_poly(y_edge, S, T, m) - edge_value) <= 1e-12
            assert edge_value > 0.0

            # positive-x branch infeasible: f stays positive on the whole
            # y domain, with its vertex beyond the right edge
            vertex = 1.0 / (2.0 * (1.0 - 2.0 * m) * (1.0 - sqrt_s))
            assert vertex >= y_edge - 1e-12
            values = f_poly(y_grid * y_edge, S, T, m)
            assert np.min(values) > 0.0


def test_criterion_6_constraint_saturation():
    with criterion(6, "optimal measurements saturate their margin constraints", 5.0):
        for fid in (0.3, 0.6, 0.9, 0.99):
            pair = StatePair.from_fidelity(fid)
            mc = critical_margin(fid)
            for frac in (0.0, 0.25, 0.5, 0.75, 0.95):
                m = frac * mc
                strong = evaluate(optimal_povm(pair, MarginCondition("strong", m)), pair)
                assert abs(strong.p_error_given_1 - m) <= 1e-9
                assert abs(strong.p_error_given_2 - m) <= 1e-9
                weak = evaluate(optimal_povm(pair, MarginCondition("weak", m)), pair)
                assert abs(weak.p_mean_error - m) <= 1e-9
            hel = evaluate(helstrom_povm(pair), pair)
            assert abs(hel.p_error_given_1 - mc) <= 1e-10
            assert abs(hel.p_error_given_2 - mc) <= 1e-10


def test_criterion_7_monte_carlo_concentration():
    with criterion(7, "10^6-shot frequencies concentrate for >= 99 of 100 seeds", 120.0):
        pair = StatePair.from_fidelity(0.9)
        povm = optimal_povm(pair, MarginCondition("strong", 0.1))
        shots = 10**6
        p_true = 0.225
        weight_1 = joint_probability(povm.e1, 1, pair) + joint_probability(povm.e1, 2, pair)
        weight_2 = joint_probability(povm.e2, 1, pair) + joint_probability(povm.e2, 2, pair)
        se_p = math.sqrt(p_true * (1 - p_true) / shots)
        se_e1 = math.sqrt(0.1 * 0.9 / (weight_1 * shots))
        se_e2 = math.sqrt(0.1 * 0.9 / (weight_2 * shots))
        good = 0
        for seed in range(100):
            report = simulate(povm, pair, shots, seed=seed).empirical_report
            ok = (
                abs(report.p_success - p_true) <= 5 * se_p
                and abs(report.p_error_given_1 - 0.1) <= 5 * se_e1
                and abs(report.p_error_given_2 - 0.1) <= 5 * se_e2
            )
            good += ok
        assert good >= 99, f"only {good} of 100 seeds concentrated"


def test_criterion_8_locc_pipeline():
    with criterion(8, "margin POVMs realized by one-way LOCC on two-qubit pairs", 600.0):
        rng = np.random.default_rng(808)
        instances = []
        for i, fid in enumerate(np.linspace(0.1, 0.9, 6)):
            mc = critical_margin(fid)
            for j, m in enumerate((0.0, 0.05, mc / 2, 1.0)):
                product = (i + j) % 3 == 0
                kind = "strong" if (i + j) % 2 == 0 else "weak"
                instances.append((fid, m, kind, product))
        assert len(instances) >= 20

        failures = []
        for idx, (fid, m, kind, product) in enumerate(instances):
            phi1, phi2 = random_two_qubit_pair(fid, rng, product=product)
            cond = MarginCondition(kind, m)
            closed = success_strong(fid, m) if kind == "strong" else success_weak(fid, m)
            try:
                locc, deviation = margin_povm_to_locc(phi1, phi2, cond, seed=idx)
            except DecompositionSearchError as exc:
                failures.append((idx, fid, m, kind, exc.violations))
                print(f"  instance {idx} (F={fid:.2f}, m={m:.4f}, {kind}): "
                      f"decomposition search failed: {exc.violations}")
                continue
            assert deviation <= 1e-8, (idx, deviation)
            report = evaluate_full(locc.elements(), phi1, phi2)
            assert abs(report.p_success - closed) <= 1e-8, (idx, report.p_success, closed)

            # identification round trip and the weight relation
            v1 = phi1.reshape(-1)
            z = complex(np.vdot(v1, phi2.reshape(-1)))
            v2_full = phi2.reshape(-1) * (np.conj(z) / abs(z))
            w = v2_full - np.vdot(v1, v2_full) * v1
            w = w / np.linalg.norm(w)
            pair2 = StatePair.from_states(
                PureState(np.array([1.0, 0.0], dtype=complex)),
                PureState(np.array([abs(z), math.sqrt(1 - abs(z) ** 2)], dtype=complex)),
            )
            lift = np.column_stack([v1, w])
            lifted = [lift @ operator_matrix(e) @ lift.conj().T
                      for e in optimal_povm(pair2, cond).elements]
            problem = povm_to_unambiguous(lifted)
            lhs = problem.b1 + problem.b2
            rhs = 1 + problem.b1 * problem.b2 * (1 - problem.overlap**2)
            assert abs(lhs - rhs) <= 1e-10
            rebuilt = global_unambiguous_povm(
                problem.psi2_perp.reshape(2, 2),
                problem.psi1_perp.reshape(2, 2),
                problem.s,
                problem.t,
            )
            for original, again in zip(lifted, rebuilt):
                assert np.max(np.abs(original - again)) <= 1e-10

        success_rate = 1.0 - len(failures) / len(instances)
        print(f"  decomposition success rate: {success_rate:.0%} "
              f"({len(instances) - len(failures)}/{len(instances)})")
        assert success_rate >= 0.9, f"failures: {failures}"


def test_criterion_9_negative_controls(capsys):
    with criterion(9, "invalid inputs and infeasible measurements are rejected", 10.0):
        # minimum-error measurement violates any margin below the critical one
        for fid in (0.3, 0.6, 0.9):
            pair = StatePair.from_fidelity(fid)
            report = evaluate(helstrom_povm(pair), pair)
            m = 0.8 * critical_margin(fid)
            assert check_margin(report, MarginCondition("strong", m)) < -1e-9
            assert not margin_feasible(report, MarginCondition("strong", m))

        # rank-2 element cannot be identified with an unambiguous optimum
        projector = np.diag([1.0, 1.0, 0.0, 0.0]).astype(complex)
        with pytest.raises(NotRepresentableError):
            povm_to_unambiguous(
                (0.5 * projector, np.zeros((4, 4), dtype=complex), 0.5 * projector)
            )

        # fidelity-1 inputs rejected across all entry points
        with pytest.raises(DomainError):
            StatePair.from_fidelity(1.0)
        psi = PureState(np.array([1.0, 0.0]))
        with pytest.raises(DomainError):
            StatePair.from_states(psi, psi)
        with pytest.raises(DomainError):
            critical_margin(1.0)
        with pytest.raises(DomainError):
            success_strong(1.0, 0.5)
        phi = np.zeros((2, 2), dtype=complex)
        phi[0, 0] = 1.0
        with pytest.raises(DomainError):
            margin_povm_to_locc(phi, phi.copy(), MarginCondition("strong", 0.1))
        assert main(["solve", "--fidelity", "1.0", "--margin", "0.1"]) == 2
        capsys.readouterr()
