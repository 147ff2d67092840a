import math

import numpy as np
import pytest

from margin_discrim import (
    DomainError,
    MarginCondition,
    StatePair,
    critical_margin,
    f_poly,
    g_poly,
    oracle_general,
    oracle_reduced,
    reduced_params_strong,
    success_strong,
    success_weak,
)
from margin_discrim.oracle import _violations


class TestConstraintPolynomials:
    def test_f_constant_term(self):
        assert f_poly(0.0, 0.81, 0.19, 0.3) == pytest.approx((1 + 0.9) / 4)

    def test_f_at_domain_edge(self):
        # frozen: (1 - sqrt(0.19)/0.8) / 2
        y_edge = 1.0 / (2.0 * math.sqrt(0.19))
        assert f_poly(y_edge, 0.81, 0.19, 0.1) == pytest.approx(
            0.22756881602870793, abs=1e-14
        )
        assert g_poly(y_edge, 0.81, 0.19, 0.1) == pytest.approx(
            0.22756881602870793, abs=1e-14
        )

    def test_f_vertex_beyond_domain(self):
        # vertex of f at 1/(2(1-2m)(1-sqrt(S))) stays right of 1/(2 sqrt(T))
        vertex = 1.0 / (2.0 * 1.0 * (1.0 - 0.9))
        assert vertex == pytest.approx(5.0)
        assert vertex >= 1.0 / (2.0 * math.sqrt(0.19))

    def test_g_root_is_optimal_y(self):
        y_max = reduced_params_strong(0.81, 0.19, 0.1).y
        assert abs(g_poly(y_max, 0.81, 0.19, 0.1)) < 1e-12

    def test_g_at_vertex(self):
        y0 = 1.0 / (2.0 * 0.8 * 1.9)
        assert g_poly(y0, 0.81, 0.19, 0.1) == pytest.approx(-0.0140625, abs=1e-14)

    def test_g_roots_bracket_vertex(self, rng):
        for _ in range(200):
            fid = rng.uniform(0.05, 0.99)
            S, T = fid * fid, 1 - fid * fid
            m = rng.uniform(0.0, critical_margin(fid) * 0.999)
            sqrt_s = math.sqrt(S)
            a, b, c = T * (1 + sqrt_s), -T / (1 - 2 * m), (1 - sqrt_s) / 4
            disc = b * b - 4 * a * c
            assert disc >= -1e-15
            root_hi = (-b + math.sqrt(max(disc, 0.0))) / (2 * a)
            root_lo = (-b - math.sqrt(max(disc, 0.0))) / (2 * a)
            y0 = 1.0 / (2.0 * (1 - 2 * m) * (1 + sqrt_s))
            assert root_lo - 1e-12 <= y0 <= root_hi + 1e-12
            assert root_hi == pytest.approx(
                reduced_params_strong(S, T, m).y, abs=1e-12
            )

    def test_domain_checks(self):
        with pytest.raises(DomainError):
            f_poly(0.1, 0.81, 0.19, 0.5)
        with pytest.raises(DomainError):
            g_poly(0.1, 0.81, 0.19, -0.1)


class TestOracleReduced:
    @pytest.mark.parametrize(
        "m,kind,expected",
        [
            (0.0, "strong", 0.1),
            (0.1, "strong", 0.225),
            (0.1, "weak", 0.4),
            (0.5, "strong", 0.7179449471770336),
        ],
    )
    def test_frozen_agreement(self, m, kind, expected):
        result = oracle_reduced(0.81, 0.19, m, kind, 100000)
        assert result.feasible
        assert result.p_best == pytest.approx(expected, abs=1e-8)

    def test_orthogonal_states(self):
        result = oracle_reduced(0.0, 1.0, 0.0, "strong", 100000)
        assert result.feasible
        assert result.p_best == pytest.approx(1.0, abs=1e-10)

    def test_agreement_grid(self, rng):
        for _ in range(25):
            fid = rng.uniform(0.02, 0.99)
            m = rng.uniform(0.0, 1.0)
            kind = "strong" if rng.uniform() < 0.5 else "weak"
            closed = success_strong(fid, m) if kind == "strong" else success_weak(fid, m)
            result = oracle_reduced(fid * fid, 1 - fid * fid, m, kind, 100000)
            assert result.p_best == pytest.approx(closed, abs=1e-8)

    def test_positive_x_branch_never_wins_below_mc(self, rng):
        for _ in range(25):
            fid = rng.uniform(0.05, 0.99)
            m = rng.uniform(0.0, critical_margin(fid) * 0.999)
            result = oracle_reduced(fid * fid, 1 - fid * fid, m, "strong", 20000)
            assert result.argmax.x <= 1e-12

    def test_grid_too_small_rejected(self):
        with pytest.raises(DomainError):
            oracle_reduced(0.81, 0.19, 0.1, "strong", 100)

    def test_evaluation_count_reported(self):
        result = oracle_reduced(0.81, 0.19, 0.1, "strong", 2000)
        assert result.evaluations >= 4000  # both branches scanned


class TestOracleGeneral:
    def test_agrees_with_closed_form(self):
        pair = StatePair.from_fidelity(0.9)
        result = oracle_general(pair, MarginCondition("strong", 0.1), 100000, 7)
        assert result.feasible
        assert result.p_best == pytest.approx(0.225, abs=1e-4)

    def test_helstrom_regime(self):
        pair = StatePair.from_fidelity(0.9)
        result = oracle_general(pair, MarginCondition("strong", 1.0), 100000, 7)
        assert result.p_best == pytest.approx(0.7179449471770336, abs=1e-4)

    def test_orthogonal_states(self):
        pair = StatePair.from_fidelity(0.0)
        result = oracle_general(pair, MarginCondition("strong", 0.0), 100000, 7)
        assert result.p_best == pytest.approx(1.0, abs=1e-6)

    def test_deterministic_given_seed(self):
        pair = StatePair.from_fidelity(0.6)
        a = oracle_general(pair, MarginCondition("weak", 0.07), 20000, 42)
        b = oracle_general(pair, MarginCondition("weak", 0.07), 20000, 42)
        assert a.p_best == b.p_best
        assert np.array_equal(a.argmax, b.argmax)

    def test_argmax_feasible(self):
        pair = StatePair.from_fidelity(0.75)
        result = oracle_general(pair, MarginCondition("strong", 0.04), 50000, 3)
        worst = max(_violations(result.argmax, pair.n1, pair.n2, 0.04, "strong"))
        assert worst <= 1e-8

    def test_budget_floor(self):
        pair = StatePair.from_fidelity(0.5)
        with pytest.raises(DomainError):
            oracle_general(pair, MarginCondition("strong", 0.1), 5000, 0)

    def test_convexity_of_feasible_set(self, rng):
        # Convex combinations of feasible parameter sets stay feasible.
        from margin_discrim.margin import optimal_povm

        def as_theta(povm):
            return np.concatenate(
                ([povm.e1.alpha], povm.e1.beta, [povm.e2.alpha], povm.e2.beta)
            )

        for _ in range(50):
            fid = rng.uniform(0.05, 0.95)
            pair = StatePair.from_fidelity(fid)
            m = rng.uniform(0.0, 1.0)
            kind = "strong" if rng.uniform() < 0.5 else "weak"
            cond = MarginCondition(kind, m)
            stricter = MarginCondition(kind, m * rng.uniform(0.0, 1.0))
            # scaled-down optima (of this margin and of a stricter one)
            # are both feasible points of the same constraint set
            theta_a = as_theta(optimal_povm(pair, cond)) * rng.uniform(0.0, 1.0)
            theta_b = as_theta(optimal_povm(pair, stricter)) * rng.uniform(0.0, 1.0)
            lam = rng.uniform(0.0, 1.0)
            mix = lam * theta_a + (1 - lam) * theta_b
            assert max(_violations(mix, pair.n1, pair.n2, m, kind)) <= 1e-10
