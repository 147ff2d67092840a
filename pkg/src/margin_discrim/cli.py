"""Command-line front end.

Subcommands: ``solve`` (closed form + POVM + validator report), ``curve``
(success probabilities versus margin as CSV, optionally with a rendered
figure), ``simulate`` (Monte Carlo), ``oracle`` (numerical maximization),
and ``locc`` (bipartite one-way LOCC pipeline).  Exit codes: 0 on
success, 2 on domain or flag errors, 1 on internal failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from .errors import DiscriminationError, DomainError
from .linalg import StatePair
from .locc import (
    DEFAULT_ANCILLA,
    DEFAULT_BUDGET,
    evaluate_full,
    locc_pipeline,
)
from .margin import (
    MarginCondition,
    critical_margin,
    minimum_error_success,
    optimal_povm,
    success_probability,
    success_strong,
    success_weak,
)
from .oracle import oracle_general, oracle_reduced
from .simulate import simulate
from .validator import check_margin, evaluate, margin_feasible

CSV_HEADER = "m,p_strong,p_weak,p_unambiguous,p_minimum_error"


@dataclass(frozen=True)
class CurveRow:
    """One margin sample of the four success-probability curves."""

    m: float
    p_strong: float
    p_weak: float
    p_unambiguous: float
    p_minimum_error: float


def curve(fidelity: float, m_steps: int) -> list:
    """Sample all four curves on a uniform margin grid over [0, 1]."""
    if m_steps < 2:
        raise DomainError("m-steps must be at least 2")
    p_u = 1.0 - fidelity
    p_m = minimum_error_success(fidelity)
    rows = []
    for k in range(m_steps):
        m = k / (m_steps - 1)
        rows.append(
            CurveRow(
                m=m,
                p_strong=success_strong(fidelity, m),
                p_weak=success_weak(fidelity, m),
                p_unambiguous=p_u,
                p_minimum_error=p_m,
            )
        )
    return rows


def _curve_csv(rows) -> str:
    lines = [CSV_HEADER]
    for row in rows:
        lines.append(
            f"{row.m:.12f},{row.p_strong:.12f},{row.p_weak:.12f},"
            f"{row.p_unambiguous:.12f},{row.p_minimum_error:.12f}"
        )
    return "\n".join(lines) + "\n"


def _emit(text: str, out_path) -> None:
    if out_path:
        with open(out_path, "w") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _emit_json(payload: dict, out_path) -> None:
    _emit(json.dumps(payload, indent=2) + "\n", out_path)


def _condition(args) -> MarginCondition:
    return MarginCondition(args.condition, args.margin)


def _cmd_solve(args) -> int:
    cond = _condition(args)
    pair = StatePair.from_fidelity(args.fidelity)
    povm = optimal_povm(pair, cond)
    report = evaluate(povm, pair)
    mc = critical_margin(args.fidelity)
    payload = {
        "fidelity": args.fidelity,
        "condition": cond.kind,
        "margin": cond.m,
        "critical_margin": mc,
        "regime": "minimum-error" if cond.m >= mc else "margin-limited",
        "p_success": success_probability(args.fidelity, cond),
        "povm": povm.to_json(),
        "report": report.to_json(),
        "margin_slack": check_margin(report, cond),
        "margin_feasible": margin_feasible(report, cond),
    }
    if args.oracle:
        result = oracle_reduced(pair.S, pair.T, cond.m, cond.kind, args.grid_n)
        payload["oracle"] = result.to_json()
        payload["oracle_delta"] = abs(result.p_best - payload["p_success"])
    _emit_json(payload, args.out)
    return 0


def _cmd_curve(args) -> int:
    rows = curve(args.fidelity, args.m_steps)
    _emit(_curve_csv(rows), args.out)
    if args.fig:
        from .figures import save_curve_figure

        save_curve_figure(rows, args.fidelity, args.fig)
    return 0


def _cmd_simulate(args) -> int:
    cond = _condition(args)
    pair = StatePair.from_fidelity(args.fidelity)
    povm = optimal_povm(pair, cond)
    result = simulate(povm, pair, args.shots, args.seed)
    payload = result.to_json()
    payload["closed_form_p_success"] = success_probability(args.fidelity, cond)
    _emit_json(payload, args.out)
    return 0


def _cmd_oracle(args) -> int:
    cond = _condition(args)
    pair = StatePair.from_fidelity(args.fidelity)
    if args.mode == "reduced":
        result = oracle_reduced(pair.S, pair.T, cond.m, cond.kind, max(args.budget, 1000))
    else:
        result = oracle_general(pair, cond, args.budget, args.seed)
    payload = result.to_json()
    payload["mode"] = args.mode
    payload["closed_form"] = success_probability(args.fidelity, cond)
    payload["delta"] = abs(result.p_best - payload["closed_form"])
    _emit_json(payload, args.out)
    return 0


def _parse_state_matrix(text: str, fidelity, which: str) -> np.ndarray:
    """A state flag is either a named preset or a JSON [re, im] matrix."""
    if text in ("product", "entangled"):
        if fidelity is None:
            raise DomainError(f"preset '{text}' requires --fidelity")
        f = fidelity
        if text == "product":
            chi = np.array([1.0, 0.0]) if which == "phi1" else np.array(
                [f, math.sqrt(max(0.0, 1.0 - f * f))]
            )
            return np.outer(np.array([1.0, 0.0]), chi).astype(complex)
        base = np.array([[1.0, 0.0], [0.0, 1.0]], dtype=complex) / math.sqrt(2.0)
        if which == "phi1":
            return base
        other = np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex) / math.sqrt(2.0)
        return f * base + math.sqrt(max(0.0, 1.0 - f * f)) * other
    try:
        data = json.loads(text)
        mat = np.array([[complex(re, im) for re, im in row] for row in data])
    except (ValueError, TypeError) as exc:
        raise DomainError(
            f"--{which} must be 'product', 'entangled', or a JSON matrix of "
            f"[re, im] pairs: {exc}"
        ) from exc
    return mat


def _cmd_locc(args) -> int:
    cond = _condition(args)
    phi1 = _parse_state_matrix(args.phi1, args.fidelity, "phi1")
    phi2 = _parse_state_matrix(args.phi2, args.fidelity, "phi2")
    result = locc_pipeline(
        phi1,
        phi2,
        cond,
        ancilla_dim=args.ancilla_dim,
        budget=args.budget,
        seed=args.seed,
    )
    fidelity = abs(complex(np.vdot(phi1, phi2)))
    report = evaluate_full(result.locc.elements(), phi1, phi2)
    global_report = evaluate_full(result.global_povm, phi1, phi2)

    dec = result.decomposition
    ratio = math.sqrt(result.problem.t / result.problem.s)
    overlaps = dec.branch_overlaps()
    branches = []
    for i in range(dec.branches):
        weighted = math.sqrt(dec.weights_s[i] * dec.weights_t[i]) * overlaps[i].real
        branches.append(
            {
                "s_I": float(dec.weights_s[i]),
                "t_I": float(dec.weights_t[i]),
                "overlap": float(overlaps[i].real),
                "slack_ratio_1": float(dec.weights_s[i] / ratio - weighted),
                "slack_ratio_2": float(ratio * dec.weights_t[i] - weighted),
            }
        )
    payload = {
        "fidelity": fidelity,
        "condition": cond.kind,
        "margin": cond.m,
        "max_deviation": result.deviation,
        "closed_form_p_success": success_probability(fidelity, cond),
        "p_success_global": global_report.p_success,
        "p_success_locc": report.p_success,
        "locc_report": report.to_json(),
        "margin_slack": check_margin(report, cond),
        "branches": branches,
    }
    _emit_json(payload, args.out)
    return 0


def _add_common(parser, fidelity_required=True):
    parser.add_argument("--fidelity", type=float, required=fidelity_required,
                        default=None, help="overlap |<phi1|phi2>| of the two states")
    parser.add_argument("--margin", type=float, default=0.0,
                        help="error margin m in [0, 1]")
    parser.add_argument("--condition", choices=("strong", "weak"), default="strong",
                        help="bound each conditional error (strong) or the mean error (weak)")
    parser.add_argument("--seed", type=int, default=0, help="RNG seed")
    parser.add_argument("--out", default=None, help="write output to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="margin-discrim",
        description="Optimal two-state discrimination under an error margin",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="closed-form optimum, POVM, and report")
    _add_common(p_solve)
    p_solve.add_argument("--oracle", action="store_true",
                         help="also run the reduced oracle and report the agreement delta")
    p_solve.add_argument("--grid-n", type=int, default=100000, dest="grid_n",
                         help="grid size for the reduced oracle")
    p_solve.set_defaults(func=_cmd_solve)

    p_curve = sub.add_parser("curve", help="success probabilities versus margin as CSV")
    _add_common(p_curve)
    p_curve.add_argument("--m-steps", type=int, default=101, dest="m_steps",
                         help="number of margin samples over [0, 1]")
    p_curve.add_argument("--fig", default=None,
                         help="also render the curves to this image file")
    p_curve.set_defaults(func=_cmd_curve)

    p_sim = sub.add_parser("simulate", help="Monte Carlo run of the optimal measurement")
    _add_common(p_sim)
    p_sim.add_argument("--shots", type=int, default=100000, help="number of shots")
    p_sim.set_defaults(func=_cmd_simulate)

    p_oracle = sub.add_parser("oracle", help="numerical maximization cross-check")
    _add_common(p_oracle)
    p_oracle.add_argument("--mode", choices=("reduced", "general"), default="reduced")
    p_oracle.add_argument("--budget", type=int, default=100000,
                          help="grid size (reduced) or evaluation budget (general)")
    p_oracle.set_defaults(func=_cmd_oracle)

    p_locc = sub.add_parser("locc", help="one-way LOCC realization for bipartite states")
    _add_common(p_locc, fidelity_required=False)
    p_locc.add_argument("--phi1", default="entangled",
                        help="'product', 'entangled', or a JSON amplitude matrix")
    p_locc.add_argument("--phi2", default="entangled",
                        help="'product', 'entangled', or a JSON amplitude matrix")
    p_locc.add_argument("--ancilla-dim", type=int, default=DEFAULT_ANCILLA, dest="ancilla_dim")
    p_locc.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                        help="decomposition search budget")
    p_locc.set_defaults(func=_cmd_locc)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2 on flag errors already
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (DiscriminationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - unexpected internal failure
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
