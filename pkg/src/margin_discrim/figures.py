"""Figure rendering for the success-probability curves.

Kept separate from the CLI so matplotlib is only imported when a figure
file is actually requested.
"""

from __future__ import annotations


def save_curve_figure(rows, fidelity: float, path: str) -> None:
    """Render the four success-probability curves against the margin.

    ``rows`` is the list of curve rows produced by the CLI: margin,
    strong and weak optima, and the two constant reference levels.
    """
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    m = [row.m for row in rows]
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.plot(m, [row.p_strong for row in rows], "-", color="tab:blue",
            label="strong margin")
    ax.plot(m, [row.p_weak for row in rows], ":", color="tab:red", lw=2,
            label="weak margin")
    ax.axhline(rows[0].p_unambiguous, color="gray", lw=0.8, ls="--",
               label="unambiguous")
    ax.axhline(rows[0].p_minimum_error, color="black", lw=0.8, ls="--",
               label="minimum error")
    ax.set_xlabel("error margin m")
    ax.set_ylabel("success probability")
    ax.set_title(f"fidelity = {fidelity:g}")
    ax.set_xlim(0.0, 1.0)
    ax.set_ylim(0.0, 1.0)
    ax.legend(loc="lower right", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
