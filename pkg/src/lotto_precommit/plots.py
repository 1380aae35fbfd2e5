"""Optional figure rendering next to the delimited sweep output.

Each function consumes the row dicts produced by the experiments module and
writes a PNG; the data tables stay the primary artifact.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_VERDICT_COLORS = {
    "green": "#2ca02c",
    "blue": "#1f77b4",
    "red": "#d62728",
    "none": "#d9d9d9",
}


def _unique_sorted(values):
    return np.unique(np.asarray(values, dtype=float))


def plot_gl_region(rows: list[dict], path: str) -> None:
    """Incentive region / improvement heat map, or a trace when one axis is flat."""
    xa = _unique_sorted([r["xa"] for r in rows])
    xb = _unique_sorted([r["xb"] for r in rows])
    fig, ax = plt.subplots(figsize=(6, 5))
    if xa.size > 1 and xb.size > 1:
        grid = np.full((xa.size, xb.size), np.nan)
        index = {(round(a, 12), round(b, 12)): r for r in rows for a, b in [(r["xa"], r["xb"])]}
        for i, a in enumerate(xa):
            for j, b in enumerate(xb):
                row = index[(round(a, 12), round(b, 12))]
                grid[i, j] = row["improvement_pct"] if row["incentive"] else np.nan
        mesh = ax.pcolormesh(xa, xb, grid.T, shading="nearest", cmap="viridis")
        fig.colorbar(mesh, ax=ax, label="improvement over nominal (%)")
        ax.set_xlabel("$X_A$")
        ax.set_ylabel("$X_B$")
        ax.set_title(f"incentive region, limit value {rows[0]['vbar']:g}")
    else:
        axis_name, values = ("xa", [r["xa"] for r in rows]) if xa.size > 1 else ("xb", [r["xb"] for r in rows])
        improvement = [r["improvement_pct"] for r in rows]
        ax.plot(values, improvement, lw=1.5)
        ax.set_xlabel(f"${axis_name[0].upper()}_{axis_name[1].upper()}$")
        ax.set_ylabel("improvement over nominal (%)")
        ax.set_title(f"pre-commitment improvement, limit value {rows[0]['vbar']:g}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_ggl_region(rows: list[dict], path: str) -> None:
    """Verdict-colored parameter region (green / blue / red / none)."""
    names = [n for n in ("alpha", "xa", "xb") if len(_unique_sorted([r[n] for r in rows])) > 1]
    fig, ax = plt.subplots(figsize=(6, 5))
    if len(names) >= 2:
        x_name, y_name = names[0], names[1]
        for verdict, color in _VERDICT_COLORS.items():
            sub = [r for r in rows if r["verdict"] == verdict]
            if sub:
                ax.scatter(
                    [r[x_name] for r in sub],
                    [r[y_name] for r in sub],
                    c=color, s=8, marker="s", label=verdict, linewidths=0,
                )
        ax.set_xlabel(x_name)
        ax.set_ylabel(y_name)
        ax.legend(loc="best", fontsize=8)
        ax.set_title("equilibrium multiplicity and pre-commitment benefits")
    else:
        x_name = names[0] if names else "xa"
        xs = [r[x_name] for r in rows]
        ax.plot(xs, [r["piB_best"] for r in rows], label="best equilibrium", lw=1.2)
        second = [(x, r["piB_second"]) for x, r in zip(xs, rows) if r["piB_second"] is not None]
        if second:
            ax.plot(*zip(*second), label="second-highest", lw=1.2)
        ax.plot(xs, [r["piB_worst"] for r in rows], label="worst equilibrium", lw=1.2)
        best_pc = [(x, r["best_precommit_uB"]) for x, r in zip(xs, rows) if "best_precommit_uB" in r]
        if best_pc:
            ax.plot(*zip(*best_pc), "--", label="best pre-commitment", lw=1.4)
        ax.set_xlabel(x_name)
        ax.set_ylabel("payoff to the pre-committing player")
        ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_fig5(rows: list[dict], path: str) -> None:
    """Mean payoffs and benefit percentage against the limit value."""
    vbar = [r["vbar"] for r in rows]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    ax1.plot(vbar, [r["mean_uB_single"] for r in rows], "o-", ms=3, label="single battlefield")
    ax1.plot(vbar, [r["mean_uB_double"] for r in rows], "s-", ms=3, label="two battlefields")
    ax1.set_xlabel("limit value")
    ax1.set_ylabel("mean payoff")
    ax1.legend()
    ax2.plot(vbar, [r["pct_beneficial"] for r in rows], "o-", ms=3)
    ax2.set_xlabel("limit value")
    ax2.set_ylabel("samples with a benefit (%)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
