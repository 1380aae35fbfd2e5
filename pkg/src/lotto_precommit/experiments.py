"""Reproduction of the quantitative studies as plot-ready tables.

Three experiment families:

* the Monte Carlo comparison of single- vs two-battlefield pre-commitments
  over uniformly sampled valuations (500 samples per limit value);
* incentive-region sweeps over (X_A, X_B) for the symmetric game at a fixed
  limit value, including the budget-trace improvement curves;
* equilibrium-count / benefit-region sweeps for the asymmetric game over
  slices of (alpha, X_A, X_B).

Rows are plain dicts keyed by the CSV column names, emitted in a
deterministic order; identical configs (including the seed) produce
byte-identical tables.  Per-sample random streams are seeded by
seed XOR sample-index, so partitioning work across jobs cannot change any
result.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import GameDomainError
from .ggl import GGLInstance, find_zeros
from .ggl_precommit import beats_second_best, beats_unique, optimal_precommit_ggl
from .lotto import GLInstance, _residual_share_vec
from .precommit import (
    FEASIBILITY_RTOL,
    min_beneficial_value,
    optimal_single_precommit,
)

GL_REGION_COLUMNS = (
    "xa", "xb", "vbar", "phi", "incentive", "threshold",
    "sup_uB", "nominal_uB", "improvement_pct",
)
GGL_REGION_COLUMNS = (
    "alpha", "xa", "xb", "n_equilibria", "piB_best", "piB_second",
    "piB_worst", "verdict", "witness_b", "witness_p", "witness_uB",
)
MC_FIG5_COLUMNS = (
    "vbar", "n_samples", "mean_uB_single", "mean_uB_double", "pct_beneficial",
)

_DOUBLE_GRID_STEP = 5e-3
_DOUBLE_REFINE_ROUNDS = 2
_BENEFIT_MARGIN = 1e-9


@dataclass(frozen=True)
class Axis:
    """One swept parameter; steps == 1 pins the axis to its lower bound."""

    name: str
    lower: float
    upper: float
    steps: int

    def __post_init__(self) -> None:
        if self.steps < 1:
            raise GameDomainError(f"axis {self.name} needs at least one step")
        if self.steps > 1 and not self.upper > self.lower:
            raise GameDomainError(f"axis {self.name} has an empty range")

    def values(self) -> np.ndarray:
        if self.steps == 1:
            return np.array([self.lower])
        return np.linspace(self.lower, self.upper, self.steps)


@dataclass(frozen=True)
class SweepConfig:
    axes: tuple[Axis, ...]
    fixed: Mapping[str, float] = field(default_factory=dict)
    seed: int = 0
    jobs: int = 1


@dataclass(frozen=True)
class Fig5Config:
    n_samples: int = 500
    vbar_count: int = 21  # 0, 0.05, ..., 1
    budget_a: float = 1.0
    budget_b: float = 1.5
    n_battlefields: int = 3
    phi: float = 1.0
    seed: int = 0
    jobs: int = 1


@dataclass(frozen=True)
class MCResultRow:
    vbar: float
    n_samples: int
    mean_ub_single: float
    mean_ub_double: float
    pct_beneficial: float


# The asymmetric-game trace: improvement over the second-highest equilibrium
# peaks near 20 percent while staying within a fraction of a percent of the
# best equilibrium across the whole multi-equilibrium stretch.
FIG4C_ALPHA = 0.08
FIG4C_BUDGET_B = 2.0
FIG4C_XA_AXIS = Axis("xa", 0.1, 2.5, 97)


def sample_valuations_uniform(n: int, phi: float, seed: int) -> np.ndarray:
    """One draw from the uniform distribution on the fixed-total simplex.

    Built from n-1 sorted uniform spacings; the last coordinate absorbs the
    rounding residual so the coordinates sum to phi exactly.
    """
    if n < 2:
        raise GameDomainError("need at least two battlefields to sample the simplex")
    if not phi > 0:
        raise GameDomainError("phi must be positive")
    rng = np.random.default_rng(seed)
    cuts = np.sort(rng.random(n - 1))
    v = np.diff(np.concatenate([[0.0], cuts, [1.0]])) * phi
    v[-1] = phi - v[:-1].sum()
    return v


def _ub_two_battlefields(p1, p2, v1, v2, x_a, x_b, phi):
    """B's payoff against A's exact 4-subset response, vectorised over amounts."""
    v12 = v1 + v2
    rem = phi - v12
    res_b = np.maximum(x_b - (p1 + p2), 0.0)
    cap = x_a * (1.0 + FEASIBILITY_RTOL)
    u_empty = rem * _residual_share_vec(x_a, res_b, own_wins_ties=True)
    u_one = v1 + rem * _residual_share_vec(np.maximum(x_a - p1, 0.0), res_b, own_wins_ties=True)
    u_one = np.where(p1 <= cap, u_one, -np.inf)
    u_two = v2 + rem * _residual_share_vec(np.maximum(x_a - p2, 0.0), res_b, own_wins_ties=True)
    u_two = np.where(p2 <= cap, u_two, -np.inf)
    u_both = v12 + rem * _residual_share_vec(
        np.maximum(x_a - (p1 + p2), 0.0), res_b, own_wins_ties=True
    )
    u_both = np.where(p1 + p2 <= cap, u_both, -np.inf)
    u_a = np.maximum(np.maximum(u_empty, u_one), np.maximum(u_two, u_both))
    return phi - u_a


def _best_double_precommit(v1, v2, x_a, x_b, phi):
    """Grid-with-refinement maximum of the two-battlefield payoff."""
    step = _DOUBLE_GRID_STEP * x_b
    axis = np.arange(0.0, x_b + step / 2, step)
    p1, p2 = np.meshgrid(axis, axis, indexing="ij")
    feasible = p1 + p2 <= x_b * (1.0 + FEASIBILITY_RTOL)
    values = np.where(feasible, _ub_two_battlefields(p1, p2, v1, v2, x_a, x_b, phi), -np.inf)
    flat = int(np.argmax(values))
    best = (float(p1.ravel()[flat]), float(p2.ravel()[flat]), float(values.ravel()[flat]))
    for _ in range(_DOUBLE_REFINE_ROUNDS):
        c1, c2, _ = best
        lo1, hi1 = max(0.0, c1 - step), min(x_b, c1 + step)
        lo2, hi2 = max(0.0, c2 - step), min(x_b, c2 + step)
        step /= 20.0
        a1 = np.arange(lo1, hi1 + step / 2, step)
        a2 = np.arange(lo2, hi2 + step / 2, step)
        p1, p2 = np.meshgrid(a1, a2, indexing="ij")
        feasible = p1 + p2 <= x_b * (1.0 + FEASIBILITY_RTOL)
        values = np.where(feasible, _ub_two_battlefields(p1, p2, v1, v2, x_a, x_b, phi), -np.inf)
        flat = int(np.argmax(values))
        cand = (float(p1.ravel()[flat]), float(p2.ravel()[flat]), float(values.ravel()[flat]))
        if cand[2] > best[2]:
            best = cand
    return best[2]


def _fig5_row(args) -> MCResultRow:
    vbar, row_index, config = args
    x_a, x_b, phi = config.budget_a, config.budget_b, config.phi
    n = config.n_battlefields
    nominal = phi * (1.0 - float(_residual_share_vec(x_a, x_b, own_wins_ties=True)))
    singles = np.empty(config.n_samples)
    doubles = np.empty(config.n_samples)
    beneficial = 0
    for j in range(config.n_samples):
        stream = config.seed ^ (row_index * config.n_samples + j)
        v = sample_valuations_uniform(n, phi, stream)
        v12 = float(v[0] + v[1])
        if v12 > vbar:
            singles[j] = nominal
            doubles[j] = nominal
            continue
        merged = GLInstance(x_a, x_b, (v12, *map(float, v[2:])))
        _, sup, _ = optimal_single_precommit(merged, 0, epsilon=1e-6 * x_a)
        u_single = max(nominal, sup)
        u_double = max(nominal, _best_double_precommit(float(v[0]), float(v[1]), x_a, x_b, phi))
        singles[j] = u_single
        doubles[j] = u_double
        if u_single > nominal + _BENEFIT_MARGIN:
            beneficial += 1
    return MCResultRow(
        vbar=float(vbar),
        n_samples=config.n_samples,
        mean_ub_single=float(singles.mean()),
        mean_ub_double=float(doubles.mean()),
        pct_beneficial=100.0 * beneficial / config.n_samples,
    )


def _map_jobs(fn, items, jobs):
    if jobs <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def run_fig5(config: Fig5Config = Fig5Config()) -> list[MCResultRow]:
    """Monte Carlo comparison of merged-single vs two-battlefield pre-commitments."""
    vbars = np.linspace(0.0, config.phi, config.vbar_count)
    items = [(float(vbar), i, config) for i, vbar in enumerate(vbars)]
    return _map_jobs(_fig5_row, items, config.jobs)


def fig5_rows_as_dicts(rows: list[MCResultRow]) -> list[dict]:
    return [
        {
            "vbar": r.vbar,
            "n_samples": r.n_samples,
            "mean_uB_single": r.mean_ub_single,
            "mean_uB_double": r.mean_ub_double,
            "pct_beneficial": r.pct_beneficial,
        }
        for r in rows
    ]


def region_sweep_gl(config: SweepConfig) -> list[dict]:
    """Incentive classification and best-payoff columns over an (X_A, X_B) grid.

    The supremum column reports the best payoff available with an admissible
    single battlefield worth the limit value; cells without an incentive fall
    back to the nominal payoff (declining to pre-commit).
    """
    axes = {axis.name: axis for axis in config.axes}
    if set(axes) != {"xa", "xb"}:
        raise GameDomainError("gl region sweep needs axes named xa and xb")
    v_bar = float(config.fixed.get("vbar", 1.0))
    phi = float(config.fixed.get("phi", 1.0))
    if not 0.0 <= v_bar <= phi:
        raise GameDomainError(f"vbar must lie in [0, {phi}], got {v_bar}")
    xa_vals = axes["xa"].values()
    xb_vals = axes["xb"].values()
    xa, xb = np.meshgrid(xa_vals, xb_vals, indexing="ij")
    xa, xb = xa.ravel(), xb.ravel()
    gamma = xb / xa
    with np.errstate(divide="ignore", invalid="ignore"):
        threshold = np.where(
            gamma < 1.0,
            np.nan,
            np.where(gamma < 2.0, (1.0 - (xa / xb) / (3.0 - gamma)) * phi, (xa / xb) * phi),
        )
    nominal = phi * (1.0 - _residual_share_vec(xa, xb, own_wins_ties=True))
    sup_forced = phi - (phi - v_bar) * _residual_share_vec(
        xa, np.maximum(xb - xa, 0.0), own_wins_ties=True
    )
    incentive = (gamma > 1.0) & (v_bar > threshold)
    sup = np.where(incentive, sup_forced, nominal)
    improvement = np.where(incentive, 100.0 * (sup - nominal) / nominal, 0.0)
    rows = []
    for i in range(xa.size):
        rows.append(
            {
                "xa": float(xa[i]),
                "xb": float(xb[i]),
                "vbar": v_bar,
                "phi": phi,
                "incentive": bool(incentive[i]),
                "threshold": None if np.isnan(threshold[i]) else float(threshold[i]),
                "sup_uB": float(sup[i]),
                "nominal_uB": float(nominal[i]),
                "improvement_pct": float(improvement[i]),
            }
        )
    return rows


def _ggl_cell(args) -> dict:
    alpha, x_a, x_b = args
    game = GGLInstance(x_a, x_b, alpha)
    equilibria = find_zeros(game)
    pi_b = [p[1] for p in equilibria.payoffs]
    row = {
        "alpha": alpha,
        "xa": x_a,
        "xb": x_b,
        "n_equilibria": equilibria.count,
        "piB_best": pi_b[0],
        "piB_second": pi_b[1] if len(pi_b) > 1 else None,
        "piB_worst": pi_b[-1],
        "verdict": "none",
        "witness_b": None,
        "witness_p": None,
        "witness_uB": None,
    }
    if equilibria.count == 3:
        report = beats_second_best(game)
        row["verdict"] = "blue" if report.beats_second_best else "red"
    elif equilibria.count == 1:
        report = beats_unique(game)
        row["verdict"] = "green" if report.beats_unique else "none"
    else:
        return row  # boundary-degenerate cell: counts stay, no verdict
    if report.witness is not None:
        row["witness_b"] = report.witness.battlefield
        row["witness_p"] = report.witness.amount
        row["witness_uB"] = report.guaranteed_ub
    return row


def region_sweep_ggl(config: SweepConfig) -> list[dict]:
    """Equilibrium counts, ranked payoffs, and benefit verdicts over GGL slices.

    Any two of alpha / xa / xb may be swept; the third is fixed.  Verdict
    colors follow the region plots: green (unique equilibrium, beneficial),
    blue (three equilibria, beats the second best), red (three equilibria,
    no such pre-commitment), none otherwise.
    """
    axes = {axis.name: axis for axis in config.axes}
    if not set(axes) <= {"alpha", "xa", "xb"}:
        raise GameDomainError("ggl region sweep axes must be among alpha, xa, xb")
    values = {}
    for name in ("alpha", "xa", "xb"):
        if name in axes:
            values[name] = axes[name].values()
        elif name in config.fixed:
            values[name] = np.array([float(config.fixed[name])])
        else:
            raise GameDomainError(f"parameter {name} must be swept or fixed")
    cells = [
        (float(a), float(xa), float(xb))
        for a in values["alpha"]
        for xa in values["xa"]
        for xb in values["xb"]
    ]
    return _map_jobs(_ggl_cell, cells, config.jobs)


def fig4c_trace(jobs: int = 1) -> list[dict]:
    """The calibrated improvement trace behind the asymmetric-game figure."""
    config = SweepConfig(
        axes=(FIG4C_XA_AXIS,),
        fixed={"alpha": FIG4C_ALPHA, "xb": FIG4C_BUDGET_B},
        jobs=jobs,
    )
    rows = region_sweep_ggl(config)
    for row in rows:
        game = GGLInstance(row["xa"], row["xb"], row["alpha"])
        _, best = optimal_precommit_ggl(game)
        row["best_precommit_uB"] = best
        if row["n_equilibria"] == 3:
            row["improvement_over_second_pct"] = 100.0 * (best - row["piB_second"]) / row["piB_second"]
            row["margin_over_best_pct"] = 100.0 * (best - row["piB_best"]) / row["piB_best"]
        else:
            row["improvement_over_second_pct"] = None
            row["margin_over_best_pct"] = None
    return rows
