"""Pre-commitments in the asymmetric two-battlefield game.

Player B may commit p in [0, X_B] to one battlefield; A matches (securing it)
or withdraws (ceding it), then the other battlefield is contested with the
remaining budgets.  Unlike the symmetric game the interaction is not
constant-sum, so A's tie-breaking convention matters: at exact indifference A
withdraws, the limit of the open withdraw interval.

The headline results: battlefield-2 pre-commitments by a weaker B are
dominated by every nominal equilibrium; battlefield-1 pre-commitments at the
match/withdraw indifference point beat the second-highest of three nominal
equilibrium payoffs whenever X_B/X_A exceeds sqrt(8a/(1-a)) - 2a/(1-a); a
band of weaker budget ratios beats even the unique nominal equilibrium.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import GameDomainError, InfeasibleResponseError
from .ggl import GGLInstance, count_equilibria, find_zeros
from .lotto import _residual_share_vec, residual_share

# Absolute payoff-difference tolerance under which A is treated as
# indifferent (and withdraws); absorbs roundoff at analytic indifference
# points, where the withdraw branch is the correct limit.
INDIFFERENCE_TOL = 1e-12

_GRID_STEP = 1e-4
_REFINED_STEP = 1e-8


class Response(enum.Enum):
    MATCH = "match"
    WITHDRAW = "withdraw"


@dataclass(frozen=True)
class GGLPreCommit:
    """Amount committed to one battlefield (1-based, as in the game diagram)."""

    battlefield: int
    amount: float

    def __post_init__(self) -> None:
        if self.battlefield not in (1, 2):
            raise GameDomainError(f"battlefield must be 1 or 2, got {self.battlefield!r}")
        if not (math.isfinite(self.amount) and self.amount >= 0):
            raise GameDomainError(f"amount must be finite and >= 0, got {self.amount!r}")


@dataclass(frozen=True)
class BenefitReport:
    """Verdict on whether a pre-commitment beats an equilibrium benchmark."""

    beats_second_best: bool | None
    beats_unique: bool | None
    witness: GGLPreCommit | None
    guaranteed_ub: float
    benchmark: float
    basis: str  # "analytic" | "empirical"


def _check_amount(pc: GGLPreCommit, game: GGLInstance) -> None:
    if pc.amount > game.budget_b * (1.0 + 1e-12):
        raise GameDomainError(
            f"amount {pc.amount} exceeds X_B = {game.budget_b}"
        )


def _match_value(p: float, b: int, game: GGLInstance) -> float:
    """Match payoff formula without the p <= X_A feasibility gate."""
    v_ab = game.valuations_a[b]
    return v_ab + (1.0 - v_ab) * residual_share(
        max(game.budget_a - p, 0.0), max(game.budget_b - p, 0.0), own_wins_ties=True
    )


def _withdraw_value(p: float, b: int, game: GGLInstance) -> float:
    v_ab = game.valuations_a[b]
    return (1.0 - v_ab) * residual_share(
        game.budget_a, max(game.budget_b - p, 0.0), own_wins_ties=True
    )


def uA_match(pc: GGLPreCommit, game: GGLInstance) -> float:
    """A's payoff from matching; requires p <= X_A."""
    _check_amount(pc, game)
    if pc.amount > game.budget_a:
        raise InfeasibleResponseError(
            f"cannot match {pc.amount} with X_A = {game.budget_a}"
        )
    return _match_value(pc.amount, pc.battlefield - 1, game)


def uA_withdraw(pc: GGLPreCommit, game: GGLInstance) -> float:
    """A's payoff from withdrawing: it cedes the battlefield and keeps its budget."""
    _check_amount(pc, game)
    return _withdraw_value(pc.amount, pc.battlefield - 1, game)


def response_A(pc: GGLPreCommit, game: GGLInstance) -> Response:
    """A's optimal response; exact indifference resolves to Withdraw."""
    _check_amount(pc, game)
    if pc.amount > game.budget_a:
        return Response.WITHDRAW
    b = pc.battlefield - 1
    diff = _match_value(pc.amount, b, game) - _withdraw_value(pc.amount, b, game)
    return Response.MATCH if diff > INDIFFERENCE_TOL else Response.WITHDRAW


def uB_ggl(pc: GGLPreCommit, game: GGLInstance) -> float:
    """B's payoff given A's optimal response."""
    b = pc.battlefield - 1
    v_bb = game.valuations_b[b]
    p = pc.amount
    if response_A(pc, game) is Response.MATCH:
        return (1.0 - v_bb) * residual_share(
            max(game.budget_b - p, 0.0), max(game.budget_a - p, 0.0), own_wins_ties=False
        )
    return v_bb + (1.0 - v_bb) * residual_share(
        max(game.budget_b - p, 0.0), game.budget_a, own_wins_ties=False
    )


def _ub_grid(p: np.ndarray, b: int, game: GGLInstance) -> np.ndarray:
    """Vectorised uB_ggl along a grid of amounts."""
    x_a, x_b = game.budget_a, game.budget_b
    v_ab = game.valuations_a[b]
    v_bb = game.valuations_b[b]
    res_a = np.maximum(x_a - p, 0.0)
    res_b = np.maximum(x_b - p, 0.0)
    match_a = v_ab + (1.0 - v_ab) * _residual_share_vec(res_a, res_b, own_wins_ties=True)
    withdraw_a = (1.0 - v_ab) * _residual_share_vec(x_a, res_b, own_wins_ties=True)
    matches = (p <= x_a) & (match_a - withdraw_a > INDIFFERENCE_TOL)
    ub_match = (1.0 - v_bb) * _residual_share_vec(res_b, res_a, own_wins_ties=False)
    ub_withdraw = v_bb + (1.0 - v_bb) * _residual_share_vec(res_b, x_a, own_wins_ties=False)
    return np.where(matches, ub_match, ub_withdraw)


def indifference_points(game: GGLInstance, battlefield: int = 1) -> list[float]:
    """Closed-form amounts on battlefield 1 making A indifferent.

    Weaker B: the two roots p- <= p+ of the match/withdraw crossing, when the
    radicand is non-negative (empty list otherwise -- A matches everywhere).
    Stronger B: the single crossing, whose form depends on whether the ratio
    exceeds (1+alpha)/(1-alpha).
    """
    if battlefield != 1:
        raise GameDomainError("indifference points are defined on battlefield 1")
    a = game.alpha
    x_a, x_b = game.budget_a, game.budget_b
    ratio = x_b / x_a
    if ratio <= 1.0:
        t = ratio + 2.0 * a / (1.0 - a)
        radicand = t * t - 8.0 * a / (1.0 - a)
        if radicand < 0:
            return []
        root = math.sqrt(radicand)
        return [x_a / 2.0 * (t - root), x_a / 2.0 * (t + root)]
    if ratio >= (1.0 + a) / (1.0 - a):
        return [2.0 * a / (1.0 + a) * x_b]
    c = 1.0 - a
    rad = (1.0 - 3.0 * a) ** 2 + 4.0 * c * c * (ratio - 1.0)
    return [x_b - x_a / (2.0 * c) * ((1.0 - 3.0 * a) + math.sqrt(rad))]


def lemma3_dominated(game: GGLInstance) -> bool:
    """Verify that battlefield-2 pre-commitments by a weaker B are futile.

    True when the best battlefield-2 payoff over a dense amount grid stays
    strictly below the worst nominal equilibrium payoff.
    """
    if game.budget_b > game.budget_a:
        raise GameDomainError("lemma3_dominated requires X_B <= X_A")
    grid = np.linspace(0.0, game.budget_b, 2001)
    best = float(np.max(_ub_grid(grid, 1, game)))
    worst_eq = min(p[1] for p in find_zeros(game).payoffs)
    return best < worst_eq


def _second_best_threshold(alpha: float) -> float:
    return math.sqrt(8.0 * alpha / (1.0 - alpha)) - 2.0 * alpha / (1.0 - alpha)


def beats_second_best(game: GGLInstance) -> BenefitReport:
    """Theorem-level verdict against the second-highest of three equilibria."""
    equilibria = find_zeros(game)
    if equilibria.count != 3:
        raise GameDomainError(
            "beats_second_best requires three equilibria; use beats_unique instead"
        )
    benchmark = equilibria.second_b
    ratio = game.budget_b / game.budget_a
    condition = ratio > 1.0 or ratio >= _second_best_threshold(game.alpha)
    if condition:
        # p- for weaker B; the single stronger-case crossing otherwise
        witness = GGLPreCommit(1, indifference_points(game)[0])
        guaranteed = uB_ggl(witness, game)
        return BenefitReport(True, None, witness, guaranteed, benchmark, "analytic")
    _, best = optimal_precommit_ggl(game)
    return BenefitReport(False, None, None, best, benchmark, "analytic")


def beats_unique(game: GGLInstance) -> BenefitReport:
    """Verdict against the unique nominal equilibrium payoff.

    Inside the sufficient band of budget ratios the verdict is analytic (a
    withdrawal-forcing indifference point guarantees at least 1 - alpha);
    outside it the verdict falls back to a grid search and is labelled
    empirical.
    """
    equilibria = find_zeros(game)
    if equilibria.count != 1:
        raise GameDomainError(
            "beats_unique requires a unique equilibrium; use beats_second_best instead"
        )
    benchmark = equilibria.payoffs[0][1]
    a = game.alpha
    ratio = game.budget_b / game.budget_a
    lo = _second_best_threshold(a)
    hi = min(1.0, math.sqrt((1.0 - a) / (3.0 * a)))
    if lo <= ratio < hi:
        witness = GGLPreCommit(1, indifference_points(game)[0])
        guaranteed = uB_ggl(witness, game)
        return BenefitReport(None, True, witness, guaranteed, benchmark, "analytic")
    best_pc, best = optimal_precommit_ggl(game)
    beats = best > benchmark + 1e-9
    return BenefitReport(
        None, beats, best_pc if beats else None, best, benchmark, "empirical"
    )


def _transition_candidates(b: int, game: GGLInstance) -> list[float]:
    """Bisect match/withdraw sign changes of A's payoff gap along [0, X_B]."""
    x_a, x_b = game.budget_a, game.budget_b
    hi_p = min(x_a, x_b)
    grid = np.linspace(0.0, hi_p, 513)
    diffs = np.array([_match_value(p, b, game) - _withdraw_value(p, b, game) for p in grid])
    out = []
    signs = np.sign(diffs)
    for i in np.flatnonzero(signs[:-1] * signs[1:] < 0):
        lo, hi = float(grid[i]), float(grid[i + 1])
        f_lo = diffs[i]
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            f_mid = _match_value(mid, b, game) - _withdraw_value(mid, b, game)
            if f_lo * f_mid <= 0:
                hi = mid
            else:
                lo, f_lo = mid, f_mid
        out.append(0.5 * (lo + hi))
    return out


def optimal_precommit_ggl(
    game: GGLInstance, epsilon: float | None = None
) -> tuple[GGLPreCommit, float]:
    """Best pre-commitment over both battlefields and all amounts.

    Maximises over a candidate set of analytic indifference points, response
    transitions, endpoints, the just-past-X_A forcing point, and a refined
    dense grid.
    """
    x_a, x_b = game.budget_a, game.budget_b
    if epsilon is None:
        epsilon = 1e-6 * x_a
    if not epsilon > 0:
        raise GameDomainError(f"epsilon must be positive, got {epsilon!r}")
    best_pc: GGLPreCommit | None = None
    best_val = -np.inf
    for b in (0, 1):
        candidates = {0.0, x_b, min(x_a, x_b)}
        if x_a + epsilon <= x_b:
            candidates.add(x_a + epsilon)
        if b == 0:
            candidates.update(p for p in indifference_points(game) if 0 <= p <= x_b)
        candidates.update(_transition_candidates(b, game))

        step = _GRID_STEP * x_b
        grid = np.linspace(0.0, x_b, int(round(1.0 / _GRID_STEP)) + 1)
        for _ in range(3):
            values = _ub_grid(grid, b, game)
            top = int(np.argmax(values))
            lo = max(0.0, grid[top] - step)
            hi = min(x_b, grid[top] + step)
            step = max(step / 100.0, _REFINED_STEP * x_b)
            grid = np.linspace(lo, hi, 201)
        candidates.add(float(grid[int(np.argmax(_ub_grid(grid, b, game)))]))

        cand = np.array(sorted(candidates))
        vals = _ub_grid(cand, b, game)
        idx = int(np.argmax(vals))
        if float(vals[idx]) > best_val:
            best_val = float(vals[idx])
            best_pc = GGLPreCommit(b + 1, float(cand[idx]))
    assert best_pc is not None
    return best_pc, best_val
