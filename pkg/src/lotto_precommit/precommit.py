"""Pre-commitments in symmetric General Lotto games.

Player B publicly commits amounts to a target set of battlefields; player A
responds by matching a subset (securing those battlefields at their posted
price) and withdrawing from the rest, which are awarded to B; the remaining
battlefields are then played as a one-shot game with the leftover budgets:

    u_A(matched M) = v_M + (phi - v_P) * L(X_A - p_M, X_B - p_P)

A's optimal response maximises this over feasible subsets (p_M <= X_A), and
u_B = phi - u_A.  Beneficial pre-commitments require B to be strictly
stronger and to overcommit a single high-value battlefield past X_A, forcing
a withdrawal; the minimum battlefield value admitting a benefit depends only
on the budget ratio gamma = X_B / X_A.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import (
    DegenerateBattlefieldError,
    EnumerationCapError,
    GameDomainError,
    InfeasibleResponseError,
    ResponseStructureError,
)
from .lotto import GLInstance, _residual_share_vec, residual_share

# A's subset enumeration is exact up to this many targets; beyond it the
# randomized/grid oracle must be used instead.
ENUMERATION_CAP = 24

# Relative slack absorbing float accumulation when checking budget feasibility.
FEASIBILITY_RTOL = 1e-12

# Grid used by the numerical maximisation over a single pre-commitment.
GRID_STEP_FRACTION = 1e-4
REFINED_STEP_FRACTION = 1e-8


@dataclass(frozen=True)
class PreCommitment:
    """Committed amounts keyed by battlefield index; empty means no commitment."""

    amounts: Mapping[int, float]

    def __post_init__(self) -> None:
        cleaned = {int(b): float(p) for b, p in self.amounts.items()}
        object.__setattr__(self, "amounts", cleaned)
        for b, p in cleaned.items():
            if not math.isfinite(p) or p < 0:
                raise GameDomainError(f"amount on battlefield {b} must be finite and >= 0, got {p!r}")

    @property
    def targets(self) -> frozenset[int]:
        return frozenset(self.amounts)

    @property
    def total(self) -> float:
        return _ordered_sum(self.amounts[b] for b in sorted(self.amounts))


@dataclass(frozen=True)
class MatchResponse:
    matched: frozenset[int]
    spent: float


@dataclass(frozen=True)
class IncentiveReport:
    """Theorem-style classification of whether any beneficial pre-commitment exists."""

    has_incentive: bool
    threshold: float | None
    regime: str  # "weaker" | "mid" | "strong"


def _ordered_sum(values: Iterable[float]) -> float:
    total = 0.0
    for v in values:
        total += v
    return total


def _share_a_vec(x_a, x_b) -> np.ndarray:
    """Vectorised residual_share from A's perspective (A wins 0-0 ties)."""
    return _residual_share_vec(x_a, x_b, own_wins_ties=True)


def _validate_targets(pc: PreCommitment, game: GLInstance) -> list[int]:
    targets = sorted(pc.amounts)
    for b in targets:
        if not 0 <= b < game.n_battlefields:
            raise ResponseStructureError(f"battlefield {b} is not part of the game")
    if pc.total > game.budget_b * (1.0 + FEASIBILITY_RTOL):
        raise InfeasibleResponseError(
            f"pre-commitment total {pc.total} exceeds X_B = {game.budget_b}"
        )
    return targets


def payoff_A_given_match(pc: PreCommitment, matched: Iterable[int], game: GLInstance) -> float:
    """Player A's payoff for matching exactly the given subset of targets."""
    targets = _validate_targets(pc, game)
    matched = frozenset(int(b) for b in matched)
    if not matched <= set(targets):
        raise ResponseStructureError(f"matched set {sorted(matched)} is not a subset of the targets")
    p_matched = _ordered_sum(pc.amounts[b] for b in sorted(matched))
    if p_matched > game.budget_a * (1.0 + FEASIBILITY_RTOL):
        raise InfeasibleResponseError(
            f"matching spends {p_matched}, more than X_A = {game.budget_a}"
        )
    v_matched = _ordered_sum(game.valuations[b] for b in sorted(matched))
    v_targets = _ordered_sum(game.valuations[b] for b in targets)
    phi = game.total_value
    share = residual_share(
        max(game.budget_a - p_matched, 0.0),
        max(game.budget_b - pc.total, 0.0),
        own_wins_ties=True,
    )
    return v_matched + (phi - v_targets) * share


def best_response_A(pc: PreCommitment, game: GLInstance) -> tuple[MatchResponse, float]:
    """Player A's optimal match/withdraw response, by exhaustive enumeration.

    Ties between subsets are broken towards the larger matched value (then
    the smaller bitmask), which is payoff-neutral for B in the constant-sum
    game.
    """
    targets = _validate_targets(pc, game)
    k = len(targets)
    if k > ENUMERATION_CAP:
        raise EnumerationCapError(
            f"{k} targets exceed the exact enumeration cap ({ENUMERATION_CAP}); "
            "use the randomized search in the oracle module"
        )
    n_masks = 1 << k
    masks = np.arange(n_masks, dtype=np.uint32)
    v_m = np.zeros(n_masks)
    p_m = np.zeros(n_masks)
    # accumulate in ascending battlefield order so subset sums are
    # bit-identical to a sequential loop over sorted indices
    for i, b in enumerate(targets):
        bit = ((masks >> i) & 1).astype(bool)
        v_m = v_m + np.where(bit, game.valuations[b], 0.0)
        p_m = p_m + np.where(bit, pc.amounts[b], 0.0)
    p_total = pc.total
    phi = game.total_value
    v_targets = float(v_m[-1]) if k else 0.0
    feasible = p_m <= game.budget_a * (1.0 + FEASIBILITY_RTOL)
    shares = _share_a_vec(
        np.maximum(game.budget_a - p_m, 0.0), max(game.budget_b - p_total, 0.0)
    )
    u = v_m + (phi - v_targets) * shares
    u[~feasible] = -np.inf
    best_u = u.max()
    cand = np.flatnonzero(u == best_u)
    cand = cand[np.lexsort((cand, -v_m[cand]))]
    best_mask = int(cand[0])
    matched = frozenset(b for i, b in enumerate(targets) if best_mask >> i & 1)
    spent = _ordered_sum(pc.amounts[b] for b in sorted(matched))
    return MatchResponse(matched, spent), float(best_u)


def payoff_B(pc: PreCommitment, game: GLInstance) -> float:
    """B's payoff against A's optimal response (constant-sum complement)."""
    _, u_a = best_response_A(pc, game)
    return game.total_value - u_a


def min_beneficial_value(x_a: float, x_b: float, phi: float = 1.0) -> float | None:
    """Minimum single-battlefield value that admits a beneficial pre-commitment.

    Returns None when B is strictly weaker (no benefit at any value).  A
    beneficial pre-commitment exists iff the limit value strictly exceeds
    the returned threshold and X_B > X_A.
    """
    if not x_a > 0 or not x_b > 0:
        raise GameDomainError(f"budgets must be positive, got ({x_a!r}, {x_b!r})")
    if not phi > 0:
        raise GameDomainError(f"total value must be positive, got {phi!r}")
    gamma = x_b / x_a
    if gamma < 1.0:
        return None
    if gamma < 2.0:
        return (1.0 - (x_a / x_b) / (3.0 - gamma)) * phi
    return (x_a / x_b) * phi


def classify_incentive(x_a: float, x_b: float, v_bar: float, phi: float = 1.0) -> IncentiveReport:
    """Does any valuation vector with a pre-committable value <= v_bar admit a benefit?"""
    if not 0.0 <= v_bar <= phi:
        raise GameDomainError(f"limit value must lie in [0, {phi}], got {v_bar!r}")
    threshold = min_beneficial_value(x_a, x_b, phi)
    if x_b < x_a:
        regime = "weaker"
    elif x_b < 2.0 * x_a:
        regime = "mid"
    else:
        regime = "strong"
    # equality of budgets leaves no feasible p > X_A, so no incentive there
    has = x_b > x_a and threshold is not None and v_bar > threshold
    return IncentiveReport(has, threshold, regime)


def _single_uB(x_a: float, x_b: float, phi: float, v_b: float, p) -> np.ndarray:
    """B's payoff for a single-battlefield pre-commitment p (vectorised)."""
    p = np.asarray(p, dtype=float)
    u_match = v_b + (phi - v_b) * _share_a_vec(x_a - p, x_b - p)
    u_match = np.where(p <= x_a, u_match, -np.inf)
    u_withdraw = (phi - v_b) * _share_a_vec(np.broadcast_to(x_a, p.shape), x_b - p)
    return phi - np.maximum(u_match, u_withdraw)


def _indifference_candidates(x_a: float, x_b: float, phi: float, v_b: float) -> list[float]:
    """Closed-form interior points where A is indifferent between match and withdraw."""
    out = []
    if phi - v_b > 0:
        # low-value regime: withdrawal leaves B still the stronger side
        out.append(2.0 * v_b * x_b / (phi + v_b))
        gamma = x_b / x_a
        if gamma >= 1.0:
            rad = (phi - 3.0 * v_b) ** 2 + 4.0 * (phi - v_b) ** 2 * (gamma - 1.0)
            out.append(
                x_b - x_a / (2.0 * (phi - v_b)) * ((phi - 3.0 * v_b) + math.sqrt(rad))
            )
    return [p for p in out if 0.0 <= p <= min(x_a, x_b)]


def _numeric_indifference(x_a: float, x_b: float, phi: float, v_b: float) -> list[float]:
    """Sign-change bisection of u_match - u_withdraw as a backstop locator."""
    hi = min(x_a, x_b)
    grid = np.linspace(0.0, hi, 257)
    diff = (v_b + (phi - v_b) * _share_a_vec(x_a - grid, x_b - grid)) - (
        phi - v_b
    ) * _share_a_vec(np.full_like(grid, x_a), x_b - grid)
    roots = []
    signs = np.sign(diff)
    for i in np.flatnonzero(signs[:-1] * signs[1:] < 0):
        lo_p, hi_p = grid[i], grid[i + 1]
        f_lo = diff[i]
        for _ in range(80):
            mid = 0.5 * (lo_p + hi_p)
            f_mid = float(
                v_b
                + (phi - v_b) * residual_share(x_a - mid, x_b - mid, own_wins_ties=True)
                - (phi - v_b) * residual_share(x_a, x_b - mid, own_wins_ties=True)
            )
            if f_lo * f_mid <= 0:
                hi_p = mid
            else:
                lo_p, f_lo = mid, f_mid
        roots.append(0.5 * (lo_p + hi_p))
    return roots


def optimal_single_precommit(
    game: GLInstance, battlefield: int, epsilon: float | None = None
) -> tuple[float, float, bool]:
    """Supremum of u_B over pre-commitments to a single battlefield.

    Returns (p, u_B, attained).  When the supremum is a right-limit at
    p -> X_A from above, the returned p is the epsilon-achieving point
    X_A + epsilon and attained is False; the returned u_B is the supremum
    itself.
    """
    v_b = game.valuations[battlefield]
    if v_b == 0.0:
        raise DegenerateBattlefieldError(
            f"battlefield {battlefield} has zero value; pre-committing to it is undefined"
        )
    x_a, x_b, phi = game.budget_a, game.budget_b, game.total_value
    if epsilon is None:
        epsilon = 1e-6 * x_a
    if not epsilon > 0:
        raise GameDomainError(f"epsilon must be positive, got {epsilon!r}")

    candidates = {0.0, x_b, min(x_a, x_b)}
    candidates.update(_indifference_candidates(x_a, x_b, phi, v_b))
    candidates.update(_numeric_indifference(x_a, x_b, phi, v_b))

    # coarse grid with two refinement rounds around the best cell
    step = GRID_STEP_FRACTION * x_b
    grid = np.linspace(0.0, x_b, int(round(1.0 / GRID_STEP_FRACTION)) + 1)
    for _ in range(3):
        values = _single_uB(x_a, x_b, phi, v_b, grid)
        best = int(np.argmax(values))
        lo = max(0.0, grid[best] - step)
        hi = min(x_b, grid[best] + step)
        step = max(step / 100.0, REFINED_STEP_FRACTION * x_b)
        grid = np.linspace(lo, hi, 201)
    candidates.add(float(grid[int(np.argmax(_single_uB(x_a, x_b, phi, v_b, grid)))]))

    cand = np.array(sorted(candidates))
    cand_values = _single_uB(x_a, x_b, phi, v_b, cand)
    best_idx = int(np.argmax(cand_values))
    best_p, best_u = float(cand[best_idx]), float(cand_values[best_idx])

    if x_b > x_a:
        right_limit = phi - (phi - v_b) * residual_share(
            x_a, x_b - x_a, own_wins_ties=True
        )
        if right_limit > best_u:
            if epsilon >= x_b - x_a:
                raise GameDomainError(
                    f"epsilon = {epsilon} does not fit inside (X_A, X_B] = "
                    f"({x_a}, {x_b}]"
                )
            return x_a + epsilon, right_limit, False
    return best_p, best_u, True


def reduce_to_single(pc: PreCommitment, game: GLInstance) -> tuple[float, GLInstance]:
    """Merge a multi-battlefield pre-commitment into a single-battlefield one.

    The merged instance carries one battlefield of value v_P plus the
    untouched battlefields; the returned single pre-commitment never lowers
    B's payoff (up to bisection tolerance).
    """
    targets = _validate_targets(pc, game)
    if not targets:
        raise GameDomainError("cannot reduce an empty pre-commitment")
    if len(targets) == 1:
        return pc.amounts[targets[0]], game

    response, _ = best_response_A(pc, game)
    v_targets = _ordered_sum(game.valuations[b] for b in targets)
    p_total = pc.total
    merged_vals = (v_targets,) + tuple(
        v for b, v in enumerate(game.valuations) if b not in set(targets)
    )
    merged = GLInstance(game.budget_a, game.budget_b, merged_vals)

    uniform = response.matched == set(targets) or not response.matched
    if uniform or p_total > game.budget_a:
        return p_total, merged

    # partial match with p_P <= X_A: lower the unmatched block until A is
    # indifferent between matching only its block and matching everything
    matched = sorted(response.matched)
    p_head = _ordered_sum(pc.amounts[b] for b in matched)
    v_head = _ordered_sum(game.valuations[b] for b in matched)
    p_tail = p_total - p_head
    phi = game.total_value
    x_a, x_b = game.budget_a, game.budget_b

    def gap(s: float) -> float:
        f = v_head + (phi - v_targets) * residual_share(
            max(x_a - p_head, 0.0), max(x_b - p_head - s, 0.0), own_wins_ties=True
        )
        g = v_targets + (phi - v_targets) * residual_share(
            max(x_a - p_head - s, 0.0), max(x_b - p_head - s, 0.0), own_wins_ties=True
        )
        return g - f

    lo, hi = 0.0, p_tail
    if gap(hi) > 0:
        # optimality of the partial response should preclude this; guard
        # against roundoff at the boundary
        s_star = p_tail
    else:
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if gap(mid) > 0:
                lo = mid
            else:
                hi = mid
            if hi - lo <= 1e-16 * max(1.0, p_tail):
                break
        s_star = hi
    return p_head + s_star, merged
