"""Symmetric-valuation General Lotto games: payoffs and equilibrium marginals.

The one-shot game GL(X_A, X_B, v) has a unique equilibrium payoff pair.  The
winning share of the total value phi accruing to a player with budget x
against an opponent with budget y is

    L(x, y) = x / (2y)          if 0 < x <= y
    L(x, y) = 1 - y / (2x)      if x > y

and the equilibrium marginal allocation on each battlefield is a uniform ramp
for the stronger player, plus a point mass at zero for the weaker player.
Ties at zero allocation are awarded to player A.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, NamedTuple

import numpy as np

from .errors import DegenerateBattlefieldError, GameDomainError

Player = Literal["A", "B"]

# Tolerance for the CDF-reaches-one construction invariant.
_CDF_TOL = 1e-12


def payoff_fraction(x_own: float, x_opp: float) -> float:
    """Equilibrium share of the total value won by the x_own player.

    Both budgets must be strictly positive; use :func:`residual_share` for
    the degenerate residual games that arise after pre-commitments.
    """
    if not x_own > 0:
        raise GameDomainError(f"x_own must be positive, got {x_own!r}")
    if not x_opp > 0:
        raise GameDomainError(f"x_opp must be positive, got {x_opp!r}")
    if x_own <= x_opp:
        return x_own / (2.0 * x_opp)
    return 1.0 - x_opp / (2.0 * x_own)


def residual_share(x_own: float, x_opp: float, *, own_wins_ties: bool) -> float:
    """Continuous extension of the winning share to exhausted budgets.

    An exhausted player concedes the whole remaining value; a 0-0 residual is
    resolved by the tie rule (player A wins ties, so pass own_wins_ties=True
    when computing A's share).
    """
    if x_own < 0 or x_opp < 0:
        raise GameDomainError(f"residual budgets must be non-negative, got ({x_own!r}, {x_opp!r})")
    if x_own == 0.0 and x_opp == 0.0:
        return 1.0 if own_wins_ties else 0.0
    if x_own == 0.0:
        return 0.0
    if x_opp == 0.0:
        return 1.0
    return payoff_fraction(x_own, x_opp)


def _residual_share_vec(x_own, x_opp, *, own_wins_ties: bool) -> np.ndarray:
    """Vectorised residual_share; negative entries come back 0 for the caller to mask."""
    x_own, x_opp = np.broadcast_arrays(np.asarray(x_own, float), np.asarray(x_opp, float))
    shape = x_own.shape
    x_own = np.atleast_1d(x_own)
    x_opp = np.atleast_1d(x_opp)
    out = np.zeros(x_own.shape)
    both = (x_own == 0.0) & (x_opp == 0.0)
    opp0 = (x_own > 0.0) & (x_opp == 0.0)
    weak = (x_own > 0.0) & (x_opp > 0.0) & (x_own <= x_opp)
    strong = (x_own > 0.0) & (x_opp > 0.0) & (x_own > x_opp)
    out[both] = 1.0 if own_wins_ties else 0.0
    out[opp0] = 1.0
    out[weak] = x_own[weak] / (2.0 * x_opp[weak])
    out[strong] = 1.0 - x_opp[strong] / (2.0 * x_own[strong])
    return out.reshape(shape)


class PayoffPair(NamedTuple):
    payoff_a: float
    payoff_b: float


@dataclass(frozen=True)
class GLInstance:
    """Two budgets plus a common valuation vector.

    Valuations may sum to any positive total phi; marginal constructions
    normalise them internally so the per-battlefield means add up to the
    budget (the budget constraint binds in expectation).
    """

    budget_a: float
    budget_b: float
    valuations: tuple[float, ...]

    def __post_init__(self) -> None:
        if not (math.isfinite(self.budget_a) and self.budget_a > 0):
            raise GameDomainError(f"budget_a must be positive, got {self.budget_a!r}")
        if not (math.isfinite(self.budget_b) and self.budget_b > 0):
            raise GameDomainError(f"budget_b must be positive, got {self.budget_b!r}")
        vals = tuple(float(v) for v in self.valuations)
        object.__setattr__(self, "valuations", vals)
        if len(vals) < 1:
            raise GameDomainError("need at least one battlefield")
        if any(not math.isfinite(v) or v < 0 for v in vals):
            raise GameDomainError("valuations must be finite and non-negative")
        if not sum(vals) > 0:
            raise GameDomainError("total value must be positive")

    @property
    def n_battlefields(self) -> int:
        return len(self.valuations)

    @property
    def total_value(self) -> float:
        return float(np.sum(self.valuations))

    def budget(self, player: Player) -> float:
        return self.budget_a if player == "A" else self.budget_b

    def normalized_valuations(self) -> tuple[float, ...]:
        phi = self.total_value
        return tuple(v / phi for v in self.valuations)


@dataclass(frozen=True)
class MarginalCDF:
    """Atom at zero plus a linear ramp reaching one at support_upper."""

    atom_at_zero: float
    ramp_slope: float
    support_upper: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.atom_at_zero <= 1.0:
            raise GameDomainError(f"atom must be a probability, got {self.atom_at_zero!r}")
        if self.ramp_slope < 0 or self.support_upper < 0:
            raise GameDomainError("ramp slope and support must be non-negative")
        top = self.atom_at_zero + self.ramp_slope * self.support_upper
        if abs(top - 1.0) > _CDF_TOL:
            raise GameDomainError(f"CDF must reach 1 at the support bound, got {top!r}")

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        out = self.atom_at_zero + self.ramp_slope * np.clip(x, 0.0, self.support_upper)
        return np.where(x < 0, 0.0, np.minimum(out, 1.0))

    def mean(self) -> float:
        return self.ramp_slope * self.support_upper**2 / 2.0


def nominal_payoffs(game: GLInstance) -> PayoffPair:
    """Equilibrium payoffs (pi_A, pi_B) of the one-shot game; sums to phi."""
    phi = game.total_value
    share_a = payoff_fraction(game.budget_a, game.budget_b)
    return PayoffPair(phi * share_a, phi * (1.0 - share_a))


def equilibrium_marginal(game: GLInstance, player: Player, battlefield: int) -> MarginalCDF:
    """Per-battlefield equilibrium allocation distribution for one player.

    Valuations are normalised to unit total before the construction; the
    support on battlefield b is [0, 2 * X_strong * v_b).
    """
    v_hat = game.normalized_valuations()[battlefield]
    if v_hat == 0.0:
        raise DegenerateBattlefieldError(
            f"battlefield {battlefield} has zero value; no marginal is defined"
        )
    x_strong = max(game.budget_a, game.budget_b)
    x_weak = min(game.budget_a, game.budget_b)
    support = 2.0 * x_strong * v_hat
    if game.budget(player) >= x_strong:
        # stronger side (equal budgets degenerate to a zero atom)
        return MarginalCDF(0.0, 1.0 / support, support)
    atom = 1.0 - x_weak / x_strong
    slope = x_weak / (2.0 * x_strong**2 * v_hat)
    return MarginalCDF(atom, slope, support)


def sample_allocation(game: GLInstance, player: Player, seed: int, size: int | None = None):
    """Draw allocations from the equilibrium marginals, independent across battlefields.

    Returns a vector of length n, or a (size, n) matrix.  Zero-value
    battlefields receive zero.  The draw is deterministic per seed; use
    distinct seeds for concurrent streams.
    """
    rng = np.random.default_rng(seed)
    n_draws = 1 if size is None else int(size)
    out = np.zeros((n_draws, game.n_battlefields))
    for b in range(game.n_battlefields):
        if game.normalized_valuations()[b] == 0.0:
            continue
        marg = equilibrium_marginal(game, player, b)
        u = rng.random(n_draws)
        with np.errstate(divide="ignore", invalid="ignore"):
            ramp = (u - marg.atom_at_zero) / marg.ramp_slope
        out[:, b] = np.where(u < marg.atom_at_zero, 0.0, ramp)
    return out[0] if size is None else out
