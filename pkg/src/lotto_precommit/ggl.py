"""Two-battlefield asymmetric-valuation General Lotto games.

GGL(X_A, X_B, alpha) mirrors the players' valuations through a single
parameter alpha in (0, 1/2]: player A values the battlefields (alpha,
1-alpha) while player B values them (1-alpha, alpha).  Every equilibrium
corresponds to a zero of a piecewise solution function S(sigma) whose middle
piece is cubic, so the game admits either one or three payoff-distinct
equilibria.  sigma relates the players' equilibrium aggressiveness via
lambda_B = sigma * lambda_A.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import ConvergenceError, GameDomainError, InvalidEquilibriumError
from .lotto import MarginalCDF

# Zeros closer than this are merged and the instance flagged as sitting on a
# classification boundary (tangency of the middle cubic).
MERGE_TOL = 1e-8


@dataclass(frozen=True)
class GGLInstance:
    budget_a: float
    budget_b: float
    alpha: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.budget_a) and self.budget_a > 0):
            raise GameDomainError(f"budget_a must be positive, got {self.budget_a!r}")
        if not (math.isfinite(self.budget_b) and self.budget_b > 0):
            raise GameDomainError(f"budget_b must be positive, got {self.budget_b!r}")
        if not 0.0 < self.alpha <= 0.5:
            raise GameDomainError(f"alpha must lie in (0, 1/2], got {self.alpha!r}")

    @property
    def valuations_a(self) -> tuple[float, float]:
        return (self.alpha, 1.0 - self.alpha)

    @property
    def valuations_b(self) -> tuple[float, float]:
        return (1.0 - self.alpha, self.alpha)

    @property
    def budget_ratio(self) -> float:
        """r = X_A / X_B, the scale entering the solution function."""
        return self.budget_a / self.budget_b

    @property
    def value_sum_k(self) -> float:
        """K = (1-alpha)^2/alpha + alpha^2/(1-alpha)."""
        a = self.alpha
        return (1.0 - a) ** 2 / a + a**2 / (1.0 - a)

    @property
    def breakpoints(self) -> tuple[float, float]:
        """Interval edges alpha/(1-alpha) and (1-alpha)/alpha of S."""
        a = self.alpha
        return (a / (1.0 - a), (1.0 - a) / a)


@dataclass(frozen=True)
class EquilibriumSet:
    """Zeros of S in ascending order with per-zero payoffs, best-for-B first.

    pi_B decreases along sigma, so ascending zeros rank B's payoffs from best
    to worst.  count is 1 or 3 except on measure-zero tangency boundaries,
    where merged zeros are flagged degenerate.
    """

    zeros: tuple[float, ...]
    payoffs: tuple[tuple[float, float], ...]
    count: int
    degenerate: bool = False

    def ranked_for_b(self) -> tuple[tuple[float, float], ...]:
        return self.payoffs

    @property
    def best_b(self) -> float:
        return self.payoffs[0][1]

    @property
    def second_b(self) -> float:
        if self.count < 2:
            raise GameDomainError("second-ranked payoff requires multiple equilibria")
        return self.payoffs[1][1]

    @property
    def worst_b(self) -> float:
        return self.payoffs[-1][1]


@dataclass(frozen=True)
class GGLMarginals:
    priority_set: frozenset[int]
    lambda_a: float
    lambda_b: float
    marginals_a: tuple[MarginalCDF, MarginalCDF]
    marginals_b: tuple[MarginalCDF, MarginalCDF]


def solution_function(sigma, game: GGLInstance):
    """Evaluate the piecewise solution function S; zeros index equilibria."""
    scalar = np.isscalar(sigma)
    s = np.atleast_1d(np.asarray(sigma, dtype=float))
    if np.any(s <= 0):
        raise GameDomainError("sigma must be positive")
    a = game.alpha
    r = game.budget_ratio
    k = game.value_sum_k
    left, right = game.breakpoints
    c2 = a**2 / (1.0 - a)
    out = np.where(
        s < left,
        s**2 * (s * k - r),
        np.where(
            s < right,
            c2 * (s**3 - r) + a * s * (1.0 - r * s),
            s - r * k,
        ),
    )
    return float(out[0]) if scalar else out


def _middle_piece(sigma: float, game: GGLInstance) -> float:
    a = game.alpha
    r = game.budget_ratio
    c2 = a**2 / (1.0 - a)
    return c2 * (sigma**3 - r) + a * sigma * (1.0 - r * sigma)


def _middle_derivative(sigma: float, game: GGLInstance) -> float:
    a = game.alpha
    r = game.budget_ratio
    return 3.0 * a**2 / (1.0 - a) * sigma**2 + a - 2.0 * a * r * sigma


def critical_points(game: GGLInstance) -> tuple[float, float] | None:
    """Stationary points (local max, local min) of the middle cubic piece.

    Returns None when the middle piece is strictly monotone, i.e. when
    (X_A/X_B)^2 < 3 alpha / (1 - alpha).
    """
    a = game.alpha
    r = game.budget_ratio
    radicand = r**2 - 3.0 * a / (1.0 - a)
    if radicand < 0:
        return None
    root = math.sqrt(radicand)
    scale = (1.0 - a) / (3.0 * a)
    return (scale * (r - root), scale * (r + root))


def count_equilibria(game: GGLInstance) -> int:
    """1 or 3 per the sign of S at the relevant critical point."""
    crit = critical_points(game)
    if crit is None:
        return 1
    sigma_minus, sigma_plus = crit
    ratio_b = game.budget_b / game.budget_a
    if ratio_b <= 1.0:
        return 3 if solution_function(sigma_minus, game) > 0 else 1
    return 3 if solution_function(sigma_plus, game) < 0 else 1


def sigma_scan_upper(game: GGLInstance) -> float:
    """Analytic upper bound for the zero search (third piece is affine)."""
    return 10.0 * max(1.0, game.budget_ratio) * game.value_sum_k


def find_zeros(game: GGLInstance, tol: float = 1e-12) -> EquilibriumSet:
    """Locate every zero of S: closed forms on the outer pieces, bracketed
    root finding on the middle cubic, Newton polish to |S| <= tol."""
    if not tol >= 1e-14:
        raise GameDomainError(f"tol must be at least 1e-14, got {tol!r}")
    r = game.budget_ratio
    k = game.value_sum_k
    left, right = game.breakpoints
    zeros: list[float] = []

    first = r / k
    if first < left:
        zeros.append(first)
    third = r * k
    if third >= right:
        zeros.append(third)

    if left < right:
        points = [left]
        crit = critical_points(game)
        if crit is not None:
            points.extend(p for p in crit if left < p < right)
        points.append(right)
        points = sorted(points)
        values = [_middle_piece(p, game) for p in points]
        for (lo, hi), (f_lo, f_hi) in zip(zip(points, points[1:]), zip(values, values[1:])):
            if f_lo == 0.0:
                zeros.append(lo)
            if f_lo * f_hi < 0:
                root = brentq(_middle_piece, lo, hi, args=(game,), xtol=1e-15, rtol=9e-16)
                zeros.append(float(root))
        if values[-1] == 0.0 and right > left:
            # the right breakpoint belongs to the third piece; covered above
            pass

    # Newton polish and residual check
    polished: list[float] = []
    for z in zeros:
        s_val = solution_function(z, game)
        if left <= z < right:
            for _ in range(4):
                if abs(s_val) <= tol:
                    break
                d = _middle_derivative(z, game)
                if d == 0:
                    break
                z = z - s_val / d
                s_val = solution_function(z, game)
        if abs(s_val) > max(tol, 1e-10):
            raise ConvergenceError(
                f"zero candidate {z} has residual {s_val}, above {max(tol, 1e-10)}"
            )
        polished.append(z)
    polished.sort()

    merged: list[float] = []
    degenerate = False
    for z in polished:
        if merged and z - merged[-1] < MERGE_TOL:
            degenerate = True
            merged[-1] = 0.5 * (merged[-1] + z)
        else:
            merged.append(z)

    expected = count_equilibria(game)
    if len(merged) != expected:
        degenerate = True

    payoffs = tuple(equilibrium_payoffs(z, game) for z in merged)
    return EquilibriumSet(tuple(merged), payoffs, len(merged), degenerate)


def equilibrium_payoffs(sigma_star: float, game: GGLInstance) -> tuple[float, float]:
    """(pi_A, pi_B) for a verified zero sigma_star, by its interval."""
    resid = solution_function(sigma_star, game)
    if abs(resid) > 1e-8:
        raise InvalidEquilibriumError(
            f"sigma = {sigma_star} is not a zero of S (residual {resid})"
        )
    a = game.alpha
    k = game.value_sum_k
    left, right = game.breakpoints
    if sigma_star < left:
        pi_a = sigma_star / 2.0 * k
        pi_b = 1.0 - sigma_star / 2.0
    elif sigma_star < right:
        pi_a = 1.0 - a - a / (2.0 * sigma_star) + a**2 * sigma_star / (2.0 * (1.0 - a))
        pi_b = 1.0 - a - a * sigma_star / 2.0 + a**2 / (2.0 * sigma_star * (1.0 - a))
    else:
        pi_a = 1.0 - 1.0 / (2.0 * sigma_star)
        pi_b = 1.0 / (2.0 * sigma_star) * k
    return (pi_a, pi_b)


def ggl_marginals(sigma_star: float, game: GGLInstance) -> GGLMarginals:
    """Per-battlefield equilibrium allocation distributions at a zero of S.

    The priority set collects the battlefields where B competes more
    aggressively; A abandons each of them with probability
    1 - (v_Ab / v_Bb) * sigma.
    """
    resid = solution_function(sigma_star, game)
    if abs(resid) > 1e-8:
        raise InvalidEquilibriumError(
            f"sigma = {sigma_star} is not a zero of S (residual {resid})"
        )
    v_a = game.valuations_a
    v_b = game.valuations_b
    omega = frozenset(b for b in (0, 1) if v_b[b] / v_a[b] >= sigma_star)
    lam_a = (
        sum(v_a[b] for b in sorted(omega))
        + sum(v_b[b] ** 2 / v_a[b] for b in (0, 1) if b not in omega) / sigma_star**2
    ) / (2.0 * game.budget_b)
    lam_b = sigma_star * lam_a

    cdfs_a: list[MarginalCDF] = []
    cdfs_b: list[MarginalCDF] = []
    for b in (0, 1):
        if b in omega:
            # atom is 0 at the sigma = v_B/v_A boundary; clamp roundoff
            atom = max(0.0, 1.0 - v_a[b] / v_b[b] * sigma_star)
            support = v_a[b] / lam_a
            cdfs_a.append(MarginalCDF(atom, lam_b / v_b[b], support))
            cdfs_b.append(MarginalCDF(0.0, lam_a / v_a[b], support))
        else:
            atom = max(0.0, 1.0 - v_b[b] / (v_a[b] * sigma_star))
            support = v_b[b] / lam_b
            cdfs_a.append(MarginalCDF(0.0, lam_b / v_b[b], support))
            cdfs_b.append(MarginalCDF(atom, lam_a / v_a[b], support))
    return GGLMarginals(omega, lam_a, lam_b, tuple(cdfs_a), tuple(cdfs_b))
