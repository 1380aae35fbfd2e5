"""Tests for the symmetric General Lotto core: payoffs, marginals, sampling."""

import numpy as np
import pytest

from lotto_precommit import (
    DegenerateBattlefieldError,
    GameDomainError,
    GLInstance,
    MarginalCDF,
    equilibrium_marginal,
    nominal_payoffs,
    payoff_fraction,
    residual_share,
    sample_allocation,
)


class TestPayoffFraction:
    def test_symmetric_budgets(self):
        assert payoff_fraction(1, 1) == 0.5

    def test_weaker_branch(self):
        assert payoff_fraction(1, 2) == 0.25

    def test_stronger_branch(self):
        assert payoff_fraction(2, 1) == 0.75

    @pytest.mark.parametrize("bad", [0.0, -1.0])
    def test_domain_errors_name_the_argument(self, bad):
        with pytest.raises(GameDomainError, match="x_own"):
            payoff_fraction(bad, 1.0)
        with pytest.raises(GameDomainError, match="x_opp"):
            payoff_fraction(1.0, bad)

    def test_complementarity_random_pairs(self):
        rng = np.random.default_rng(7)
        xs = rng.uniform(1e-3, 10.0, size=(10_000, 2))
        for x, y in xs:
            assert payoff_fraction(x, y) + payoff_fraction(y, x) == pytest.approx(1.0, abs=1e-12)

    def test_monotone_in_own_and_opponent_budget(self):
        # sign-only finite differences on a grid
        h = 1e-4
        grid = np.linspace(0.2, 4.0, 25)
        for x in grid:
            for y in grid:
                assert payoff_fraction(x + h, y) > payoff_fraction(x, y)
                assert payoff_fraction(x, y + h) < payoff_fraction(x, y)


class TestResidualShare:
    def test_degenerate_rules(self):
        assert residual_share(0.0, 1.0, own_wins_ties=True) == 0.0
        assert residual_share(1.0, 0.0, own_wins_ties=False) == 1.0
        assert residual_share(0.0, 0.0, own_wins_ties=True) == 1.0
        assert residual_share(0.0, 0.0, own_wins_ties=False) == 0.0

    def test_matches_payoff_fraction_inside_domain(self):
        assert residual_share(2.0, 1.0, own_wins_ties=True) == payoff_fraction(2.0, 1.0)

    def test_negative_budget_rejected(self):
        with pytest.raises(GameDomainError):
            residual_share(-0.1, 1.0, own_wins_ties=True)


class TestNominalPayoffs:
    def test_symmetric_game(self):
        game = GLInstance(1.0, 1.0, (0.5, 0.5))
        assert nominal_payoffs(game) == pytest.approx((0.5, 0.5))

    def test_fig2c_baseline_curve(self):
        # pre-committing player's budget fixed at X_B = 3, X_A varies below it
        for x_a in np.linspace(0.2, 3.0, 29):
            game = GLInstance(x_a, 3.0, (1 / 3, 1 / 3, 1 / 3))
            assert nominal_payoffs(game).payoff_b == pytest.approx(1 - x_a / 6.0, abs=1e-12)

    def test_direct_substitution(self):
        game = GLInstance(2.0, 1.0, (0.3, 0.7))
        assert nominal_payoffs(game).payoff_b == pytest.approx(0.25, abs=1e-12)

    def test_constant_sum_random_instances(self):
        rng = np.random.default_rng(11)
        for _ in range(500):
            n = rng.integers(1, 6)
            vals = tuple(rng.uniform(0.0, 2.0, n) + 1e-9)
            game = GLInstance(rng.uniform(0.1, 5), rng.uniform(0.1, 5), vals)
            pay = nominal_payoffs(game)
            assert pay.payoff_a + pay.payoff_b == pytest.approx(game.total_value, abs=1e-12)
            assert 0 <= pay.payoff_a <= game.total_value
            assert 0 <= pay.payoff_b <= game.total_value


class TestGLInstanceValidation:
    def test_rejects_nonpositive_budgets(self):
        with pytest.raises(GameDomainError):
            GLInstance(0.0, 1.0, (1.0,))
        with pytest.raises(GameDomainError):
            GLInstance(1.0, -2.0, (1.0,))

    def test_rejects_zero_total_value(self):
        with pytest.raises(GameDomainError):
            GLInstance(1.0, 1.0, (0.0, 0.0))

    def test_rejects_empty_battlefields(self):
        with pytest.raises(GameDomainError):
            GLInstance(1.0, 1.0, ())


class TestEquilibriumMarginal:
    def test_equal_budgets(self):
        game = GLInstance(1.0, 1.0, (0.5, 0.5))
        marg = equilibrium_marginal(game, "A", 0)
        assert marg.atom_at_zero == 0.0
        assert marg.support_upper == pytest.approx(1.0)
        assert marg.ramp_slope == pytest.approx(1.0)

    def test_weaker_player_atom(self):
        game = GLInstance(2.0, 1.0, (0.5, 0.5))
        marg = equilibrium_marginal(game, "B", 0)
        assert marg.atom_at_zero == pytest.approx(0.5)
        assert marg.support_upper == pytest.approx(2.0)
        assert marg.ramp_slope == pytest.approx(0.25)
        assert marg.cdf(marg.support_upper - 1e-12) == pytest.approx(1.0, abs=1e-9)

    def test_zero_value_battlefield_rejected(self):
        game = GLInstance(1.0, 1.0, (0.0, 1.0))
        with pytest.raises(DegenerateBattlefieldError):
            equilibrium_marginal(game, "A", 0)

    @pytest.mark.parametrize("player", ["A", "B"])
    def test_budget_spent_in_expectation(self, player):
        rng = np.random.default_rng(3)
        for _ in range(200):
            n = int(rng.integers(1, 5))
            vals = tuple(rng.uniform(0.05, 1.0, n))
            game = GLInstance(rng.uniform(0.2, 4), rng.uniform(0.2, 4), vals)
            total_mean = sum(
                equilibrium_marginal(game, player, b).mean() for b in range(n)
            )
            assert total_mean == pytest.approx(game.budget(player), abs=1e-10)

    def test_cdf_reaches_one_by_construction(self):
        game = GLInstance(1.7, 0.4, (0.2, 0.8))
        for player in ("A", "B"):
            for b in range(2):
                marg = equilibrium_marginal(game, player, b)
                top = marg.atom_at_zero + marg.ramp_slope * marg.support_upper
                assert top == pytest.approx(1.0, abs=1e-12)


class TestMarginalCDFValidation:
    def test_rejects_cdf_not_reaching_one(self):
        with pytest.raises(GameDomainError):
            MarginalCDF(0.2, 0.5, 1.0)

    def test_rejects_bad_atom(self):
        with pytest.raises(GameDomainError):
            MarginalCDF(1.5, 0.0, 0.0)


class TestSampleAllocation:
    def test_deterministic_per_seed(self):
        game = GLInstance(1.0, 2.0, (0.4, 0.6))
        a = sample_allocation(game, "B", seed=42, size=100)
        b = sample_allocation(game, "B", seed=42, size=100)
        assert np.array_equal(a, b)
        c = sample_allocation(game, "B", seed=43, size=100)
        assert not np.array_equal(a, c)

    def test_budget_in_expectation(self):
        game = GLInstance(1.3, 0.9, (0.25, 0.35, 0.4))
        for player in ("A", "B"):
            draws = sample_allocation(game, player, seed=5, size=100_000)
            mean_total = draws.sum(axis=1).mean()
            assert abs(mean_total - game.budget(player)) < 0.01 * game.budget(player)

    def test_weaker_player_atom_frequency(self):
        # atom 0.9: the weaker budget is a tenth of the stronger one
        game = GLInstance(10.0, 1.0, (1.0,))
        marg = equilibrium_marginal(game, "B", 0)
        assert marg.atom_at_zero == pytest.approx(0.9)
        draws = sample_allocation(game, "B", seed=17, size=10_000)
        assert (draws[:, 0] == 0.0).mean() >= 0.85

    def test_support_bound(self):
        game = GLInstance(2.0, 1.0, (0.5, 0.5))
        draws = sample_allocation(game, "A", seed=1, size=10_000)
        for b in range(2):
            marg = equilibrium_marginal(game, "A", b)
            assert draws[:, b].max() < marg.support_upper

    def test_zero_value_battlefield_gets_zero(self):
        game = GLInstance(1.0, 1.0, (0.0, 1.0))
        draws = sample_allocation(game, "A", seed=2, size=50)
        assert np.all(draws[:, 0] == 0.0)

    def test_single_draw_shape(self):
        game = GLInstance(1.0, 1.0, (1.0,))
        vec = sample_allocation(game, "A", seed=0)
        assert vec.shape == (1,)
