"""Tests for the independent verification oracles."""

import numpy as np
import pytest

from lotto_precommit import (
    EnumerationCapError,
    GameDomainError,
    GLInstance,
    equilibrium_marginal,
    nominal_payoffs,
)
from lotto_precommit.ggl import GGLInstance, count_equilibria, equilibrium_payoffs, find_zeros, ggl_marginals
from lotto_precommit.oracle import (
    GridSpec,
    best_precommit_grid,
    best_precommit_grid_ggl,
    best_response_brute,
    gl_benefit_grid,
    payoff_by_quadrature,
    run_verification_suite,
    win_probability,
    zeros_by_sign_scan,
)
from lotto_precommit.precommit import (
    PreCommitment,
    best_response_A,
    min_beneficial_value,
    optimal_single_precommit,
)


def _gl_marginals(game):
    n = game.n_battlefields
    return (
        [equilibrium_marginal(game, "A", b) for b in range(n)],
        [equilibrium_marginal(game, "B", b) for b in range(n)],
    )


class TestGridSpec:
    def test_refined_step(self):
        grid = GridSpec(0.0, 1.0, 0.1, refinement_depth=3)
        assert grid.refined_step == pytest.approx(1e-4)

    def test_validation(self):
        with pytest.raises(GameDomainError):
            GridSpec(1.0, 0.0, 0.1)
        with pytest.raises(GameDomainError):
            GridSpec(0.0, 1.0, -0.1)

    def test_points_cover_range(self):
        pts = GridSpec(0.0, 1.0, 0.25).points()
        assert np.allclose(pts, [0, 0.25, 0.5, 0.75, 1.0])


class TestQuadrature:
    def test_symmetric_instance(self):
        game = GLInstance(1.0, 1.0, (0.5, 0.5))
        pay = payoff_by_quadrature(*_gl_marginals(game), game.valuations)
        assert pay.payoff_a == pytest.approx(0.5, abs=1e-6)
        assert pay.payoff_b == pytest.approx(0.5, abs=1e-6)

    def test_two_to_one_budgets(self):
        game = GLInstance(2.0, 1.0, (0.5, 0.5))
        pay = payoff_by_quadrature(*_gl_marginals(game), game.valuations)
        assert pay.payoff_a == pytest.approx(0.75, abs=1e-6)
        assert pay.payoff_b == pytest.approx(0.25, abs=1e-6)

    def test_gl_oracle_equivalence_100_random(self):
        rng = np.random.default_rng(100)
        for _ in range(100):
            n = int(rng.integers(1, 5))
            vals = tuple(rng.dirichlet(np.ones(n)))
            game = GLInstance(rng.uniform(0.2, 4), rng.uniform(0.2, 4), vals)
            pay = payoff_by_quadrature(*_gl_marginals(game), vals)
            ref = nominal_payoffs(game)
            assert pay.payoff_a == pytest.approx(ref.payoff_a, abs=1e-6)
            assert pay.payoff_b == pytest.approx(ref.payoff_b, abs=1e-6)

    def test_ggl_payoffs_at_verified_zeros(self):
        rng = np.random.default_rng(7)
        checked = 0
        while checked < 50:
            game = GGLInstance(rng.uniform(0.3, 3), rng.uniform(0.3, 3), rng.uniform(0.05, 0.5))
            for sigma in find_zeros(game).zeros:
                marg = ggl_marginals(sigma, game)
                pay = payoff_by_quadrature(
                    marg.marginals_a, marg.marginals_b, game.valuations_a, game.valuations_b
                )
                pi_a, pi_b = equilibrium_payoffs(sigma, game)
                assert pay.payoff_a == pytest.approx(pi_a, abs=1e-5)
                assert pay.payoff_b == pytest.approx(pi_b, abs=1e-5)
                checked += 1

    def test_panel_error_non_increasing(self):
        rng = np.random.default_rng(55)
        for _ in range(10):
            n = int(rng.integers(2, 4))
            vals = tuple(rng.dirichlet(np.ones(n)))
            game = GLInstance(rng.uniform(0.3, 3), rng.uniform(0.3, 3), vals)
            ma, mb = _gl_marginals(game)
            ref = nominal_payoffs(game).payoff_a
            errs = [
                abs(payoff_by_quadrature(ma, mb, vals, panels=p).payoff_a - ref)
                for p in (1_000, 10_000, 100_000)
            ]
            # the integrand is piecewise linear, so midpoint is exact up to
            # roundoff; the error must never grow with panel count
            assert errs[0] + 1e-12 >= errs[1]
            assert errs[1] + 1e-12 >= errs[2]

    def test_malformed_input_rejected(self):
        game = GLInstance(1.0, 1.0, (0.5, 0.5))
        ma, mb = _gl_marginals(game)
        with pytest.raises(GameDomainError):
            payoff_by_quadrature(ma, mb, (0.5,))
        with pytest.raises(GameDomainError):
            payoff_by_quadrature([1.0, 2.0], mb, game.valuations)

    def test_win_probability_complementarity(self):
        game = GLInstance(1.7, 0.6, (0.4, 0.6))
        ma, mb = _gl_marginals(game)
        for a, b in zip(ma, mb):
            assert win_probability(a, b) + (1 - win_probability(a, b)) == 1.0
            p_b_wins = 1.0 - win_probability(a, b)
            assert 0.0 <= p_b_wins <= 1.0


class TestBruteForce:
    def test_singleton_two_candidates(self):
        game = GLInstance(1.0, 1.0, (0.6, 0.4))
        pc = PreCommitment({0: 0.5})
        resp, u = best_response_brute(pc, game)
        match_u = 0.6 + 0.4 * ((1 - 0.5) / (2 * (1 - 0.5)))
        withdraw_u = 0.4 * (1.0 / (2 * 0.5))
        assert u == pytest.approx(max(match_u, withdraw_u))

    def test_exact_agreement_with_engine(self):
        rng = np.random.default_rng(42)
        for _ in range(1000):
            n = int(rng.integers(1, 7))
            vals = tuple(rng.dirichlet(np.ones(n)))
            game = GLInstance(rng.uniform(0.3, 3), rng.uniform(0.3, 3), vals)
            budget = game.budget_b * rng.uniform(0, 1)
            weights = rng.dirichlet(np.ones(n))
            pc = PreCommitment({b: budget * w for b, w in enumerate(weights)})
            _, u_engine = best_response_A(pc, game)
            _, u_brute = best_response_brute(pc, game)
            assert u_engine == u_brute

    def test_all_singletons_unmatchable(self):
        game = GLInstance(0.5, 2.0, (0.3, 0.3, 0.4))
        pc = PreCommitment({0: 0.6, 1: 0.6, 2: 0.6})
        resp, _ = best_response_brute(pc, game)
        assert resp.matched == frozenset()

    def test_size_cap(self):
        game = GLInstance(1.0, 1.0, tuple([1.0] * 21))
        pc = PreCommitment({b: 0.01 for b in range(21)})
        with pytest.raises(EnumerationCapError):
            best_response_brute(pc, game)


class TestBestPrecommitGrid:
    def test_threshold_onset_at_gamma_three_halves(self):
        for v_b, expect in ((5 / 9 + 0.01, True), (5 / 9 - 0.01, False)):
            game = GLInstance(2.0, 3.0, (v_b, 1.0 - v_b))
            _, u = best_precommit_grid(game, 0)
            assert (u > nominal_payoffs(game).payoff_b + 1e-9) is expect

    def test_monotone_refinement_toward_supremum(self):
        game = GLInstance(1.0, 1.5, (0.6, 0.4))
        _, sup, _ = optimal_single_precommit(game, 0)
        values = []
        for step in (1e-2, 1e-3, 1e-4):
            _, u = best_precommit_grid(
                game, 0, GridSpec(0.0, 1.5, step * 1.5), refine_transitions=False
            )
            values.append(u)
        assert values[0] <= values[1] + 1e-12 <= values[2] + 2e-12
        assert all(v <= sup + 1e-12 for v in values)
        assert sup - values[-1] < 1e-3

    def test_weaker_never_beats_nominal(self):
        rng = np.random.default_rng(8)
        for _ in range(30):
            x_a = rng.uniform(0.5, 2.0)
            game = GLInstance(x_a, x_a * rng.uniform(0.1, 0.99), (0.7, 0.3))
            _, u = best_precommit_grid(game, 0)
            assert u <= nominal_payoffs(game).payoff_b + 1e-9

    def test_matches_analytic_supremum(self):
        rng = np.random.default_rng(17)
        for _ in range(25):
            gamma = rng.uniform(1.05, 3.0)
            thr = min_beneficial_value(1.0, gamma)
            v_b = rng.uniform(min(thr + 0.02, 0.9), 0.95)
            game = GLInstance(1.0, gamma, (v_b, 1.0 - v_b))
            _, sup, _ = optimal_single_precommit(game, 0)
            _, u_grid = best_precommit_grid(game, 0)
            assert u_grid == pytest.approx(sup, abs=1e-6)


class TestBenefitGrid:
    def test_matches_classifier_off_boundary(self):
        from lotto_precommit.precommit import classify_incentive

        rng = np.random.default_rng(23)
        x_a = rng.uniform(0.3, 3.0, 300)
        x_b = rng.uniform(0.3, 3.0, 300)
        v_bar = 0.55
        verdicts = gl_benefit_grid(x_a, x_b, v_bar)
        for xa, xb, v in zip(x_a, x_b, verdicts):
            thr = min_beneficial_value(xa, xb)
            if thr is not None and abs(v_bar - thr) < 1e-3:
                continue
            assert v == classify_incentive(xa, xb, v_bar).has_incentive


class TestSignScan:
    def test_single_bracket_at_alpha_half(self):
        game = GGLInstance(1.3, 0.7, 0.5)
        assert len(zeros_by_sign_scan(game)) == 1

    def test_brackets_contain_finder_roots(self):
        rng = np.random.default_rng(31)
        for _ in range(100):
            game = GGLInstance(rng.uniform(0.3, 3), rng.uniform(0.3, 3), rng.uniform(0.03, 0.5))
            eq = find_zeros(game)
            if eq.degenerate:
                continue
            brackets = zeros_by_sign_scan(game)
            assert len(brackets) == eq.count
            for (lo, hi), z in zip(brackets, eq.zeros):
                assert lo - 1e-12 <= z <= hi + 1e-12

    def test_uniform_gridspec_scan(self):
        game = GGLInstance(2.0, 1.0, 0.25)
        grid = GridSpec(1e-4, 10.0, 1e-3, refinement_depth=1)
        brackets = zeros_by_sign_scan(game, grid)
        assert len(brackets) == 1
        assert brackets[0][0] <= 14 / 3 <= brackets[0][1]

    def test_lattice_agreement_with_classifier(self):
        mismatch = 0
        total = 0
        for alpha in np.linspace(0.05, 0.5, 30):
            for ratio in np.linspace(0.2, 1.5, 30):
                game = GGLInstance(1.0, ratio, alpha)
                total += 1
                if count_equilibria(game) != len(zeros_by_sign_scan(game)):
                    mismatch += 1
        assert mismatch / total <= 0.005


class TestGGLGridSearch:
    def test_reaches_witness_value(self):
        from lotto_precommit.ggl_precommit import beats_second_best

        game = GGLInstance(1.0, 0.98, 0.15)
        report = beats_second_best(game)
        _, u1 = best_precommit_grid_ggl(game, 1)
        assert u1 >= report.guaranteed_ub - 1e-9

    def test_weaker_battlefield2_max_at_zero(self):
        game = GGLInstance(1.0, 0.8, 0.3)
        p, u = best_precommit_grid_ggl(game, 2)
        assert u == pytest.approx(0.28, abs=1e-9)
        assert p == pytest.approx(0.0, abs=1e-6)


class TestVerificationSuite:
    def test_all_reports_pass(self):
        reports = run_verification_suite()
        assert reports
        for report in reports:
            assert report.passed, f"{report.quantity}: gap {report.gap} > tol {report.tolerance}"
