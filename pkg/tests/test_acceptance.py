"""End-to-end reproductions of the published foraging and company results."""

import numpy as np
import pytest

from producer_scrounger import (
    CappedLinear,
    CompanyParams,
    EssClassification,
    ExpSaturating,
    ForagingParams,
    Linear,
    analytic_ess,
    chicken_interval,
    chicken_matrix,
    choose_c0,
    closed_form_pi_star,
    company_family,
    company_game,
    derivative_check,
    detect_rc,
    find_ess,
    foraging_family,
    foraging_game,
    gamma_bounds,
    modified_foraging_family,
    necessary_condition_check,
    pi_star_derivative,
    sweep,
)
from producer_scrounger.core.foraging import mean_inv_one_plus, mean_ratio
from producer_scrounger.core.oracle import BinomialSpec, brute_mean_inv_one_plus, brute_mean_ratio
from producer_scrounger.core.suites import (
    chicken_regime_checks,
    company_suite,
    foraging_suite,
    modified_foraging_suite,
)


def _row_at(table, gamma):
    return min(table, key=lambda row: abs(row.gamma - gamma))


def _non_decreasing(values, tol=1e-12):
    return all(b >= a - tol for a, b in zip(values, values[1:]))


class TestForagingReproduction:
    """Reverse Correlation in the Foraging game."""

    def test_two_animals(self):
        table = sweep(foraging_family(2, 0.5), 0.0, 5.0, 0.01)
        for row in table:
            if row.gamma < 2.995:
                assert row.pi_star == pytest.approx(1 + row.gamma, abs=1e-6)
            elif row.gamma > 3.005:
                assert row.pi_star == pytest.approx(row.gamma, abs=1e-6)
        drop = _row_at(table, 2.75).pi_star - _row_at(table, 3.25).pi_star
        assert drop == pytest.approx(0.5, abs=0.02)

    def test_three_animals(self):
        bounds = gamma_bounds(3, 0.4)
        table = sweep(foraging_family(3, 0.4), 0.0, 3.0, 0.01)
        found = detect_rc(table, min_drop=1e-3)
        assert found
        for interval in found:
            assert bounds.gamma1 - 0.01 <= interval.gamma_lo
            assert interval.gamma_hi <= bounds.gamma2 + 0.01
        at_gamma1 = find_ess(foraging_game(ForagingParams(3, 0.4, bounds.gamma1)))
        at_gamma2 = find_ess(foraging_game(ForagingParams(3, 0.4, bounds.gamma2)))
        assert at_gamma1.pi_star == pytest.approx(5 / 3, abs=1e-4)
        assert at_gamma2.pi_star == pytest.approx(1.5, abs=1e-4)

    @pytest.mark.slow
    @pytest.mark.parametrize("s,has_rc", [(0.2, True), (0.4, True), (0.6, False)])
    def test_four_animals(self, s, has_rc):
        # pi* = gamma + p*, so RC needs dp*/dgamma < -1; at s = 0.6 it stays above
        bounds = gamma_bounds(4, s)
        table = sweep(foraging_family(4, s), 0.0, 3.0, 0.01)
        shares = [row.p_star for row in table]
        assert all(b <= a + 1e-9 for a, b in zip(shares, shares[1:]))
        if bounds.gamma1 >= 0:
            assert find_ess(foraging_game(ForagingParams(4, s, bounds.gamma1))).p_star == pytest.approx(1.0, abs=1e-6)
        assert find_ess(foraging_game(ForagingParams(4, s, bounds.gamma2))).p_star == pytest.approx(0.0, abs=1e-6)
        assert bool(detect_rc(table, min_drop=1e-6)) is has_rc

    @pytest.mark.slow
    @pytest.mark.parametrize("n", [2, 3, 4])
    @pytest.mark.parametrize("s", [0.2, 0.4, 0.6])
    def test_numeric_matches_analytic(self, n, s):
        table = sweep(foraging_family(n, s), 0.0, 5.0, 0.01)
        for row in table:
            if row.classification is EssClassification.DEGENERATE:
                continue
            exact = analytic_ess(ForagingParams(n, s, row.gamma))
            assert abs(row.p_star - exact.p_star) <= 1e-8, row.gamma

    def test_binomial_expectations(self):
        for trials in range(13):
            for p in np.linspace(0.0, 1.0, 21):
                spec = BinomialSpec(trials, float(p))
                assert abs(mean_inv_one_plus(trials, float(p)) - brute_mean_inv_one_plus(spec)) <= 1e-12
                assert abs(mean_ratio(trials, float(p)) - brute_mean_ratio(spec)) <= 1e-12


class TestCompanyReproduction:
    """Reverse Correlation in the Company game."""

    def test_chicken_regime(self):
        s = 0.6
        gamma0, c0 = choose_c0(s)
        lo, hi = chicken_interval(s, c0, gamma0)
        assert lo < gamma0 < hi
        for gamma in np.linspace(lo, hi, 15):
            gamma = float(gamma)
            game = company_game(CompanyParams(n=2, gamma=gamma, s=s, c=c0))
            assert chicken_matrix(CompanyParams(n=2, gamma=gamma, s=s, c=c0)).is_chicken
            result = find_ess(game)
            assert result.classification is EssClassification.INTERIOR
            assert abs(result.pi_star - closed_form_pi_star(gamma, s, c0)) <= 1e-10
            slope = pi_star_derivative(gamma, s, c0)
            assert slope < 0
            assert derivative_check(lambda g: closed_form_pi_star(g, s, c0), gamma, slope) <= 1e-5

    def test_linear_utility_has_no_rc(self):
        table = sweep(company_family(2, 0.7, c=0.25, utility=Linear()), 0.0, 3.0, 0.005)
        degenerate = [r for r in table if r.classification is EssClassification.DEGENERATE]
        assert len(degenerate) == 1
        assert abs(degenerate[0].gamma - 0.25 / 0.175) <= 0.005
        solved = [r for r in table if r.classification is not EssClassification.DEGENERATE]
        assert _non_decreasing([r.pi_star for r in solved])
        assert _non_decreasing([r.total_production for r in solved])
        assert detect_rc(table, min_drop=1e-6) == []
        assert detect_rc(table, min_drop=1e-6, column="total_production") == []

    @pytest.mark.slow
    def test_four_workers(self):
        tables = {
            c: sweep(company_family(4, 0.6, c=c, utility=ExpSaturating(2.0)), 0.0, 3.0, 0.01)
            for c in (0.02, 0.05, 0.10)
        }
        assert any(detect_rc(t, min_drop=1e-6) for t in tables.values())
        assert any(detect_rc(t, min_drop=1e-6, column="total_production") for t in tables.values())
        # both payoff and production fall somewhere in [2, 3] at c = 0.05
        assert detect_rc(tables[0.05], min_drop=1e-6)
        assert detect_rc(tables[0.05], min_drop=1e-6, column="total_production")

    def test_producing_never_pays_at_high_cost(self):
        # the producer's edge stays below c = 0.15, so nobody produces
        table = sweep(company_family(4, 0.6, c=0.15, utility=ExpSaturating(2.0)), 0.0, 3.0, 0.1)
        assert {row.classification for row in table} == {EssClassification.ALL_SCROUNGER}
        assert detect_rc(table, min_drop=1e-6) == []

    @pytest.mark.slow
    def test_capped_utility(self):
        table = sweep(company_family(4, 0.7, c=0.15, utility=CappedLinear(1.0)), 0.0, 3.0, 0.01)
        assert detect_rc(table, min_drop=1e-6)


class TestNecessaryCondition:
    """The modified Foraging game never shows Reverse Correlation."""

    @pytest.mark.parametrize("n", [2, 3, 4])
    @pytest.mark.parametrize("s", [0.4, 0.7])
    def test_modified_game(self, n, s):
        family = modified_foraging_family(n, s)
        assert necessary_condition_check(family, [0.0, 0.75, 1.5, 2.25, 3.0])
        table = sweep(family, 0.0, 3.0, 0.01)
        assert _non_decreasing([r.pi_star for r in table], tol=1e-9)
        assert detect_rc(table, min_drop=1e-6) == []


class TestPropertySuites:
    """Every property suite passes at representative parameters."""

    @pytest.mark.slow
    @pytest.mark.parametrize("n,s", [(2, 0.5), (3, 0.4), (4, 0.2)])
    def test_foraging_suite(self, n, s):
        failed = [r for r in foraging_suite(n, s) if not r.passed]
        assert failed == []

    @pytest.mark.slow
    def test_modified_suite(self):
        failed = [r for r in modified_foraging_suite(3, 0.5) if not r.passed]
        assert failed == []

    @pytest.mark.slow
    @pytest.mark.parametrize("n,s,c,utility", [
        (2, 0.6, 0.0, ExpSaturating(2.0)),
        (2, 0.7, 0.25, Linear()),
        (4, 0.6, 0.15, ExpSaturating(2.0)),
    ])
    def test_company_suite(self, n, s, c, utility):
        failed = [r for r in company_suite(n, s, c, 0.5, 0.5, utility) if not r.passed]
        assert failed == []

    @pytest.mark.slow
    def test_chicken_adaptive_dynamics(self):
        results = {r.name: r for r in chicken_regime_checks(0.6, samples=5)}
        dynamics = results["adaptive dynamics converge to p* (chicken)"]
        assert dynamics.passed, dynamics.detail
        assert dynamics.worst_error <= 1e-4
