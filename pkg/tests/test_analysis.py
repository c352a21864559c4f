"""Tests for gamma sweeps and Reverse-Correlation detection."""

import math

import numpy as np
import pytest

from producer_scrounger import (
    DomainError,
    EssClassification,
    GameFamily,
    GameInstance,
    InternalInvariantError,
    Linear,
    NonFiniteEvaluationError,
    PreconditionError,
    SweepError,
    SweepRow,
    SweepTable,
    assert_no_reverse_correlation,
    closed_form_pi_star,
    company_family,
    derivative_check,
    detect_rc,
    foraging_family,
    gamma_bounds,
    gamma_grid,
    modified_foraging_family,
    necessary_condition_check,
    pi_star_derivative,
    sweep,
)


def _table(values, gammas=None, degenerate=()):
    gammas = gammas or [0.1 * k for k in range(len(values))]
    rows = []
    for index, (gamma, value) in enumerate(zip(gammas, values)):
        if index in degenerate:
            rows.append(SweepRow(gamma, EssClassification.DEGENERATE))
        else:
            rows.append(SweepRow(gamma, EssClassification.INTERIOR, 0.5, value, 2 * value))
    return SweepTable(rows=tuple(rows))


@pytest.fixture(scope="module")
def two_animal_sweep():
    return sweep(foraging_family(2, 0.5), 0.0, 5.0, 0.01)


@pytest.fixture(scope="module")
def linear_company_sweep():
    return sweep(company_family(2, 0.7, c=0.25, utility=Linear()), 0.0, 3.0, 0.01)


class TestGammaGrid:
    """Test the uniform grid."""

    @pytest.mark.parametrize("lo,hi,step,expected", [
        (0.0, 1.0, 0.25, [0.0, 0.25, 0.5, 0.75, 1.0]),
        (0.0, 1.0, 0.3, [0.0, 0.3, 0.6, 0.9]),
        (1.0, 1.3, 0.1, [1.0, 1.1, 1.2, 1.3]),
    ])
    def test_points(self, lo, hi, step, expected):
        assert gamma_grid(lo, hi, step) == pytest.approx(expected)

    @pytest.mark.parametrize("lo,hi,step", [
        (1.0, 1.0, 0.1),
        (2.0, 1.0, 0.1),
        (0.0, 1.0, 0.0),
        (0.0, 1.0, -0.1),
        (0.0, math.inf, 0.1),
        (0.0, 1.0, math.nan),
    ])
    def test_invalid(self, lo, hi, step):
        with pytest.raises(PreconditionError):
            gamma_grid(lo, hi, step)


class TestSweep:
    """Test sweeping a family over gamma."""

    def test_two_animals_payoff_jumps_at_gamma_s(self, two_animal_sweep):
        for row in two_animal_sweep:
            if row.gamma < 2.99:
                assert row.pi_star == pytest.approx(1 + row.gamma)
            elif row.gamma > 3.01:
                assert row.pi_star == pytest.approx(row.gamma)

    def test_two_animals_single_degenerate_row(self, two_animal_sweep):
        degenerate = [r.gamma for r in two_animal_sweep if r.classification is EssClassification.DEGENERATE]
        assert degenerate == [pytest.approx(3.0)]

    def test_linear_company_single_degenerate_row(self, linear_company_sweep):
        degenerate = [r for r in linear_company_sweep if r.classification is EssClassification.DEGENERATE]
        assert len(degenerate) == 1
        assert degenerate[0].gamma == pytest.approx(1.43)
        assert degenerate[0].pi_star is None

    def test_linear_company_non_decreasing(self, linear_company_sweep):
        solved = [r for r in linear_company_sweep if r.pi_star is not None]
        assert all(b.pi_star >= a.pi_star for a, b in zip(solved, solved[1:]))
        assert all(b.total_production >= a.total_production for a, b in zip(solved, solved[1:]))

    def test_metadata(self, two_animal_sweep):
        meta = two_animal_sweep.metadata
        assert meta["game"] == "foraging(n=2,s=0.5)"
        assert meta["grid"]["count"] == len(two_animal_sweep) == 501
        assert meta["singular_points"] == [pytest.approx(3.0)]
        assert meta["solver"]["grid_points"] == 2001

    def test_empty_range(self):
        with pytest.raises(PreconditionError):
            sweep(foraging_family(3, 0.4), 1.0, 1.0, 0.1)

    def test_workers_do_not_change_results(self):
        family = foraging_family(4, 0.4)
        single = sweep(family, 0.0, 2.0, 0.05)
        threaded = sweep(family, 0.0, 2.0, 0.05, workers=4)
        assert threaded.rows == single.rows

    def test_solver_error_carries_gamma(self):
        upward = GameFamily(
            build=lambda g: GameInstance(
                producer=lambda p: p * g, scrounger=lambda p: 0.5 * g + 0.0 * p, label="upward"
            ),
            label="upward",
        )
        with pytest.raises(SweepError) as info:
            sweep(upward, 1.0, 2.0, 0.5)
        assert info.value.gamma == 1.0


class TestDetectRc:
    """Test detection of decreasing runs."""

    def test_two_animal_drop(self, two_animal_sweep):
        found = detect_rc(two_animal_sweep, min_drop=0.5)
        assert len(found) == 1
        assert found[0].gamma_lo == pytest.approx(2.99)
        assert found[0].gamma_hi == pytest.approx(3.01)
        assert found[0].drop == pytest.approx(0.98)
        assert found[0].contains(3.0)

    def test_linear_company_has_none(self, linear_company_sweep):
        assert detect_rc(linear_company_sweep, min_drop=1e-9) == []

    def test_three_animals_inside_bounds(self):
        step = 0.01
        found = detect_rc(sweep(foraging_family(3, 0.4), 0.0, 3.0, step), min_drop=1e-3)
        bounds = gamma_bounds(3, 0.4)
        assert found
        for interval in found:
            assert bounds.gamma1 - step <= interval.gamma_lo
            assert interval.gamma_hi <= bounds.gamma2 + step

    def test_production_column(self, two_animal_sweep):
        found = detect_rc(two_animal_sweep, min_drop=0.5, column="total_production")
        assert len(found) == 1 and found[0].drop == pytest.approx(1.96)

    def test_runs_and_min_drop(self):
        table = _table([1.0, 3.0, 2.0, 1.5, 4.0, 3.9])
        found = detect_rc(table, min_drop=0.0)
        assert [(i.gamma_lo, i.gamma_hi, i.drop) for i in found] == [
            (pytest.approx(0.1), pytest.approx(0.3), pytest.approx(1.5)),
            (pytest.approx(0.4), pytest.approx(0.5), pytest.approx(0.1)),
        ]
        assert len(detect_rc(table, min_drop=0.5)) == 1

    def test_plateau_breaks_run(self):
        table = _table([3.0, 2.0, 2.0, 1.0])
        found = detect_rc(table, min_drop=0.0)
        assert [(i.gamma_lo, i.gamma_hi) for i in found] == [
            (pytest.approx(0.0), pytest.approx(0.1)),
            (pytest.approx(0.2), pytest.approx(0.3)),
        ]

    def test_degenerate_rows_close_runs(self):
        table = _table([3.0, 2.0, 0.0, 1.5, 1.0], degenerate=(2,))
        found = detect_rc(table, min_drop=0.0)
        assert [(i.gamma_lo, i.gamma_hi) for i in found] == [
            (pytest.approx(0.0), pytest.approx(0.3)),
            (pytest.approx(0.3), pytest.approx(0.4)),
        ]

    def test_blocks_are_independent(self):
        rows = (
            SweepRow(0.0, EssClassification.ALL_PRODUCER, 1.0, 2.0, 4.0, 0.2),
            SweepRow(0.1, EssClassification.ALL_PRODUCER, 1.0, 3.0, 6.0, 0.2),
            SweepRow(0.0, EssClassification.ALL_PRODUCER, 1.0, 1.0, 2.0, 0.4),
        )
        assert detect_rc(SweepTable(rows=rows, second_name="s")) == []

    def test_errors(self):
        with pytest.raises(PreconditionError):
            detect_rc(SweepTable(rows=()))
        with pytest.raises(DomainError):
            detect_rc(_table([1.0, 2.0]), min_drop=-1.0)
        with pytest.raises(DomainError):
            detect_rc(_table([1.0, 2.0]), column="p_star")


class TestNecessaryCondition:
    """Test the constant-producer-payoff check."""

    @pytest.mark.parametrize("keeps_all", [False, True])
    def test_modified_foraging_passes(self, keeps_all):
        family = modified_foraging_family(4, 0.4, producer_keeps_all=keeps_all)
        assert necessary_condition_check(family, [0.0, 0.5, 1.0, 2.0])

    def test_foraging_fails(self):
        assert not necessary_condition_check(foraging_family(4, 0.4), [0.5, 1.0])

    def test_linear_company_fails(self):
        family = company_family(2, 0.7, c=0.25, utility=Linear())
        assert not necessary_condition_check(family, [0.5, 1.0])

    def test_errors(self):
        with pytest.raises(PreconditionError):
            necessary_condition_check(foraging_family(2, 0.5), [])
        with pytest.raises(DomainError):
            necessary_condition_check(foraging_family(2, 0.5), [1.0], p_grid_step=0.0)

    def test_assert_no_reverse_correlation(self, two_animal_sweep):
        clean = sweep(modified_foraging_family(4, 0.4), 0.0, 2.0, 0.05)
        assert_no_reverse_correlation(clean)
        with pytest.raises(InternalInvariantError, match="RC found"):
            assert_no_reverse_correlation(two_animal_sweep)


class TestDerivativeCheck:
    """Test the finite-difference oracle."""

    def test_closed_form_payoff(self):
        slope = pi_star_derivative(4.0, 0.5, 0.01)
        assert derivative_check(lambda g: closed_form_pi_star(g, 0.5, 0.01), 4.0, slope, h=1e-6) <= 1e-5

    def test_constant(self):
        assert derivative_check(lambda x: 7.0, 1.3, 0.0) == 0.0

    def test_identity(self):
        # h = 2**-20 keeps 2 +- h exact
        assert derivative_check(lambda x: x, 2.0, 1.0, h=2.0**-20) <= 1e-10

    def test_wrong_slope(self):
        assert derivative_check(np.sin, 0.0, 0.0) == pytest.approx(1.0)

    def test_errors(self):
        with pytest.raises(DomainError):
            derivative_check(lambda x: x, 1.0, 1.0, h=0.0)
        with pytest.raises(NonFiniteEvaluationError):
            derivative_check(lambda x: math.inf, 1.0, 0.0)
