"""Property suites behind ``psg verify``.

Each check returns a ``PropertyResult`` with the worst error it saw, so a
failing run says by how much a property was missed, not only that it was.
"""
from __future__ import annotations

import marimo
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from producer_scrounger.core.analysis import (
    assert_no_reverse_correlation,
    derivative_check,
    detect_rc,
    necessary_condition_check,
    sweep,
)
from producer_scrounger.core.company import (
    CompanyParams,
    ExpSaturating,
    Linear,
    UtilityKind,
    chicken_ess,
    chicken_interval,
    chicken_matrix,
    choose_c0,
    closed_form_pi_star,
    company_family,
    company_game,
    linear_chicken_matrix,
    pi_star_derivative,
    reference_chicken_matrix,
)
from producer_scrounger.core.errors import InternalInvariantError
from producer_scrounger.core.foraging import (
    ForagingParams,
    ModifiedForagingParams,
    abundance_fn_A,
    analytic_ess,
    foraging_family,
    foraging_game,
    gamma_bounds,
    mean_inv_one_plus,
    mean_ratio,
    modified_foraging_family,
    modified_producer_payoff,
    modified_scrounger_payoff,
    producer_payoff,
    rc_guarantee,
    scrounger_payoff,
    threshold_fn_f,
)
from producer_scrounger.core.game import GameFamily, GameInstance, payoff_gap
from producer_scrounger.core.models import SolverConfig, SweepTable
from producer_scrounger.core.oracle import (
    BinomialSpec,
    adaptive_dynamics,
    brute_foraging_payoffs,
    brute_mean_inv_one_plus,
    brute_mean_ratio,
    monte_carlo_modified_scrounger,
)
from producer_scrounger.core.solver import DEFAULT_CONFIG, find_ess

logger = logging.getLogger(__name__)


# ============================================================================
# MODULE-LEVEL CODE (importable)
# ============================================================================

EXACT_TOL = 1e-12
P_GRID = np.round(np.arange(0, 21) * 0.05, 10)
SEED = 20240917
DYNAMICS_ETA = 0.01
# adaptive runs continue until the initial distance to p* shrinks by this factor
DYNAMICS_SHRINK = 1e6


@dataclass(frozen=True)
class PropertyResult:
    """Outcome of one property check."""

    name: str
    passed: bool
    worst_error: float = 0.0
    detail: str = ""


def _within(name: str, errors: Sequence[float], tol: float, detail: str = "") -> PropertyResult:
    worst = max(errors, default=0.0)
    logger.debug("%s: worst error %.3g (tolerance %g)", name, worst, tol)
    return PropertyResult(name, worst <= tol, worst, detail or f"tolerance {tol:g}")


def _holds(name: str, ok: bool, detail: str = "") -> PropertyResult:
    return PropertyResult(name, ok, 0.0, detail)


def check_binomial_claims(max_trials: int = 12) -> list[PropertyResult]:
    inv, ratio = [], []
    for trials in range(max_trials + 1):
        for p in P_GRID:
            spec = BinomialSpec(trials, float(p))
            inv.append(abs(brute_mean_inv_one_plus(spec) - mean_inv_one_plus(trials, float(p))))
            ratio.append(abs(brute_mean_ratio(spec) - mean_ratio(trials, float(p))))
    return [
        _within("E[1/(1+X)] closed form vs direct sum", inv, EXACT_TOL),
        _within("E[X/(2+n-X)] closed form vs direct sum", ratio, EXACT_TOL),
    ]


def check_bilinearity(games: Sequence[GameInstance], pairs: int = 100) -> PropertyResult:
    rng = np.random.default_rng(SEED)
    errors = []
    for game in games:
        for q, p in rng.uniform(0.0, 1.0, size=(pairs, 2)):
            mixed = game.payoff_fn(q, p)
            split = q * game.payoff_fn(1.0, p) + (1.0 - q) * game.payoff_fn(0.0, p)
            errors.append(abs(mixed - split))
    return _within("bilinearity in own mixing probability", errors, EXACT_TOL)


def check_monotone_in_p(games: Sequence[GameInstance], step: float = 0.01) -> PropertyResult:
    grid = np.linspace(0.0, 1.0, int(round(1 / step)) + 1)
    worst = 0.0
    for game in games:
        for curve in (game.producer, game.scrounger):
            values = np.asarray(curve(grid), dtype=float)
            worst = max(worst, float(np.max(-np.diff(values), initial=0.0)))
    return _within("payoffs non-decreasing in p", [worst], EXACT_TOL)


def check_monotone_in_gamma(family: GameFamily, gammas: Sequence[float]) -> PropertyResult:
    grid = np.linspace(0.0, 1.0, 21)
    stack = [
        (np.asarray(g.producer(grid), dtype=float), np.asarray(g.scrounger(grid), dtype=float))
        for g in (family(x) for x in gammas)
    ]
    worst = 0.0
    for (p0, s0), (p1, s1) in zip(stack, stack[1:]):
        worst = max(worst, float(np.max(p0 - p1)), float(np.max(s0 - s1)))
    return _within("payoffs non-decreasing in gamma", [max(worst, 0.0)], EXACT_TOL)


def check_adaptive_dynamics(
    game: GameInstance,
    cfg: SolverConfig,
    steps: int = 20_000,
    label: str = "",
    eta: float = DYNAMICS_ETA,
) -> PropertyResult:
    target = find_ess(game, cfg)
    if target.p_star is None:
        return _holds(f"adaptive dynamics {label}".strip(), True, "skipped: degenerate game")
    errors = [abs(adaptive_dynamics(game, p0, eta, steps) - target.p_star) for p0 in (0.1, 0.5, 0.9)]
    return _within(f"adaptive dynamics converge to p* {label}".strip(), errors, 1e-4)


def _rc_report(table: SweepTable, min_drop: float) -> str:
    parts = []
    for column in ("pi_star", "total_production"):
        found = detect_rc(table, min_drop, column)
        text = ", ".join(f"[{i.gamma_lo:.4g}, {i.gamma_hi:.4g}] drop {i.drop:.3g}" for i in found)
        parts.append(f"{column}: {text or 'none'}")
    return "; ".join(parts)


def foraging_suite(
    n: int,
    s: float,
    gamma_range: Optional[tuple[float, float, float]] = None,
    cfg: SolverConfig = DEFAULT_CONFIG,
    min_drop: float = 1e-6,
) -> list[PropertyResult]:
    """Checks for the Foraging game at group size ``n`` and share ``s``."""
    results = check_binomial_claims()
    bounds = gamma_bounds(n, s) if s < 1 else None
    if gamma_range is None:
        top = max(5.0, (bounds.gamma2 + 1.0) if bounds else 5.0)
        gamma_range = (0.0, round(top, 2), 0.01)
    lo, hi, step = gamma_range
    samples = [lo, 0.5 * (lo + hi), hi]
    games = [foraging_game(ForagingParams(n, s, g)) for g in samples]

    closed = []
    for g in samples:
        params = ForagingParams(n, s, g)
        for p in P_GRID:
            brute_p, brute_s = brute_foraging_payoffs(params, float(p))
            closed.append(abs(producer_payoff(params, float(p)) - brute_p))
            closed.append(abs(scrounger_payoff(params, float(p)) - brute_s))
    results.append(_within("closed-form payoffs vs binomial sums", closed, EXACT_TOL))
    results.append(check_bilinearity(games))
    results.append(check_monotone_in_p(games))
    results.append(check_monotone_in_gamma(foraging_family(n, s), np.linspace(lo, hi, 51)))

    conservation = []
    for g in samples:
        params = ForagingParams(n, s, g)
        mean = P_GRID * producer_payoff(params, P_GRID) + (1 - P_GRID) * scrounger_payoff(params, P_GRID)
        found = P_GRID * params.food_producer + (1 - P_GRID) * params.food_scrounger
        conservation.extend(np.abs(mean - found).tolist())
    results.append(_within("food conservation", conservation, EXACT_TOL))

    fine = np.linspace(0.0, 1.0, 1001)
    rising = max(float(np.max(np.diff(threshold_fn_f(m, fine)))) for m in range(3, 11))
    results.append(
        _holds("f strictly decreasing (n = 3..10)", rising < 0, f"largest step {rising:.3g}")
    )
    if s >= 1:
        results.append(_holds("threshold analysis", True, "skipped: s = 1"))
        return results

    a_steps = np.diff(abundance_fn_A(n, s, np.linspace(lo, hi, 501)))
    results.append(_holds("A strictly increasing in gamma", bool(np.all(a_steps > 0))))

    rng = np.random.default_rng(SEED)
    mismatches = 0
    for g, p in zip(rng.uniform(lo, hi, 200), rng.uniform(0.0, 1.0, 200)):
        margin = float(threshold_fn_f(n, p)) - abundance_fn_A(n, s, float(g))
        if abs(margin) < 1e-9:
            continue
        gap = payoff_gap(foraging_game(ForagingParams(n, s, float(g))), float(p))
        mismatches += int(np.sign(gap) != np.sign(margin))
    results.append(_holds("sign(h) == sign(f(p) - A(gamma))", mismatches == 0, f"{mismatches} mismatches"))

    table = sweep(foraging_family(n, s), lo, hi, step, cfg)
    agreement = []
    for row in table:
        if bounds and bounds.gamma_s is not None and abs(row.gamma - bounds.gamma_s) < 1e-6:
            continue
        expected = analytic_ess(ForagingParams(n, s, row.gamma))
        if row.p_star is not None and expected.p_star is not None:
            agreement.append(abs(row.p_star - expected.p_star))
    results.append(_within("numeric vs analytic p*", agreement, 1e-8))

    assert bounds is not None
    if n == 2:
        steps = []
        for eps in (0.1, 0.25, 0.4):
            below = analytic_ess(ForagingParams(n, s, bounds.gamma1 - eps)).pi_star
            above = analytic_ess(ForagingParams(n, s, bounds.gamma1 + eps)).pi_star
            assert below is not None and above is not None
            steps.append(abs((below - above) - (1 - 2 * eps)))
        results.append(_within("payoff drop 1 - 2 eps across gamma_s", steps, 1e-9))
        checkpoints = [0.5 * bounds.gamma1, 2.0 * bounds.gamma1 + 0.1]
    else:
        checkpoints = [0.5 * (bounds.gamma1 + bounds.gamma2)]
    for g in checkpoints:
        results.append(
            check_adaptive_dynamics(
                foraging_game(ForagingParams(n, s, max(g, 0.0))), cfg, label=f"(gamma={g:.4g})"
            )
        )

    found = detect_rc(table, min_drop)
    report = _rc_report(table, min_drop)
    if n >= 3 and rc_guarantee(n, s):
        inside = all(
            bounds.gamma1 - step <= i.gamma_lo and i.gamma_hi <= bounds.gamma2 + step for i in found
        )
        results.append(_holds("RC intervals inside [gamma1, gamma2]", bool(found) and inside, report))
    else:
        results.append(_holds("RC intervals", True, report))
    return results


def modified_foraging_suite(
    n: int,
    s: float,
    producer_keeps_all: bool = False,
    gamma_range: Optional[tuple[float, float, float]] = None,
    cfg: SolverConfig = DEFAULT_CONFIG,
    min_drop: float = 1e-6,
) -> list[PropertyResult]:
    """Checks for the modified Foraging game."""
    lo, hi, step = gamma_range or (0.0, 3.0, 0.01)
    family = modified_foraging_family(n, s, producer_keeps_all)
    samples = list(np.linspace(lo, hi, 7))
    results = [
        _holds("producer payoff ignores co-players", necessary_condition_check(family, samples))
    ]
    constant = all(
        len(set(np.asarray(modified_producer_payoff(
            ModifiedForagingParams(n, s, float(g), producer_keeps_all), P_GRID
        )).tolist())) == 1
        for g in samples
    )
    results.append(_holds("producer payoff exactly constant in p", constant))

    params = ModifiedForagingParams(n, s, 0.5 * (lo + hi), producer_keeps_all)
    z_scores = []
    for p in (0.25, 0.5, 0.75):
        mean, se = monte_carlo_modified_scrounger(params, p, seed=SEED)
        exact = modified_scrounger_payoff(params, p)
        z_scores.append(abs(exact - mean) / se if se > 0 else 0.0)
    results.append(_within("scrounger payoff vs Monte Carlo (z-score)", z_scores, 3.0))

    table = sweep(family, lo, hi, step, cfg)
    try:
        assert_no_reverse_correlation(table, min_drop)
        results.append(_holds("no Reverse Correlation", True, _rc_report(table, min_drop)))
    except InternalInvariantError as exc:
        results.append(_holds("no Reverse Correlation", False, str(exc)))
    return results


def _is_reference_setup(n: int, utility: UtilityKind, a: float, p_succ: float) -> bool:
    return n == 2 and utility == ExpSaturating(2.0) and a == 0.5 and p_succ == 0.5


def company_suite(
    n: int,
    s: float,
    c: float,
    a: float,
    p_succ: float,
    utility: UtilityKind,
    gamma_range: Optional[tuple[float, float, float]] = None,
    cfg: SolverConfig = DEFAULT_CONFIG,
    min_drop: float = 1e-6,
) -> list[PropertyResult]:
    """Checks for the Company game."""
    lo, hi, step = gamma_range or (0.0, 3.0, 0.01)
    family = company_family(n, s, c=c, a=a, p_succ=p_succ, utility=utility)
    samples = [lo, 0.5 * (lo + hi), hi]
    games = [family(g) for g in samples]
    results = [
        check_bilinearity(games),
        check_monotone_in_p(games),
        check_monotone_in_gamma(family, np.linspace(lo, hi, 31)),
    ]

    if _is_reference_setup(n, utility, a, p_succ) and s < 1:
        errors, friends, towards = [], True, True
        for g in (0.5, 1.0, 2.0, 4.0):
            for cost in (0.0, 0.05, 0.1):
                got = chicken_matrix(CompanyParams(2, g, s, cost, a, p_succ, utility))
                ref = reference_chicken_matrix(g, s, cost)
                errors.extend(abs(x - y) for x, y in zip(
                    (got.R, got.S, got.T, got.P), (ref.R, ref.S, ref.T, ref.P)
                ))
                towards &= (got.S - got.P) > (got.R - got.T)
            free = chicken_matrix(CompanyParams(2, g, s, 0.0, a, p_succ, utility))
            friends &= free.R > free.S and free.R > free.T and free.S > free.P and free.T > free.P
        results.append(_within("2x2 matrix vs closed forms (R)-(P)", errors, EXACT_TOL))
        results.append(_holds("S - P > R - T", towards))
        results.append(_holds("R > S, R > T, S > P, T > P at zero cost", friends))
        results.extend(chicken_regime_checks(s, cfg))

    if n == 2 and isinstance(utility, Linear):
        errors = []
        for g in (0.5, 1.0, 2.0, 4.0):
            got = chicken_matrix(CompanyParams(2, g, s, c, a, p_succ, utility))
            ref = linear_chicken_matrix(g, s, c, p_succ, a)
            errors.extend(abs(x - y) for x, y in zip(
                (got.R, got.S, got.T, got.P), (ref.R, ref.S, ref.T, ref.P)
            ))
        results.append(_within("2x2 matrix vs linear closed forms", errors, EXACT_TOL))

    table = sweep(family, lo, hi, step, cfg)
    report = _rc_report(table, min_drop)
    if isinstance(utility, Linear):
        clean = not detect_rc(table, min_drop) and not detect_rc(table, min_drop, "total_production")
        results.append(_holds("RC intervals", clean, report if not clean else "none"))
    else:
        results.append(_holds("RC intervals", True, report))
    return results


def chicken_regime_checks(
    s: float, cfg: SolverConfig = DEFAULT_CONFIG, samples: int = 25
) -> list[PropertyResult]:
    """Closed-form pi*, its derivative and the solver on the chicken interval.

    On a 2x2 game h(p) = k (p* - p) with k = S + T - R - P, so each adaptive
    step shrinks the distance to p* by the factor 1 - eta k. k is of order
    1e-2 at gamma0 and the step count is sized from it.
    """
    gamma0, c0 = choose_c0(s)
    gamma_min, gamma_max = chicken_interval(s, c0, gamma0)
    detail = f"gamma0={gamma0:.6g}, c0={c0:.6g}, interval=[{gamma_min:.4g}, {gamma_max:.4g}]"
    payoff_err, p_err, deriv_err, rising = [], [], [], 0
    for g in np.linspace(gamma_min, gamma_max, samples):
        g = float(g)
        ref = reference_chicken_matrix(g, s, c0)
        solved = find_ess(company_game(CompanyParams(2, g, s, c0, 0.5, 0.5, ExpSaturating())), cfg)
        expected = chicken_ess(ref)
        assert solved.pi_star is not None and solved.p_star is not None
        assert expected.p_star is not None
        payoff_err.append(abs(solved.pi_star - closed_form_pi_star(g, s, c0)))
        p_err.append(abs(solved.p_star - expected.p_star))
        slope = pi_star_derivative(g, s, c0)
        deriv_err.append(derivative_check(lambda x: closed_form_pi_star(x, s, c0), g, slope, 1e-6))
        rising += int(slope >= 0)
    matrix = reference_chicken_matrix(gamma0, s, c0)
    slope_k = matrix.S + matrix.T - matrix.R - matrix.P
    steps = math.ceil(math.log(DYNAMICS_SHRINK) / (DYNAMICS_ETA * slope_k))
    return [
        _within("solver pi* vs 1 - c0 e^{s gamma} coth(s gamma / 2)", payoff_err, 1e-10, detail),
        _within("solver p* vs chicken closed form", p_err, 1e-8, detail),
        _within("finite-difference vs analytic d pi*/d gamma", deriv_err, 1e-5, detail),
        _holds("d pi*/d gamma < 0 on the chicken interval", rising == 0, detail),
        check_adaptive_dynamics(matrix.as_game(), cfg, steps, label="(chicken)", eta=DYNAMICS_ETA),
    ]


# ============================================================================
# MARIMO NOTEBOOK (interactive documentation)
# ============================================================================

app = marimo.App(width="medium")


@app.cell
def _():
    import marimo as mo
    import pandas as pd
    from producer_scrounger.core.suites import foraging_suite
    return (mo, pd, foraging_suite)


@app.cell
def _(mo, pd, foraging_suite):
    _results = foraging_suite(3, 0.4)
    mo.vstack([
        mo.md("# ✅ Property suite: Foraging n=3, s=0.4"),
        mo.ui.table(pd.DataFrame([r.__dict__ for r in _results]), selection=None),
    ])
    return


if __name__ == "__main__":
    app.run()
