"""Gamma sweeps and Reverse-Correlation detection.

A sweep solves one game per gamma on a uniform grid. Reverse Correlation
(RC) is a run of consecutive rows along which the equilibrium payoff
strictly decreases although every individual became more capable.
"""
from __future__ import annotations

import marimo
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Iterable, Optional, Sequence

import numpy as np

from producer_scrounger.core.errors import (
    DomainError,
    InternalInvariantError,
    NonFiniteEvaluationError,
    PreconditionError,
    ProducerScroungerError,
    SweepError,
)
from producer_scrounger.core.game import GameFamily
from producer_scrounger.core.models import (
    EssClassification,
    EssResult,
    RcInterval,
    SolverConfig,
    SweepRow,
    SweepTable,
)
from producer_scrounger.core.solver import DEFAULT_CONFIG, find_ess

logger = logging.getLogger(__name__)


# ============================================================================
# MODULE-LEVEL CODE (importable)
# ============================================================================

DEFAULT_MIN_DROP = 1e-6

RC_COLUMNS = ("pi_star", "total_production")


def gamma_grid(gamma_lo: float, gamma_hi: float, step: float) -> np.ndarray:
    """lo, lo + step, ... up to hi (inclusive when hi lies on the grid)."""
    if not (math.isfinite(gamma_lo) and math.isfinite(gamma_hi) and gamma_lo < gamma_hi):
        raise PreconditionError(f"empty gamma range [{gamma_lo}, {gamma_hi}]")
    if not (math.isfinite(step) and step > 0):
        raise PreconditionError(f"step must be > 0, got {step}")
    count = int(math.floor((gamma_hi - gamma_lo) / step + 1e-9)) + 1
    return gamma_lo + step * np.arange(count)


def _near_singular(gamma: float, step: float, singular: Sequence[float]) -> bool:
    return any(gamma - step / 2 <= point < gamma + step / 2 for point in singular)


def sweep(
    game_family: GameFamily,
    gamma_lo: float,
    gamma_hi: float,
    step: float,
    cfg: SolverConfig = DEFAULT_CONFIG,
    workers: int = 1,
) -> SweepTable:
    """Solve the family at every grid gamma.

    Rows whose grid cell contains one of the family's singular points are
    recorded as Degenerate without solving.

    Args:
        game_family: gamma -> GameInstance
        gamma_lo: First gamma
        gamma_hi: Last gamma (inclusive when on the grid)
        step: Grid spacing
        cfg: Solver settings
        workers: Threads used to solve rows; the table does not depend on it

    Returns:
        SweepTable with one row per grid point and the run metadata

    Raises:
        PreconditionError: On an empty range or a non-positive step
        SweepError: Wrapping any solver error, with the offending gamma
    """
    from producer_scrounger import __version__

    gammas = [float(g) for g in gamma_grid(gamma_lo, gamma_hi, step)]
    singular = game_family.singular_points

    def solve(gamma: float) -> SweepRow:
        if _near_singular(gamma, step, singular):
            return SweepRow.from_result(gamma, EssResult.degenerate())
        try:
            result = find_ess(game_family(gamma), cfg)
        except ProducerScroungerError as exc:
            raise SweepError(gamma, exc) from exc
        return SweepRow.from_result(gamma, result)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = tuple(pool.map(solve, gammas))
    else:
        rows = tuple(solve(g) for g in gammas)

    logger.info("%s: solved %d gammas in [%g, %g]", game_family.label, len(rows), gamma_lo, gamma_hi)
    metadata: dict[str, Any] = {
        "game": game_family.label,
        "params": dict(game_family.params),
        "grid": {"gamma_lo": gamma_lo, "gamma_hi": gamma_hi, "step": step, "count": len(rows)},
        "solver": {
            "grid_points": cfg.grid_points,
            "root_tol": cfg.root_tol,
            "gap_tol": cfg.gap_tol,
        },
        "singular_points": list(singular),
        "version": __version__,
    }
    return SweepTable(rows=rows, metadata=metadata)


def _values(block: Iterable[SweepRow], column: str) -> list[tuple[int, float, float]]:
    out = []
    for index, row in enumerate(block):
        if row.classification is EssClassification.DEGENERATE:
            continue
        value = getattr(row, column)
        if value is not None:
            out.append((index, row.gamma, float(value)))
    return out


def detect_rc(
    table: SweepTable, min_drop: float = DEFAULT_MIN_DROP, column: str = "pi_star"
) -> list[RcInterval]:
    """Maximal runs of strictly decreasing ``column`` values.

    Degenerate rows are skipped. A decreasing step across degenerate rows
    still counts, but closes its run, so a jump at a degenerate gamma is
    reported between its two neighbouring rows.

    Args:
        table: A non-empty sweep
        min_drop: Smallest total drop worth reporting
        column: ``pi_star`` or ``total_production``

    Returns:
        Intervals in increasing gamma order (per second-axis block)
    """
    if len(table) == 0:
        raise PreconditionError("detect_rc needs a non-empty table")
    if min_drop < 0:
        raise DomainError(f"min_drop must be >= 0, got {min_drop}")
    if column not in RC_COLUMNS:
        raise DomainError(f"column must be one of {RC_COLUMNS}, got {column!r}")

    intervals: list[RcInterval] = []
    for block in table.blocks():
        points = _values(block, column)
        start: Optional[tuple[float, float]] = None
        end: Optional[tuple[float, float]] = None

        def close() -> None:
            nonlocal start, end
            if start is not None and end is not None:
                drop = start[1] - end[1]
                if drop > 0 and drop >= min_drop:
                    intervals.append(RcInterval(start[0], end[0], drop))
            start = end = None

        for (ia, ga, va), (ib, gb, vb) in zip(points, points[1:]):
            if vb < va:
                if start is None:
                    start = (ga, va)
                end = (gb, vb)
                if ib - ia > 1:
                    close()
            else:
                close()
        close()
    return intervals


def necessary_condition_check(
    game_family: GameFamily,
    gamma_samples: Sequence[float],
    p_grid_step: float = 0.01,
    tol: float = 1e-12,
) -> bool:
    """True iff the producer payoff ignores the co-players' strategy.

    For every sampled gamma, max_p pi_{1,p} - min_p pi_{1,p} <= tol on the
    p-grid. Families passing this check cannot show Reverse Correlation.
    """
    if len(gamma_samples) == 0:
        raise PreconditionError("necessary_condition_check needs gamma samples")
    if not 0 < p_grid_step <= 1:
        raise DomainError(f"p_grid_step must lie in (0, 1], got {p_grid_step}")
    grid = np.linspace(0.0, 1.0, int(round(1.0 / p_grid_step)) + 1)
    for gamma in gamma_samples:
        producer = np.asarray(game_family(float(gamma)).producer(grid), dtype=float)
        spread = float(producer.max() - producer.min())
        if spread > tol:
            logger.debug(
                "%s: producer payoff spread %.3g at gamma=%g", game_family.label, spread, gamma
            )
            return False
    return True


def assert_no_reverse_correlation(
    table: SweepTable, min_drop: float = DEFAULT_MIN_DROP
) -> None:
    """Raise ``InternalInvariantError`` if the sweep shows any RC interval.

    Call only for families that passed ``necessary_condition_check``.
    """
    found = detect_rc(table, min_drop)
    if found:
        raise InternalInvariantError(
            f"{table.metadata.get('game', '?')}: RC found in a family whose producer "
            f"payoff is constant: {[i.as_dict() for i in found]}"
        )


def derivative_check(
    f: Callable[[float], float], point: float, analytic: float, h: float = 1e-6
) -> float:
    """Relative error of a central finite difference against ``analytic``.

    Returns:
        |(f(x+h) - f(x-h))/(2h) - analytic| / max(1, |analytic|)
    """
    if not h > 0:
        raise DomainError(f"h must be > 0, got {h}")
    upper, lower = f(point + h), f(point - h)
    if not (math.isfinite(upper) and math.isfinite(lower) and math.isfinite(analytic)):
        raise NonFiniteEvaluationError(f"non-finite value near x={point}")
    central = (upper - lower) / (2.0 * h)
    return abs(central - analytic) / max(1.0, abs(analytic))


# ============================================================================
# MARIMO NOTEBOOK (interactive documentation)
# ============================================================================

app = marimo.App(width="medium")


@app.cell
def _():
    import marimo as mo
    from producer_scrounger.core.analysis import detect_rc, sweep
    from producer_scrounger.core.foraging import foraging_family, gamma_bounds
    return (mo, detect_rc, sweep, foraging_family, gamma_bounds)


@app.cell
def _(mo):
    mo.md("""
    # 📉 Sweeps and Reverse Correlation

    Sweeping γ for the three-animal Foraging game with `s = 0.4`: inside
    `[γ₁, γ₂]` the equilibrium payoff drops while food gets easier to find.
    """)
    return


@app.cell
def _(mo, detect_rc, sweep, foraging_family, gamma_bounds):
    _table = sweep(foraging_family(3, 0.4), 0.0, 2.0, 0.02)
    _bounds = gamma_bounds(3, 0.4)
    _found = detect_rc(_table, 1e-3)
    mo.vstack([
        mo.md(f"γ₁ = `{_bounds.gamma1:.4f}`, γ₂ = `{_bounds.gamma2:.4f}`"),
        mo.callout(
            mo.md("\n".join(
                f"- RC on [{i.gamma_lo:.2f}, {i.gamma_hi:.2f}], drop `{i.drop:.4f}`"
                for i in _found
            ) or "No RC"),
            kind="success" if _found else "neutral",
        ),
        mo.ui.table(_table.dataframe, selection=None),
    ])
    return


if __name__ == "__main__":
    app.run()
