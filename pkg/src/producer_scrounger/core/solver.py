"""Numerical ESS solver for symmetric producer-scrounger games.

The payoff gap h(p) = pi_{1,p} - pi_{0,p} is evaluated on a uniform grid
over [0, 1]. Its sign pattern decides the regime:

- no negative points: everybody produces (p* = 1)
- no positive points: everybody scrounges (p* = 0)
- every point within ``gap_tol`` of zero: degenerate, no ESS
- otherwise a single + to - crossing, refined by bisection
"""
from __future__ import annotations

import marimo
import logging
from typing import Optional

import numpy as np
from scipy import optimize

from producer_scrounger.core.errors import MultipleCrossingsError
from producer_scrounger.core.game import GameInstance, mixed_payoff, payoff_gap
from producer_scrounger.core.models import (
    EssClassification,
    EssResult,
    SolverConfig,
    check_probability,
)

logger = logging.getLogger(__name__)


# ============================================================================
# MODULE-LEVEL CODE (importable)
# ============================================================================

DEFAULT_CONFIG = SolverConfig()

BISECT_MAXITER = 200


def _signs(h: np.ndarray, gap_tol: float) -> np.ndarray:
    return np.where(h > gap_tol, 1, np.where(h < -gap_tol, -1, 0))


def find_ess(game: GameInstance, cfg: SolverConfig = DEFAULT_CONFIG) -> EssResult:
    """Locate the ESS of ``game`` from the sign pattern of its payoff gap.

    Args:
        game: The game to solve
        cfg: Grid size and tolerances

    Returns:
        EssResult with p*, pi*, Gamma* (if the game defines production) and
        the outcome of ``verify_ess``

    Raises:
        MultipleCrossingsError: If h does not cross zero exactly once from + to -
        NonFiniteEvaluationError: If a payoff is NaN or infinite

    Examples:
        >>> from producer_scrounger.core.models import ChickenMatrix
        >>> find_ess(ChickenMatrix(R=3, S=1, T=4, P=0).as_game()).p_star
        0.5
    """
    grid = cfg.grid
    signs = _signs(game.gap_curve(grid), cfg.gap_tol)
    positive = np.flatnonzero(signs == 1)
    negative = np.flatnonzero(signs == -1)

    if positive.size == 0 and negative.size == 0:
        logger.debug("%s: |h| <= %g on the whole grid", game.label, cfg.gap_tol)
        return EssResult.degenerate()
    if negative.size == 0:
        p_star = 1.0
    elif positive.size == 0:
        p_star = 0.0
    else:
        last_pos, first_neg = int(positive[-1]), int(negative[0])
        if last_pos > first_neg:
            raise MultipleCrossingsError(
                f"{game.label}: h changes sign more than once "
                f"(h<0 at p={grid[first_neg]:.6g}, h>0 at p={grid[last_pos]:.6g})"
            )
        lo, hi = float(grid[last_pos]), float(grid[first_neg])
        logger.debug("%s: bisecting on [%.6g, %.6g]", game.label, lo, hi)
        p_star = float(
            optimize.bisect(
                lambda p: payoff_gap(game, p),
                lo,
                hi,
                xtol=cfg.root_tol,
                maxiter=BISECT_MAXITER,
            )
        )

    if p_star >= 1.0:
        classification = EssClassification.ALL_PRODUCER
    elif p_star <= 0.0:
        classification = EssClassification.ALL_SCROUNGER
    else:
        classification = EssClassification.INTERIOR

    production = float(game.production(p_star)) if game.production is not None else None
    return EssResult(
        classification=classification,
        p_star=p_star,
        pi_star=mixed_payoff(game, p_star, p_star),
        total_production=production,
        verified=verify_ess(game, p_star, cfg),
    )


def first_violation(
    game: GameInstance, p_star: float, cfg: SolverConfig = DEFAULT_CONFIG
) -> Optional[str]:
    """Describe the first violated ESS sufficiency condition, or None.

    Checked on the grid, up to ``gap_tol``: indifference at an interior p*,
    h >= 0 for q < p*, h <= 0 for q > p*. An occupied boundary must be
    strictly dominant, either at p* itself or on the adjacent grid cell
    when h(p*) is zero.
    """
    check_probability(p_star, "p_star")
    grid = cfg.grid
    h = game.gap_curve(grid)
    tol = cfg.gap_tol

    if np.all(np.abs(h) <= tol):
        return "h vanishes on the whole grid: every strategy is a best reply"

    at_star = payoff_gap(game, p_star)
    if 0.0 < p_star < 1.0 and abs(at_star) > tol:
        return f"(i) indifference fails: |h({p_star:.6g})| = {abs(at_star):.3g} > {tol:g}"
    # an occupied boundary must win strictly, at p* itself or on the adjacent cell
    if p_star == 1.0 and not (at_star > tol or (at_star >= -tol and h[-2] > tol)):
        return f"(i) boundary p*=1 not strictly dominant: h(1) = {at_star:.3g}"
    if p_star == 0.0 and not (at_star < -tol or (at_star <= tol and h[1] < -tol)):
        return f"(i) boundary p*=0 not strictly dominant: h(0) = {at_star:.3g}"

    below = grid < p_star - cfg.root_tol
    bad = np.flatnonzero(below & (h < -tol))
    if bad.size:
        q = float(grid[bad[0]])
        return f"(ii) h({q:.6g}) = {h[bad[0]]:.3g} < 0 below p*={p_star:.6g}"
    above = grid > p_star + cfg.root_tol
    bad = np.flatnonzero(above & (h > tol))
    if bad.size:
        q = float(grid[bad[0]])
        return f"(iii) h({q:.6g}) = {h[bad[0]]:.3g} > 0 above p*={p_star:.6g}"
    return None


def verify_ess(game: GameInstance, p_star: float, cfg: SolverConfig = DEFAULT_CONFIG) -> bool:
    """True iff ``p_star`` passes the sufficiency conditions on the grid."""
    problem = first_violation(game, p_star, cfg)
    if problem is not None:
        logger.debug("%s: p*=%.6g rejected: %s", game.label, p_star, problem)
        return False
    return True


# ============================================================================
# MARIMO NOTEBOOK (interactive documentation)
# ============================================================================

app = marimo.App(width="medium")


@app.cell
def _():
    import marimo as mo
    import pandas as pd
    from producer_scrounger.core.models import ChickenMatrix, SolverConfig
    from producer_scrounger.core.solver import find_ess, first_violation
    return (mo, pd, ChickenMatrix, SolverConfig, find_ess, first_violation)


@app.cell
def _(mo):
    mo.md("""
    # 🎯 ESS Solver

    The solver samples `h(p)` on a grid, reads off the sign pattern and
    bisects the single `+ → −` crossing when there is one.
    """)
    return


@app.cell
def _(mo, pd, ChickenMatrix, SolverConfig, find_ess, first_violation):
    _games = {
        "chicken (3,1,4,0)": ChickenMatrix(3.0, 1.0, 4.0, 0.0),
        "prisoner's dilemma (3,0,5,1)": ChickenMatrix(3.0, 0.0, 5.0, 1.0),
        "harmony (4,3,1,0)": ChickenMatrix(4.0, 3.0, 1.0, 0.0),
        "indifferent (1,1,1,1)": ChickenMatrix(1.0, 1.0, 1.0, 1.0),
    }
    _cfg = SolverConfig(grid_points=101)
    _rows = []
    for _name, _m in _games.items():
        _r = find_ess(_m.as_game(), _cfg)
        _rows.append({
            "game": _name,
            "regime": _r.classification.value,
            "p_star": _r.p_star,
            "pi_star": _r.pi_star,
            "verified": _r.verified,
        })
    _perturbed = first_violation(_games["chicken (3,1,4,0)"].as_game(), 0.6, _cfg)
    mo.vstack([
        mo.ui.table(pd.DataFrame(_rows), selection=None),
        mo.callout(mo.md(f"Checking p = 0.6 on the chicken game: *{_perturbed}*"), kind="warn"),
    ])
    return


if __name__ == "__main__":
    app.run()
