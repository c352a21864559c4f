"""The Foraging game.

Each of ``n`` animals either *produces* (searches the canopy and finds
F_P = 1 + gamma calories) or *scrounges* (picks up F_S = gamma calories of
low-hanging fruit). A producer eats the finder's share ``s`` of its find;
the rest falls and is split evenly between the producer and all
scroungers.

The expected payoffs against co-players producing with probability ``p``
are polynomials in ``p``:

    pi_{1,p} = s F_P + (1 - s) F_P / n * sum_{j < n} p^j
    pi_{0,p} = F_S + (1 - s) F_P p / n * sum_{i <= n-2} (n - 1 - i) p^i

and the sign of their difference equals the sign of f(p) - A(gamma), which
yields the analytic ESS.

A *modified* variant in which producers never eat fallen food is provided
for the necessary-condition analysis.
"""
from __future__ import annotations

import marimo
import logging
import math
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np
import numpy.typing as npt
from numpy.polynomial import polynomial as P
from scipy import optimize, stats

from producer_scrounger.core.errors import DomainError, PreconditionError
from producer_scrounger.core.game import GameFamily, GameInstance, mixed_payoff
from producer_scrounger.core.models import (
    EssClassification,
    EssResult,
    check_probability,
)

logger = logging.getLogger(__name__)


# ============================================================================
# MODULE-LEVEL CODE (importable)
# ============================================================================

# Below this distance from p = 1 the explicit limit formulas are used.
LIMIT_EPS = 1e-9

# f^{-1} bisection settings
F_INVERSE_XTOL = 1e-12
F_INVERSE_MAXITER = 60

# Relative distance to gamma_s treated as the n = 2 degenerate point
GAMMA_S_RTOL = 1e-12


def _check_group_size(n: int) -> None:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 2:
        raise DomainError(f"group size n must be an integer >= 2, got {n!r}")


def _validate_common(n: int, s: float, gamma: float) -> None:
    _check_group_size(n)
    if not (math.isfinite(s) and 0.0 <= s <= 1.0):
        raise DomainError(f"finder's share s must lie in [0, 1], got {s!r}")
    if not (math.isfinite(gamma) and gamma >= 0.0):
        raise DomainError(f"gamma must be a finite number >= 0, got {gamma!r}")


@dataclass(frozen=True)
class ForagingParams:
    """Parameters of the Foraging game.

    Attributes:
        n: Group size (>= 2)
        s: Finder's share in [0, 1]
        gamma: Calories of low-hanging fruit (>= 0)
    """

    n: int
    s: float
    gamma: float

    def __post_init__(self) -> None:
        _validate_common(self.n, self.s, self.gamma)

    @property
    def food_producer(self) -> float:
        """F_P, calories found by a producer."""
        return 1.0 + self.gamma

    @property
    def food_scrounger(self) -> float:
        """F_S, calories found by a scrounger."""
        return self.gamma

    def as_dict(self) -> dict[str, Any]:
        return {"n": self.n, "s": self.s, "gamma": self.gamma}


@dataclass(frozen=True)
class ModifiedForagingParams(ForagingParams):
    """Parameters of the modified Foraging game, where fallen food is eaten
    by scroungers only.

    ``producer_keeps_all`` selects the producer's constant payoff: ``False``
    gives s * F_P (the producer only consumes the finder's share), ``True``
    gives F_P.
    """

    producer_keeps_all: bool = False

    def as_dict(self) -> dict[str, Any]:
        return {**super().as_dict(), "producer_keeps_all": self.producer_keeps_all}


@dataclass(frozen=True)
class GammaBounds:
    """Thresholds of the interior-ESS regime.

    For gamma < gamma1 everybody produces, for gamma > gamma2 everybody
    scrounges. ``gamma_s`` is only set for n = 2, where both bounds
    coincide with it.
    """

    gamma1: float
    gamma2: float
    gamma_s: Optional[float] = None


def pure_payoffs_given_k(params: ForagingParams, k: int) -> tuple[float, float]:
    """Payoffs of a producer and of a scrounger when exactly ``k`` animals produce.

    Args:
        params: Game parameters
        k: Number of producers in the group, the focal producer included

    Returns:
        (pi_P, pi_S) as in the pure-strategy payoff table

    Raises:
        DomainError: If k lies outside [0, n]

    Examples:
        >>> pure_payoffs_given_k(ForagingParams(n=2, s=0.5, gamma=0.0), 1)
        (0.75, 0.25)
    """
    n, s = params.n, params.s
    if not 0 <= k <= n:
        raise DomainError(f"k must lie in [0, {n}], got {k}")
    fp = params.food_producer
    sharers = 1 + n - k
    producer = s * fp + (1.0 - s) * fp / sharers
    scrounger = params.food_scrounger + k * (1.0 - s) * fp / sharers
    return producer, scrounger


def _geometric_sum(n: int, p: npt.ArrayLike) -> Any:
    # sum_{j < n} p^j == (1 - p^n) / (1 - p)
    return P.polyval(p, np.ones(n))


def _weighted_sum(n: int, p: npt.ArrayLike) -> Any:
    # sum_{i <= n-2} (n-1-i) p^i == (n(1-p) + p^n - 1) / (1-p)^2
    return P.polyval(p, np.arange(n - 1, 0, -1, dtype=float))


def _near_one(p: npt.ArrayLike) -> Any:
    return (1.0 - np.asarray(p, dtype=float)) < LIMIT_EPS


def _like_input(values: Any) -> Any:
    # floats in, float out; arrays in, arrays out
    arr = np.asarray(values, dtype=float)
    return float(arr) if arr.ndim == 0 else arr


def mean_inv_one_plus(trials: int, p: float) -> float:
    """E[1/(1+X)] for X ~ Binomial(trials, p), in closed form.

    (1 - (1-p)^(trials+1)) / ((trials+1) p), and 1 at p = 0.
    """
    check_probability(p, "p")
    if p == 0.0:
        return 1.0
    m = trials + 1
    return (1.0 - (1.0 - p) ** m) / (m * p)


def mean_ratio(trials: int, p: float) -> float:
    """E[X/(2+trials-X)] for X ~ Binomial(trials, p), in closed form.

    p((m)(1-p) + p^m - 1) / (m (1-p)^2) with m = trials + 1, and
    trials/2 at p = 1.
    """
    check_probability(p, "p")
    if p == 1.0:
        return trials / 2.0
    m = trials + 1
    return p * (m * (1.0 - p) + p**m - 1.0) / (m * (1.0 - p) ** 2)


def producer_payoff(params: ForagingParams, p: npt.ArrayLike) -> Any:
    """pi_{1,p}; equals F_P at p = 1.

    Vectorised over ``p``.
    """
    check_probability(p, "p")
    n, s, fp = params.n, params.s, params.food_producer
    p_arr = np.asarray(p, dtype=float)
    closed = s * fp + (1.0 - s) * fp * _geometric_sum(n, p_arr) / n
    return _like_input(np.where(_near_one(p_arr), fp, closed))


def scrounger_payoff(params: ForagingParams, p: npt.ArrayLike) -> Any:
    """pi_{0,p}; equals F_S + (n-1)(1-s)F_P/2 at p = 1.

    Vectorised over ``p``.
    """
    check_probability(p, "p")
    n, s, fp, fs = params.n, params.s, params.food_producer, params.food_scrounger
    p_arr = np.asarray(p, dtype=float)
    closed = fs + (1.0 - s) * fp * p_arr * _weighted_sum(n, p_arr) / n
    limit = fs + (n - 1) * (1.0 - s) * fp / 2.0
    return _like_input(np.where(_near_one(p_arr), limit, closed))


def food_production(params: ForagingParams, p: npt.ArrayLike) -> Any:
    """Total food found by the group when everybody produces with probability ``p``."""
    p_arr = np.asarray(p, dtype=float)
    return _like_input(
        params.n * (p_arr * params.food_producer + (1.0 - p_arr) * params.food_scrounger)
    )


def threshold_fn_f(n: int, p: npt.ArrayLike) -> Any:
    """The strictly decreasing threshold function f.

    f(p) = ((1 - p^n)/(1 - p) - n p)/(1 - p), extended by continuity to
    f(1) = -n(n-3)/2. Evaluated through its polynomial expansion
    1 - sum_{i <= n-3} (n-2-i) p^{i+1}; f is identically 1 for n = 2.

    Examples:
        >>> float(threshold_fn_f(4, 1.0))
        -2.0
    """
    _check_group_size(n)
    check_probability(p, "p")
    p_arr = np.asarray(p, dtype=float)
    coeffs = np.zeros(max(n - 1, 1))
    coeffs[0] = 1.0
    # coefficient of p^m is -(n-1-m) for 1 <= m <= n-2
    coeffs[1:] = -np.arange(n - 2, 0, -1, dtype=float)
    closed = P.polyval(p_arr, coeffs)
    return _like_input(np.where(_near_one(p_arr), -n * (n - 3) / 2.0, closed))


def abundance_fn_A(n: int, s: float, gamma: npt.ArrayLike) -> Any:
    """A(gamma) = n (1 - 1 / ((1 - s)(1 + gamma))), strictly increasing in gamma.

    Raises:
        PreconditionError: If s >= 1
        DomainError: If gamma is negative
    """
    _check_group_size(n)
    if s >= 1.0:
        raise PreconditionError(f"A(gamma) needs s < 1, got s={s}")
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0):
        raise DomainError(f"gamma must be >= 0, got {gamma!r}")
    out = n * (1.0 - 1.0 / ((1.0 - s) * (1.0 + g)))
    return float(out) if out.ndim == 0 else out


def gamma_bounds(n: int, s: float) -> GammaBounds:
    """Interior-regime thresholds gamma1 and gamma2 (and gamma_s when n = 2).

    Examples:
        >>> gamma_bounds(2, 0.5).gamma_s
        3.0
    """
    _check_group_size(n)
    if s >= 1.0:
        raise PreconditionError(f"gamma bounds need s < 1, got s={s}")
    gamma1 = 2.0 / ((n - 1) * (1.0 - s)) - 1.0
    gamma2 = n / ((n - 1) * (1.0 - s)) - 1.0
    if n == 2:
        gamma_s = (1.0 + s) / (1.0 - s)
        return GammaBounds(gamma1=gamma_s, gamma2=gamma_s, gamma_s=gamma_s)
    return GammaBounds(gamma1=gamma1, gamma2=gamma2)


def rc_guarantee(n: int, s: float) -> bool:
    """True when 3 <= n < min(1 + 1/s, 1 + 2/(1-s)).

    Under this condition pi* is guaranteed to strictly decrease on some
    sub-interval of [gamma1, gamma2].
    """
    if n < 3 or not 0.0 < s < 1.0:
        return False
    return n < min(1.0 + 1.0 / s, 1.0 + 2.0 / (1.0 - s))


def _invert_f(n: int, target: float) -> float:
    return float(
        optimize.bisect(
            lambda p: float(threshold_fn_f(n, p)) - target,
            0.0,
            1.0,
            xtol=F_INVERSE_XTOL,
            maxiter=F_INVERSE_MAXITER,
        )
    )


def analytic_ess(params: ForagingParams) -> EssResult:
    """ESS of the Foraging game from the threshold characterisation.

    gamma < gamma1 gives all-producer, gamma > gamma2 all-scrounger, and in
    between p* = f^{-1}(A(gamma)). For n = 2 the regimes meet at gamma_s,
    where every strategy earns the same and no ESS exists.

    Args:
        params: Game parameters with s < 1

    Returns:
        EssResult with p*, pi* and the total food found at the ESS

    Raises:
        PreconditionError: If s = 1
    """
    n, s, gamma = params.n, params.s, params.gamma
    if s >= 1.0:
        raise PreconditionError("analytic ESS needs s < 1")
    game = foraging_game(params)

    if n == 2:
        gamma_s = (1.0 + s) / (1.0 - s)
        if abs(gamma - gamma_s) <= GAMMA_S_RTOL * max(1.0, gamma_s):
            return EssResult.degenerate()
        p_star = 1.0 if gamma < gamma_s else 0.0
    else:
        target = abundance_fn_A(n, s, gamma)
        if target <= -n * (n - 3) / 2.0:
            p_star = 1.0
        elif target >= 1.0:
            p_star = 0.0
        else:
            p_star = _invert_f(n, target)
            logger.debug("f^-1(%.6g) = %.12g for n=%d", target, p_star, n)

    if p_star >= 1.0:
        classification = EssClassification.ALL_PRODUCER
    elif p_star <= 0.0:
        classification = EssClassification.ALL_SCROUNGER
    else:
        classification = EssClassification.INTERIOR
    return EssResult(
        classification=classification,
        p_star=p_star,
        pi_star=mixed_payoff(game, p_star, p_star),
        total_production=float(food_production(params, p_star)),
    )


def modified_producer_payoff(params: ModifiedForagingParams, p: npt.ArrayLike) -> Any:
    """Producer payoff of the modified game: a constant, whatever ``p``."""
    check_probability(p, "p")
    fp = params.food_producer
    value = fp if params.producer_keeps_all else params.s * fp
    return _like_input(np.full(np.shape(p), value, dtype=float))


def modified_scrounger_payoff(params: ModifiedForagingParams, p: npt.ArrayLike) -> Any:
    """Scrounger payoff of the modified game.

    F_S + (1 - s) F_P E[Y / (n - Y)] with Y ~ Binomial(n - 1, p) the number
    of producing co-players; the expectation is an exact sum over Y.
    """
    check_probability(p, "p")
    n, s = params.n, params.s
    p_arr = np.asarray(p, dtype=float)
    y = np.arange(n, dtype=float).reshape((-1,) + (1,) * p_arr.ndim)
    weights = stats.binom.pmf(y, n - 1, p_arr)
    expectation = np.sum(weights * y / (n - y), axis=0)
    return _like_input(
        params.food_scrounger + (1.0 - s) * params.food_producer * expectation
    )


def foraging_game(params: ForagingParams) -> GameInstance:
    """GameInstance of the Foraging game at fixed parameters."""
    return GameInstance(
        producer=lambda p: producer_payoff(params, p),
        scrounger=lambda p: scrounger_payoff(params, p),
        label=f"foraging(n={params.n},s={params.s:g},gamma={params.gamma:g})",
        production=lambda p: food_production(params, p),
        params=params.as_dict(),
    )


def modified_foraging_game(params: ModifiedForagingParams) -> GameInstance:
    """GameInstance of the modified Foraging game."""
    return GameInstance(
        producer=lambda p: modified_producer_payoff(params, p),
        scrounger=lambda p: modified_scrounger_payoff(params, p),
        label=(
            f"foraging-modified(n={params.n},s={params.s:g},gamma={params.gamma:g})"
        ),
        production=lambda p: food_production(params, p),
        params=params.as_dict(),
    )


def foraging_family(n: int, s: float) -> GameFamily:
    """gamma -> Foraging game; gamma_s is a singular point when n = 2."""
    _validate_common(n, s, 0.0)
    singular = ((1.0 + s) / (1.0 - s),) if n == 2 and s < 1.0 else ()
    return GameFamily(
        build=lambda gamma: foraging_game(ForagingParams(n=n, s=s, gamma=gamma)),
        label=f"foraging(n={n},s={s:g})",
        params={"game": "foraging", "n": n, "s": s},
        singular_points=singular,
    )


def modified_foraging_family(
    n: int, s: float, producer_keeps_all: bool = False
) -> GameFamily:
    """gamma -> modified Foraging game."""
    _validate_common(n, s, 0.0)
    return GameFamily(
        build=lambda gamma: modified_foraging_game(
            ModifiedForagingParams(
                n=n, s=s, gamma=gamma, producer_keeps_all=producer_keeps_all
            )
        ),
        label=f"foraging-modified(n={n},s={s:g})",
        params={
            "game": "foraging-modified",
            "n": n,
            "s": s,
            "producer_keeps_all": producer_keeps_all,
        },
    )


# ============================================================================
# MARIMO NOTEBOOK (interactive documentation)
# ============================================================================

app = marimo.App(width="medium")


@app.cell
def _():
    import marimo as mo
    import numpy as np
    import pandas as pd
    from producer_scrounger.core.foraging import (
        ForagingParams,
        analytic_ess,
        gamma_bounds,
        producer_payoff,
        scrounger_payoff,
        threshold_fn_f,
    )
    return (
        mo,
        np,
        pd,
        ForagingParams,
        analytic_ess,
        gamma_bounds,
        producer_payoff,
        scrounger_payoff,
        threshold_fn_f,
    )


@app.cell
def _(mo):
    mo.md("""
    # 🐒 The Foraging Game

    Producers search the canopy and find `1 + γ` calories, scroungers pick
    up `γ` calories of low-hanging fruit. A producer eats the **finder's
    share** `s`, the rest falls and is split between the producer and every
    scrounger.
    """)
    return


@app.cell
def _(mo):
    n_slider = mo.ui.slider(2, 10, value=3, label="n")
    s_slider = mo.ui.slider(0.0, 0.95, step=0.05, value=0.4, label="s")
    mo.hstack([n_slider, s_slider])
    return (n_slider, s_slider)


@app.cell
def _(mo, gamma_bounds, n_slider, s_slider):
    _b = gamma_bounds(n_slider.value, s_slider.value)
    mo.callout(
        mo.md(f"Interior regime: γ ∈ [{_b.gamma1:.4f}, {_b.gamma2:.4f}]"),
        kind="info",
    )
    return


@app.cell
def _(mo, np, pd, ForagingParams, analytic_ess, n_slider, s_slider):
    _rows = []
    for _g in np.linspace(0.0, 3.0, 31):
        _r = analytic_ess(ForagingParams(n=n_slider.value, s=s_slider.value, gamma=float(_g)))
        _rows.append({
            "gamma": round(float(_g), 3),
            "regime": _r.classification.value,
            "p_star": _r.p_star,
            "pi_star": _r.pi_star,
        })
    mo.vstack([
        mo.md("## Analytic ESS along γ"),
        mo.ui.table(pd.DataFrame(_rows), selection=None),
    ])
    return


@app.cell
def _(mo, np, pd, threshold_fn_f):
    _p = np.linspace(0.0, 1.0, 11)
    _df = pd.DataFrame({"p": _p, **{f"f (n={k})": threshold_fn_f(k, _p) for k in (2, 3, 4, 5)}})
    mo.accordion({"Threshold function f": mo.ui.table(_df, selection=None)})
    return


if __name__ == "__main__":
    app.run()
