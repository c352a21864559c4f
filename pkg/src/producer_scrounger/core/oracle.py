"""Brute-force oracles.

Independent reference computations used to cross-check the closed forms
and the ESS solver. Each oracle sums or iterates directly and never calls
the formula it is used to validate.
"""
from __future__ import annotations

import marimo
import math
from dataclasses import dataclass

import numpy as np

from producer_scrounger.core.errors import DomainError
from producer_scrounger.core.foraging import (
    ForagingParams,
    ModifiedForagingParams,
    pure_payoffs_given_k,
)
from producer_scrounger.core.game import GameInstance, mixed_payoff
from producer_scrounger.core.models import check_probability


# ============================================================================
# MODULE-LEVEL CODE (importable)
# ============================================================================


@dataclass(frozen=True)
class BinomialSpec:
    """X ~ Binomial(trials, success_prob)."""

    trials: int
    success_prob: float

    def __post_init__(self) -> None:
        if self.trials < 0:
            raise DomainError(f"trials must be >= 0, got {self.trials}")
        check_probability(self.success_prob, "success_prob")

    def pmf(self, k: int) -> float:
        n, p = self.trials, self.success_prob
        return math.comb(n, k) * p**k * (1.0 - p) ** (n - k)


def brute_mean_inv_one_plus(spec: BinomialSpec) -> float:
    """E[1/(1+X)] by direct summation over the support."""
    return math.fsum(spec.pmf(k) / (1 + k) for k in range(spec.trials + 1))


def brute_mean_ratio(spec: BinomialSpec) -> float:
    """E[X/(2+n-X)] by direct summation over the support."""
    n = spec.trials
    return math.fsum(spec.pmf(k) * k / (2 + n - k) for k in range(n + 1))


def brute_foraging_payoffs(params: ForagingParams, p: float) -> tuple[float, float]:
    """(pi_{1,p}, pi_{0,p}) summed over the number of producing co-players.

    A focal producer sees 1 + k producers, a focal scrounger sees k.
    """
    others = BinomialSpec(params.n - 1, p)
    producer = math.fsum(
        others.pmf(k) * pure_payoffs_given_k(params, 1 + k)[0]
        for k in range(params.n)
    )
    scrounger = math.fsum(
        others.pmf(k) * pure_payoffs_given_k(params, k)[1] for k in range(params.n)
    )
    return producer, scrounger


def monte_carlo_modified_scrounger(
    params: ModifiedForagingParams, p: float, samples: int = 200_000, seed: int = 0
) -> tuple[float, float]:
    """Sampled scrounger payoff of the modified game.

    Returns:
        (mean, standard error of the mean)
    """
    rng = np.random.default_rng(seed)
    producers = rng.binomial(params.n - 1, p, size=samples)
    payoff = params.food_scrounger + (1.0 - params.s) * params.food_producer * (
        producers / (params.n - producers)
    )
    return float(payoff.mean()), float(payoff.std(ddof=1) / math.sqrt(samples))


def best_response_set(
    game: GameInstance, p: float, grid: int, tol: float = 1e-9
) -> frozenset[float]:
    """Grid points q maximising pi_{q,p}, up to ``tol``.

    By bilinearity the result is {0}, {1} or the whole grid.
    """
    if grid < 2:
        raise DomainError(f"grid must be >= 2, got {grid}")
    qs = [float(q) for q in np.linspace(0.0, 1.0, grid)]
    values = [mixed_payoff(game, q, p) for q in qs]
    best = max(values)
    return frozenset(q for q, v in zip(qs, values) if v >= best - tol)


def adaptive_dynamics(
    game: GameInstance, p0: float, eta: float = 0.01, steps: int = 10_000
) -> float:
    """Iterate p <- clamp(p + eta * h(p)) and return the final p."""
    check_probability(p0, "p0")
    if not 0.0 < eta < 1.0:
        raise DomainError(f"eta must lie in (0, 1), got {eta}")
    p = p0
    for _ in range(steps):
        gap = float(game.producer(p)) - float(game.scrounger(p))
        p = min(1.0, max(0.0, p + eta * gap))
    return p


# ============================================================================
# MARIMO NOTEBOOK (interactive documentation)
# ============================================================================

app = marimo.App(width="medium")


@app.cell
def _():
    import marimo as mo
    from producer_scrounger.core.foraging import (
        ForagingParams,
        foraging_game,
        mean_inv_one_plus,
    )
    from producer_scrounger.core.oracle import (
        BinomialSpec,
        adaptive_dynamics,
        brute_mean_inv_one_plus,
    )
    return (
        mo,
        ForagingParams,
        foraging_game,
        mean_inv_one_plus,
        BinomialSpec,
        adaptive_dynamics,
        brute_mean_inv_one_plus,
    )


@app.cell
def _(mo, BinomialSpec, brute_mean_inv_one_plus, mean_inv_one_plus):
    _brute = brute_mean_inv_one_plus(BinomialSpec(3, 0.5))
    mo.md(f"""
    # 🔍 Oracles

    `E[1/(1+X)]`, X ~ B(3, 0.5): direct sum `{_brute}`,
    closed form `{mean_inv_one_plus(3, 0.5)}`.
    """)
    return


@app.cell
def _(mo, ForagingParams, foraging_game, adaptive_dynamics):
    _game = foraging_game(ForagingParams(n=4, s=0.4, gamma=0.7))
    _ends = {p0: adaptive_dynamics(_game, p0) for p0 in (0.1, 0.5, 0.9)}
    mo.md("\n".join(f"- from p₀ = {k}: p = `{v:.6f}`" for k, v in _ends.items()))
    return


if __name__ == "__main__":
    app.run()
