"""Symmetric two-strategy game abstraction.

A game is fully described by its two pure payoff curves: the payoff of a
producer and of a scrounger facing co-players who each produce with
probability ``p``. Mixed payoffs follow from bilinearity in the focal
player's own mixing probability ``q``.
"""
from __future__ import annotations

import marimo
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Optional

import numpy as np
import numpy.typing as npt

from producer_scrounger.core.errors import NonFiniteEvaluationError
from producer_scrounger.core.models import check_probability


# ============================================================================
# MODULE-LEVEL CODE (importable)
# ============================================================================

# Maps a probability (scalar or array) to a payoff of the same shape.
PayoffCurve = Callable[[Any], Any]


@dataclass(frozen=True)
class GameInstance:
    """A symmetric producer-scrounger game with all parameters fixed.

    Attributes:
        producer: p -> pi_{1,p}, vectorised over numpy arrays
        scrounger: p -> pi_{0,p}, vectorised over numpy arrays
        label: Short identifier of the game family and parameters
        production: Optional p -> Gamma, total production at profile p
        params: Parameter echo for reports and output metadata
    """

    producer: PayoffCurve
    scrounger: PayoffCurve
    label: str
    production: Optional[PayoffCurve] = None
    params: Mapping[str, Any] = field(default_factory=dict, compare=False, hash=False)

    @classmethod
    def from_payoff_fn(
        cls, fn: Callable[[float, float], float], label: str
    ) -> GameInstance:
        """Build a game from a scalar ``(q, p) -> payoff`` function.

        Only ``fn(1, p)`` and ``fn(0, p)`` are ever called; other values of
        ``q`` follow from bilinearity.
        """
        producer = np.vectorize(lambda p: fn(1.0, p), otypes=[float])
        scrounger = np.vectorize(lambda p: fn(0.0, p), otypes=[float])
        return cls(producer=producer, scrounger=scrounger, label=label)

    def payoff_fn(self, q: float, p: float) -> float:
        """pi_{q,p}: payoff of a q-mixer against co-players mixing with p."""
        return mixed_payoff(self, q, p)

    def pure_payoffs(self, p: float) -> tuple[float, float]:
        check_probability(p, "p")
        return _finite(self.producer(p), self.label), _finite(self.scrounger(p), self.label)

    def gap_curve(self, grid: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
        """h on a whole grid in one vectorised call; raises on NaN/inf."""
        values = np.asarray(self.producer(grid), dtype=float) - np.asarray(
            self.scrounger(grid), dtype=float
        )
        values = np.broadcast_to(values, np.shape(grid))
        if not np.all(np.isfinite(values)):
            bad = np.asarray(grid)[~np.isfinite(values)]
            raise NonFiniteEvaluationError(
                f"{self.label}: payoff gap is not finite at p={bad[:3].tolist()}"
            )
        return np.array(values, dtype=float)

    def __repr__(self) -> str:
        return f"GameInstance({self.label!r})"


@dataclass(frozen=True)
class GameFamily:
    """A gamma -> GameInstance constructor.

    Attributes:
        build: Returns the game at a given gamma
        label: Family identifier (parameters other than gamma)
        params: Parameter echo, excluding gamma
        singular_points: Gammas at which the family is known to be degenerate
    """

    build: Callable[[float], GameInstance]
    label: str
    params: Mapping[str, Any] = field(default_factory=dict, compare=False, hash=False)
    singular_points: tuple[float, ...] = ()

    def __call__(self, gamma: float) -> GameInstance:
        return self.build(gamma)


def _finite(value: Any, label: str) -> float:
    out = float(value)
    if not np.isfinite(out):
        raise NonFiniteEvaluationError(f"{label}: payoff evaluated to {out}")
    return out


def mixed_payoff(game: GameInstance, q: float, p: float) -> float:
    """Expected payoff of a focal player producing with probability ``q``.

    Args:
        game: The game instance
        q: Focal player's producer probability
        p: Co-players' producer probability

    Returns:
        q * pi_{1,p} + (1 - q) * pi_{0,p}

    Raises:
        DomainError: If q or p lies outside [0, 1]

    Examples:
        >>> from producer_scrounger.core.models import ChickenMatrix
        >>> game = ChickenMatrix(R=3, S=1, T=4, P=0).as_game()
        >>> mixed_payoff(game, 0.5, 1.0)
        3.5
    """
    check_probability(q, "q")
    check_probability(p, "p")
    if q == 1.0:
        return _finite(game.producer(p), game.label)
    if q == 0.0:
        return _finite(game.scrounger(p), game.label)
    producer, scrounger = game.pure_payoffs(p)
    return q * producer + (1.0 - q) * scrounger


def payoff_gap(game: GameInstance, p: float) -> float:
    """h(p) = pi_{1,p} - pi_{0,p}.

    Positive values mean producing is the better reply to a population
    mixing with ``p``.
    """
    producer, scrounger = game.pure_payoffs(p)
    return producer - scrounger


# ============================================================================
# MARIMO NOTEBOOK (interactive documentation)
# ============================================================================

app = marimo.App(width="medium")


@app.cell
def _():
    import marimo as mo
    from producer_scrounger.core.game import GameInstance, mixed_payoff, payoff_gap
    from producer_scrounger.core.models import ChickenMatrix
    return (mo, GameInstance, mixed_payoff, payoff_gap, ChickenMatrix)


@app.cell
def _(mo):
    mo.md("""
    # Games

    A `GameInstance` holds two pure payoff curves. The payoff of a mixed
    strategy `q` against a population mixing with `p` is

    `π(q, p) = q·π(1, p) + (1 − q)·π(0, p)`

    and the sign of the **payoff gap** `h(p) = π(1, p) − π(0, p)` decides
    which pure strategy is the better reply.
    """)
    return


@app.cell
def _(mo):
    q_slider = mo.ui.slider(0.0, 1.0, step=0.05, value=0.5, label="q (own)")
    p_slider = mo.ui.slider(0.0, 1.0, step=0.05, value=0.5, label="p (others)")
    mo.hstack([q_slider, p_slider])
    return (q_slider, p_slider)


@app.cell
def _(mo, ChickenMatrix, mixed_payoff, payoff_gap, q_slider, p_slider):
    _game = ChickenMatrix(R=3.0, S=1.0, T=4.0, P=0.0).as_game()
    mo.callout(
        mo.md(
            f"π({q_slider.value}, {p_slider.value}) = "
            f"`{mixed_payoff(_game, q_slider.value, p_slider.value):.4f}`, "
            f"h({p_slider.value}) = `{payoff_gap(_game, p_slider.value):.4f}`"
        ),
        kind="info",
    )
    return


if __name__ == "__main__":
    app.run()
