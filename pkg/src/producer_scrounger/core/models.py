"""Data models for ESS computation and gamma sweeps.

This module defines the value types shared by the solvers, the sweep
machinery and the command-line front end. Every type is an immutable
dataclass, so results can be passed between threads without copying.
"""
from __future__ import annotations

import marimo
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Any, Iterator, Optional

import numpy as np
import numpy.typing as npt
import pandas as pd

from producer_scrounger.core.errors import DomainError

if TYPE_CHECKING:
    from producer_scrounger.core.game import GameInstance


# ============================================================================
# MODULE-LEVEL CODE (importable)
# ============================================================================

SWEEP_COLUMNS = ("gamma", "p_star", "pi_star", "total_production", "classification")


def check_probability(value: Any, name: str = "p") -> None:
    """Raise ``DomainError`` unless every entry of ``value`` is a finite
    number in [0, 1].

    Accepts Python scalars and numpy arrays alike.
    """
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name} must be finite, got {value!r}")
    if np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError(f"{name} must lie in [0, 1], got {value!r}")


class EssClassification(Enum):
    """Qualitative regime of an evolutionarily stable strategy.

    Attributes:
        ALL_PRODUCER: Everybody produces (p* = 1)
        ALL_SCROUNGER: Everybody scrounges (p* = 0)
        INTERIOR: Mixed ESS with p* strictly between 0 and 1
        DEGENERATE: All strategies are payoff-equivalent, no ESS exists
    """

    ALL_PRODUCER = "AllProducer"
    ALL_SCROUNGER = "AllScrounger"
    INTERIOR = "Interior"
    DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class MixedStrategy:
    """Play producer with probability ``p``, scrounger otherwise."""

    p: float

    def __post_init__(self) -> None:
        check_probability(self.p, "p")


@dataclass(frozen=True)
class EssResult:
    """Outcome of an ESS computation.

    Attributes:
        classification: Regime of the equilibrium
        p_star: Producer probability at the ESS (None when degenerate)
        pi_star: Payoff at the ESS, pi_{p*, p*} (None when degenerate)
        total_production: Gamma at the ESS, when the game defines it
        verified: Outcome of the sufficiency check, None if not run
    """

    classification: EssClassification
    p_star: Optional[float] = None
    pi_star: Optional[float] = None
    total_production: Optional[float] = None
    verified: Optional[bool] = None

    def __post_init__(self) -> None:
        degenerate = self.classification is EssClassification.DEGENERATE
        if degenerate and self.p_star is not None:
            raise DomainError("a degenerate result carries no p_star")
        if not degenerate and (self.p_star is None or self.pi_star is None):
            raise DomainError(
                f"{self.classification.value} result needs p_star and pi_star"
            )
        if self.classification is EssClassification.INTERIOR:
            assert self.p_star is not None
            if not 0.0 < self.p_star < 1.0:
                raise DomainError(f"interior p_star must be in (0, 1), got {self.p_star}")

    @classmethod
    def degenerate(cls, verified: Optional[bool] = None) -> EssResult:
        return cls(EssClassification.DEGENERATE, verified=verified)

    def summary(self) -> str:
        """One-line report, e.g. ``AllProducer p★=1 π★=2``."""
        if self.classification is EssClassification.DEGENERATE:
            return "Degenerate (no ESS)"
        parts = [
            self.classification.value,
            f"p★={_fmt(self.p_star)}",
            f"π★={_fmt(self.pi_star)}",
        ]
        if self.total_production is not None:
            parts.append(f"Γ★={_fmt(self.total_production)}")
        return " ".join(parts)


def _fmt(value: Optional[float]) -> str:
    if value is None:
        return "-"
    return f"{value:.10g}"


@dataclass(frozen=True)
class SolverConfig:
    """Numerical settings of the grid-then-bisection ESS solver.

    Attributes:
        grid_points: Number of equally spaced points on [0, 1]
        root_tol: Absolute tolerance of the bisection on p
        gap_tol: |h(p)| at or below this counts as indifference
    """

    grid_points: int = 2001
    root_tol: float = 1e-10
    gap_tol: float = 1e-9

    def __post_init__(self) -> None:
        if self.grid_points < 3:
            raise DomainError(f"grid_points must be >= 3, got {self.grid_points}")
        if not (self.root_tol > 0 and self.gap_tol > 0):
            raise DomainError("solver tolerances must be positive")

    @property
    def grid(self) -> npt.NDArray[np.float64]:
        return np.linspace(0.0, 1.0, self.grid_points)


@dataclass(frozen=True)
class ChickenMatrix:
    """Two-player payoff matrix (R, S, T, P) of a producer-scrounger game.

    R: producer meets producer, S: producer meets scrounger,
    T: scrounger meets producer, P: scrounger meets scrounger.
    """

    R: float
    S: float
    T: float
    P: float

    @property
    def is_chicken(self) -> bool:
        return self.T > self.R > self.S > self.P

    def as_game(self, label: Optional[str] = None) -> GameInstance:
        """Wrap the matrix as a ``GameInstance`` of a 2-player symmetric game."""
        from producer_scrounger.core.game import GameInstance

        r, s, t, p_ = self.R, self.S, self.T, self.P
        return GameInstance(
            producer=lambda p: p * r + (1.0 - p) * s,
            scrounger=lambda p: p * t + (1.0 - p) * p_,
            label=label or f"chicken(R={r:g},S={s:g},T={t:g},P={p_:g})",
            params={"R": r, "S": s, "T": t, "P": p_},
        )


@dataclass(frozen=True)
class SweepRow:
    """One gamma of a sweep. Payoff fields are None only for degenerate rows."""

    gamma: float
    classification: EssClassification
    p_star: Optional[float] = None
    pi_star: Optional[float] = None
    total_production: Optional[float] = None
    second: Optional[float] = None

    @classmethod
    def from_result(
        cls, gamma: float, result: EssResult, second: Optional[float] = None
    ) -> SweepRow:
        return cls(
            gamma=gamma,
            classification=result.classification,
            p_star=result.p_star,
            pi_star=result.pi_star,
            total_production=result.total_production,
            second=second,
        )


@dataclass(frozen=True)
class SweepTable:
    """Ordered sweep rows plus the metadata needed to reproduce them.

    A table with ``second_name`` set is the concatenation of several
    one-axis sweeps, one block per value of the second parameter. Within
    each block, gamma is strictly increasing.

    Supports iteration: `for row in table: ...`
    """

    rows: tuple[SweepRow, ...]
    metadata: dict[str, Any] = field(default_factory=dict)
    second_name: Optional[str] = None

    def __post_init__(self) -> None:
        for block in self.blocks():
            gammas = [row.gamma for row in block]
            if any(b <= a for a, b in zip(gammas, gammas[1:])):
                raise DomainError("sweep rows must be strictly increasing in gamma")

    def __len__(self) -> int:
        return len(self.rows)

    def __iter__(self) -> Iterator[SweepRow]:
        return iter(self.rows)

    def __getitem__(self, index: int) -> SweepRow:
        return self.rows[index]

    @property
    def columns(self) -> list[str]:
        cols = list(SWEEP_COLUMNS)
        if self.second_name is not None:
            cols.insert(1, self.second_name)
        return cols

    def blocks(self) -> list[tuple[SweepRow, ...]]:
        """Split the rows into runs sharing the same second-axis value."""
        if not self.rows:
            return []
        out: list[tuple[SweepRow, ...]] = []
        start = 0
        for i in range(1, len(self.rows)):
            if self.rows[i].second != self.rows[i - 1].second:
                out.append(self.rows[start:i])
                start = i
        out.append(self.rows[start:])
        return out

    def column(self, name: str) -> list[Any]:
        if name == "classification":
            return [row.classification.value for row in self.rows]
        if name == self.second_name:
            return [row.second for row in self.rows]
        return [getattr(row, name) for row in self.rows]

    @property
    def dataframe(self) -> pd.DataFrame:
        """Rows as a DataFrame in the fixed output column order."""
        return pd.DataFrame({name: self.column(name) for name in self.columns})

    def __repr__(self) -> str:
        label = self.metadata.get("game", "?")
        return f"SweepTable(game={label!r}, rows={len(self.rows)})"


@dataclass(frozen=True)
class RcInterval:
    """A gamma interval over which the equilibrium payoff strictly decreases.

    Attributes:
        gamma_lo: Start of the decreasing run
        gamma_hi: End of the decreasing run
        drop: value(gamma_lo) - value(gamma_hi), always positive
    """

    gamma_lo: float
    gamma_hi: float
    drop: float

    def __post_init__(self) -> None:
        if not self.gamma_lo < self.gamma_hi:
            raise DomainError("RcInterval needs gamma_lo < gamma_hi")
        if not (math.isfinite(self.drop) and self.drop > 0):
            raise DomainError(f"RcInterval drop must be positive, got {self.drop}")

    def contains(self, gamma: float) -> bool:
        return self.gamma_lo <= gamma <= self.gamma_hi

    def as_dict(self) -> dict[str, float]:
        return {"gamma_lo": self.gamma_lo, "gamma_hi": self.gamma_hi, "drop": self.drop}


# ============================================================================
# MARIMO NOTEBOOK (interactive documentation)
# ============================================================================

app = marimo.App(width="medium")


@app.cell
def _():
    import marimo as mo
    from producer_scrounger.core.models import (
        ChickenMatrix,
        EssClassification,
        EssResult,
        SweepRow,
        SweepTable,
    )
    return (mo, ChickenMatrix, EssClassification, EssResult, SweepRow, SweepTable)


@app.cell
def _(mo):
    mo.md("# Data Models")
    return


@app.cell
def _(mo, EssClassification):
    mo.vstack([
        mo.md("## `EssClassification` (Enum)"),
        mo.md("\n".join(f"- `{c.name}` = `{c.value}`" for c in EssClassification)),
    ])
    return


@app.cell
def _(mo, ChickenMatrix):
    # A textbook game of chicken: T > R > S > P
    _m = ChickenMatrix(R=3.0, S=1.0, T=4.0, P=0.0)
    _game = _m.as_game()
    mo.vstack([
        mo.md("## 🐔 `ChickenMatrix`"),
        mo.md(f"`{_m}` is chicken: **{_m.is_chicken}**"),
        mo.md(f"Payoff gap at p=0.5: `{_game.producer(0.5) - _game.scrounger(0.5)}`"),
    ])
    return


@app.cell
def _(mo, EssClassification, EssResult, SweepRow, SweepTable):
    _rows = tuple(
        SweepRow.from_result(
            g,
            EssResult(EssClassification.ALL_PRODUCER, p_star=1.0, pi_star=1.0 + g),
        )
        for g in (0.0, 0.5, 1.0)
    )
    _table = SweepTable(_rows, metadata={"game": "demo"})
    mo.vstack([
        mo.md("## 📋 `SweepTable`"),
        mo.ui.table(_table.dataframe, selection=None),
    ])
    return


if __name__ == "__main__":
    app.run()
