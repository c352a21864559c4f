"""Run configuration.

A ``RunConfig`` is validated before any computation starts. It can be
loaded from a JSON file whose keys mirror the command-line flags
(``"p-succ"`` or ``"p_succ"``, ``"gamma-range": "0:5:0.01"``, ...), with
explicit flags overriding the file key by key.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from producer_scrounger.core.company import (
    company_family,
    is_reference_default,
    parse_utility,
)
from producer_scrounger.core.errors import ConfigError
from producer_scrounger.core.foraging import foraging_family, modified_foraging_family
from producer_scrounger.core.game import GameFamily, GameInstance
from producer_scrounger.core.models import SolverConfig

GameName = Literal["foraging", "foraging-modified", "company"]
OutputFormat = Literal["csv", "json", "markdown"]


class _Frozen(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class SweepSpec(_Frozen):
    """Uniform gamma grid ``gamma_lo, gamma_lo + step, ...`` up to ``gamma_hi``."""

    gamma_lo: float = Field(ge=0)
    gamma_hi: float = Field(ge=0)
    step: float = Field(gt=0)

    @model_validator(mode="after")
    def _ordered(self) -> SweepSpec:
        if not self.gamma_lo < self.gamma_hi:
            raise ValueError(f"gamma_lo must be < gamma_hi, got {self.gamma_lo}:{self.gamma_hi}")
        return self


class SecondAxis(_Frozen):
    """Outer sweep over ``s`` or ``c``."""

    name: Literal["s", "c"]
    lo: float = Field(ge=0)
    hi: float = Field(ge=0)
    step: float = Field(gt=0)

    @model_validator(mode="after")
    def _ordered(self) -> SecondAxis:
        if not self.lo <= self.hi:
            raise ValueError(f"second axis needs lo <= hi, got {self.lo}:{self.hi}")
        if self.name == "s" and self.hi > 1:
            raise ValueError("second axis s must stay within [0, 1]")
        return self

    def values(self) -> list[float]:
        count = int((self.hi - self.lo) / self.step + 1e-9) + 1
        return [self.lo + k * self.step for k in range(count)]


class SolverOverrides(_Frozen):
    grid_points: int = Field(2001, ge=3)
    root_tol: float = Field(1e-10, gt=0)
    gap_tol: float = Field(1e-9, gt=0)


class OutputSpec(_Frozen):
    path: Optional[Path] = None
    format: Optional[OutputFormat] = None


class RunConfig(_Frozen):
    """Everything that affects a run's results, validated up front."""

    game: GameName = "foraging"
    n: int = Field(2, ge=2, le=64)
    s: float = Field(0.5, ge=0, le=1)
    gamma: float = Field(1.0, ge=0)
    c: float = Field(0.0, ge=0)
    a: float = Field(0.5, ge=0, lt=1)
    p_succ: float = Field(0.5, ge=0, le=1)
    utility: str = "exp:2"
    producer_keeps_all: bool = False
    sweep: Optional[SweepSpec] = None
    second_axis: Optional[SecondAxis] = None
    solver: SolverOverrides = SolverOverrides()
    min_drop: float = Field(1e-6, ge=0)
    output: OutputSpec = OutputSpec()
    workers: int = Field(1, ge=1)

    @field_validator("utility")
    @classmethod
    def _known_utility(cls, value: str) -> str:
        parse_utility(value)  # DomainError is a ValueError
        return value

    @model_validator(mode="after")
    def _consistent(self) -> RunConfig:
        if self.game == "company" and self.s < 1.0 / self.n - 1e-12:
            raise ValueError(f"company game needs s >= 1/n = {1.0 / self.n:g}, got {self.s}")
        if self.second_axis is not None and self.sweep is None:
            raise ValueError("second-axis needs a gamma-range")
        if self.second_axis is not None and self.second_axis.name == "c" and self.game != "company":
            raise ValueError(f"second axis c needs the company game, got {self.game}")
        if (
            self.second_axis is not None
            and self.second_axis.name == "s"
            and self.game == "company"
            and self.second_axis.lo < 1.0 / self.n - 1e-12
        ):
            raise ValueError("company second axis s must start at or above 1/n")
        return self

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            grid_points=self.solver.grid_points,
            root_tol=self.solver.root_tol,
            gap_tol=self.solver.gap_tol,
        )

    def family(self, s: Optional[float] = None, c: Optional[float] = None) -> GameFamily:
        """The configured gamma -> game family, optionally at another s or c."""
        share = self.s if s is None else s
        if self.game == "foraging":
            return foraging_family(self.n, share)
        if self.game == "foraging-modified":
            return modified_foraging_family(self.n, share, self.producer_keeps_all)
        return company_family(
            self.n,
            share,
            c=self.c if c is None else c,
            a=self.a,
            p_succ=self.p_succ,
            utility=parse_utility(self.utility),
        )

    def game_at(self, gamma: Optional[float] = None) -> GameInstance:
        return self.family()(self.gamma if gamma is None else gamma)

    @property
    def extrapolated(self) -> bool:
        """True when a non-default utility rate or cap is in use."""
        return self.game == "company" and not is_reference_default(parse_utility(self.utility))

    def echo(self) -> dict[str, Any]:
        """JSON-ready dump of every setting."""
        return self.model_dump(mode="json")


# Accepted flag names, hyphens normalised to underscores
_FLAT_KEYS = {
    "game",
    "n",
    "s",
    "gamma",
    "c",
    "a",
    "p_succ",
    "utility",
    "producer_keeps_all",
    "gamma_range",
    "second_axis",
    "min_drop",
    "out",
    "format",
    "grid_points",
    "root_tol",
    "gap_tol",
    "workers",
}


def parse_range(text: str) -> dict[str, float]:
    """``"LO:HI:STEP"`` -> sweep fields."""
    parts = str(text).split(":")
    if len(parts) != 3:
        raise ConfigError(f"expected LO:HI:STEP, got {text!r}")
    try:
        lo, hi, step = (float(x) for x in parts)
    except ValueError as exc:
        raise ConfigError(f"expected numbers in LO:HI:STEP, got {text!r}") from exc
    return {"gamma_lo": lo, "gamma_hi": hi, "step": step}


def parse_axis(text: str) -> dict[str, Any]:
    """``"NAME:LO:HI:STEP"`` -> second-axis fields."""
    name, _, rest = str(text).partition(":")
    try:
        bounds = parse_range(rest)
    except ConfigError as exc:
        raise ConfigError(f"expected NAME:LO:HI:STEP, got {text!r}") from exc
    return {"name": name, "lo": bounds["gamma_lo"], "hi": bounds["gamma_hi"], "step": bounds["step"]}


def load_config_file(path: Path) -> dict[str, Any]:
    """Read a JSON object of flag-named settings."""
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    return data


def build_config(
    file_values: Optional[dict[str, Any]] = None, flag_values: Optional[dict[str, Any]] = None
) -> RunConfig:
    """Merge file settings and explicit flags (flags win) into a RunConfig.

    Raises:
        ConfigError: On unknown keys, malformed ranges or failed validation
    """
    flat: dict[str, Any] = {}
    for source in (file_values or {}, flag_values or {}):
        for key, value in source.items():
            if value is None:
                continue
            flat[key.replace("-", "_")] = value

    unknown = sorted(set(flat) - _FLAT_KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")

    nested: dict[str, Any] = {}
    solver: dict[str, Any] = {}
    output: dict[str, Any] = {}
    for key, value in flat.items():
        if key == "gamma_range":
            nested["sweep"] = parse_range(value)
        elif key == "second_axis":
            nested["second_axis"] = parse_axis(value)
        elif key in ("grid_points", "root_tol", "gap_tol"):
            solver[key] = value
        elif key == "out":
            output["path"] = value
        elif key == "format":
            output["format"] = value
        else:
            nested[key] = value
    if solver:
        nested["solver"] = solver
    if output:
        nested["output"] = output

    try:
        return RunConfig.model_validate(nested)
    except ValidationError as exc:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}"
            for err in exc.errors()
        )
        raise ConfigError(problems) from exc
