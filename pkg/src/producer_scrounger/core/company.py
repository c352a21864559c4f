"""The Company game.

``n`` workers each choose to *produce* (pay an energetic cost ``c``, and
with probability ``p_succ`` make a product of quality gamma) or to
*scrounge* (pay nothing, and with probability ``p_succ`` make a product of
quality a*gamma). A worker's salary is the weighted average

    sigma_i = s q_i + (1 - s)/(n - 1) * sum_{j != i} q_j

and its payoff is phi(sigma_i) - c_i for a non-decreasing utility phi.

Expected payoffs are computed exactly by enumerating how many co-players
made a gamma product, an a*gamma product, or nothing.
"""
from __future__ import annotations

import marimo
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Union

import numpy as np
import numpy.typing as npt
from scipy.special import comb

from producer_scrounger.core.errors import (
    DomainError,
    InternalInvariantError,
    PreconditionError,
)
from producer_scrounger.core.game import GameFamily, GameInstance
from producer_scrounger.core.models import (
    ChickenMatrix,
    EssClassification,
    EssResult,
    check_probability,
)

logger = logging.getLogger(__name__)


# ============================================================================
# MODULE-LEVEL CODE (importable)
# ============================================================================

# sinh(s * gamma) = 1 here; beyond it the chicken-regime pi* decreases
SINH_ONE = math.log(1.0 + math.sqrt(2.0))

# Margin added above max(1, SINH_ONE / s) when choosing gamma0
GAMMA0_MARGIN = 0.5


@dataclass(frozen=True)
class Linear:
    """phi(x) = x."""

    def __call__(self, x: npt.ArrayLike) -> Any:
        return np.asarray(x, dtype=float)


@dataclass(frozen=True)
class ExpSaturating:
    """phi(x) = 1 - exp(-rate * x)."""

    rate: float = 2.0

    def __post_init__(self) -> None:
        if not self.rate > 0:
            raise DomainError(f"utility rate must be > 0, got {self.rate}")

    def __call__(self, x: npt.ArrayLike) -> Any:
        return -np.expm1(-self.rate * np.asarray(x, dtype=float))


@dataclass(frozen=True)
class CappedLinear:
    """phi(x) = min(cap, x)."""

    cap: float = 1.0

    def __post_init__(self) -> None:
        if not self.cap > 0:
            raise DomainError(f"utility cap must be > 0, got {self.cap}")

    def __call__(self, x: npt.ArrayLike) -> Any:
        return np.minimum(self.cap, np.asarray(x, dtype=float))


UtilityKind = Union[Linear, ExpSaturating, CappedLinear]


def utility_eval(kind: UtilityKind, x: float) -> float:
    """Apply a utility function to a non-negative salary.

    Examples:
        >>> utility_eval(CappedLinear(1.0), 2.5)
        1.0
    """
    if not (math.isfinite(x) and x >= 0):
        raise DomainError(f"salary must be a finite number >= 0, got {x!r}")
    return float(kind(x))


def parse_utility(text: str) -> UtilityKind:
    """Parse ``linear``, ``exp[:RATE]`` or ``cap[:CAP]``."""
    name, _, arg = text.strip().lower().partition(":")
    try:
        if name == "linear" and not arg:
            return Linear()
        if name == "exp":
            return ExpSaturating(float(arg)) if arg else ExpSaturating()
        if name == "cap":
            return CappedLinear(float(arg)) if arg else CappedLinear()
    except ValueError as exc:
        raise DomainError(f"invalid utility {text!r}: {exc}") from exc
    raise DomainError(f"unknown utility {text!r}; use linear, exp:RATE or cap:CAP")


def describe_utility(kind: UtilityKind) -> str:
    if isinstance(kind, ExpSaturating):
        return f"exp:{kind.rate:g}"
    if isinstance(kind, CappedLinear):
        return f"cap:{kind.cap:g}"
    return "linear"


def is_reference_default(kind: UtilityKind) -> bool:
    """False for rates and caps other than the reference values 2 and 1."""
    if isinstance(kind, ExpSaturating):
        return kind.rate == 2.0
    if isinstance(kind, CappedLinear):
        return kind.cap == 1.0
    return True


@dataclass(frozen=True)
class CompanyParams:
    """Parameters of the Company game.

    Attributes:
        n: Number of workers (>= 2)
        gamma: Quality of a producer's product (>= 0)
        s: Weight of one's own product in the salary, in [1/n, 1]
        c: Energetic cost paid by producers (>= 0)
        a: Scrounger quality factor in [0, 1)
        p_succ: Probability that a worker makes a product at all
        utility: Salary-to-payoff map
    """

    n: int
    gamma: float
    s: float
    c: float = 0.0
    a: float = 0.5
    p_succ: float = 0.5
    utility: UtilityKind = field(default_factory=ExpSaturating)

    def __post_init__(self) -> None:
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)) or self.n < 2:
            raise DomainError(f"n must be an integer >= 2, got {self.n!r}")
        if not (math.isfinite(self.gamma) and self.gamma >= 0):
            raise DomainError(f"gamma must be a finite number >= 0, got {self.gamma!r}")
        if not (1.0 / self.n - 1e-12 <= self.s <= 1.0):
            raise DomainError(f"s must lie in [1/n, 1] = [{1.0 / self.n:g}, 1], got {self.s!r}")
        if not (math.isfinite(self.c) and self.c >= 0):
            raise DomainError(f"cost c must be >= 0, got {self.c!r}")
        if not 0.0 <= self.a < 1.0:
            raise DomainError(f"a must lie in [0, 1), got {self.a!r}")
        check_probability(self.p_succ, "p_succ")

    def as_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "gamma": self.gamma,
            "s": self.s,
            "c": self.c,
            "a": self.a,
            "p_succ": self.p_succ,
            "utility": describe_utility(self.utility),
        }


@lru_cache(maxsize=64)
def _outcomes(others: int) -> tuple[npt.NDArray[np.float64], ...]:
    """All (i, j, k) with i + j + k = others and their multinomial counts.

    i co-players made a gamma product, j an a*gamma product, k nothing.
    """
    triples = [
        (i, j, others - i - j) for i in range(others + 1) for j in range(others - i + 1)
    ]
    i, j, k = (np.array(col, dtype=float) for col in zip(*triples))
    counts = comb(others, i) * comb(others - i, j)
    for arr in (i, j, k, counts):
        arr.flags.writeable = False
    return i, j, k, counts


def expected_payoff(params: CompanyParams, focal_is_producer: bool, p: npt.ArrayLike) -> Any:
    """Exact expected payoff of a producer or scrounger against co-players
    who each produce with probability ``p``.

    The n-1 co-players are enumerated by outcome counts, and the focal
    worker's own success is a separate Bernoulli(p_succ) draw.

    Args:
        params: Game parameters
        focal_is_producer: Strategy of the focal worker
        p: Producer probability of each co-player (scalar or array)

    Returns:
        E[phi(sigma)] - c if producing, E[phi(sigma)] otherwise

    Examples:
        >>> params = CompanyParams(n=2, gamma=1.0, s=0.5)
        >>> round(expected_payoff(params, True, 1.0), 5)
        0.53223
    """
    check_probability(p, "p")
    n, s, gamma, a, ps = params.n, params.s, params.gamma, params.a, params.p_succ
    p_arr = np.asarray(p, dtype=float)
    i, j, k, counts = _outcomes(n - 1)
    shape = (-1,) + (1,) * p_arr.ndim
    i, j, k, counts = (arr.reshape(shape) for arr in (i, j, k, counts))

    weights = counts * (p_arr * ps) ** i * ((1.0 - p_arr) * ps) ** j * (1.0 - ps) ** k
    from_others = (1.0 - s) / (n - 1) * gamma * (i + a * j)
    own = gamma if focal_is_producer else a * gamma

    phi = params.utility
    conditional = ps * phi(s * own + from_others) + (1.0 - ps) * phi(from_others)
    value = np.sum(weights * conditional, axis=0)
    if focal_is_producer:
        value = value - params.c
    return float(value) if value.ndim == 0 else value


def total_production(params: CompanyParams, p: npt.ArrayLike) -> Any:
    """Expected Gamma = n p_succ gamma (p + (1 - p) a)."""
    p_arr = np.asarray(p, dtype=float)
    value = params.n * params.p_succ * params.gamma * (p_arr + (1.0 - p_arr) * params.a)
    return float(value) if np.ndim(value) == 0 else value


def chicken_matrix(params: CompanyParams) -> ChickenMatrix:
    """The 2x2 payoff matrix of a two-worker Company game."""
    if params.n != 2:
        raise PreconditionError(f"chicken_matrix needs n = 2, got n = {params.n}")
    return ChickenMatrix(
        R=expected_payoff(params, True, 1.0),
        S=expected_payoff(params, True, 0.0),
        T=expected_payoff(params, False, 1.0),
        P=expected_payoff(params, False, 0.0),
    )


def reference_chicken_matrix(gamma: float, s: float, c: float) -> ChickenMatrix:
    """Closed-form matrix for n = 2, phi(x) = 1 - exp(-2x) and p_succ = a = 1/2.

    Defined for any s < 1, including s < 1/2.
    """
    e = math.exp
    return ChickenMatrix(
        R=0.25 * (3 - e(-2 * gamma) - e(-2 * s * gamma) - e(-2 * (1 - s) * gamma)) - c,
        S=0.25 * (3 - e(-(1 + s) * gamma) - e(-2 * s * gamma) - e(-(1 - s) * gamma)) - c,
        T=0.25 * (3 - e(-(2 - s) * gamma) - e(-s * gamma) - e(-2 * (1 - s) * gamma)),
        P=0.25 * (3 - e(-gamma) - e(-s * gamma) - e(-(1 - s) * gamma)),
    )


def linear_chicken_matrix(
    gamma: float, s: float, c: float, p_succ: float, a: float
) -> ChickenMatrix:
    """Closed-form matrix for n = 2 and linear utility."""
    return ChickenMatrix(
        R=p_succ * gamma - c,
        S=p_succ * gamma * (s + a - s * a) - c,
        T=p_succ * gamma * (1 - s + s * a),
        P=p_succ * a * gamma,
    )


def linear_threshold(params: CompanyParams) -> float:
    """gamma0 = c / (p_succ s (1 - a)), where linear-utility payoffs tie.

    Below gamma0 everybody scrounges, above it everybody produces.
    """
    if not isinstance(params.utility, Linear):
        raise PreconditionError("linear_threshold needs a linear utility")
    denominator = params.p_succ * params.s * (1.0 - params.a)
    if denominator <= 0:
        raise PreconditionError("p_succ * s * (1 - a) must be positive")
    return params.c / denominator


def chicken_ess(m: ChickenMatrix) -> EssResult:
    """Closed-form interior ESS of a game of chicken (T > R > S > P).

    Raises:
        PreconditionError: Naming the first violated inequality
    """
    for name, ok, detail in (
        ("T>R", m.T > m.R, f"T={m.T!r}, R={m.R!r}"),
        ("R>S", m.R > m.S, f"R={m.R!r}, S={m.S!r}"),
        ("S>P", m.S > m.P, f"S={m.S!r}, P={m.P!r}"),
    ):
        if not ok:
            raise PreconditionError(f"not a game of chicken: {name} violated ({detail})")
    denominator = m.S + m.T - m.R - m.P
    return EssResult(
        classification=EssClassification.INTERIOR,
        p_star=(m.S - m.P) / denominator,
        pi_star=(m.S * m.T - m.R * m.P) / denominator,
    )


def closed_form_pi_star(gamma: float, s: float, c0: float) -> float:
    """pi* = 1 - c0 e^{s gamma} coth(s gamma / 2) in the chicken regime."""
    x = s * gamma
    if x == 0:
        raise PreconditionError("s * gamma must be non-zero (coth pole)")
    return 1.0 - c0 * math.exp(x) / math.tanh(x / 2.0)


def pi_star_derivative(gamma: float, s: float, c0: float) -> float:
    """d pi*/d gamma = (c0 s e^{s gamma} / 2) (1 - sinh(s gamma)) / sinh(s gamma / 2)^2."""
    x = s * gamma
    if x == 0:
        raise PreconditionError("s * gamma must be non-zero (coth pole)")
    return (c0 * s * math.exp(x) / 2.0) * (1.0 - math.sinh(x)) / math.sinh(x / 2.0) ** 2


def choose_c0(s: float) -> tuple[float, float]:
    """Pick (gamma0, c0) at which the two-worker game is a game of chicken.

    gamma0 = max(1, ln(1 + sqrt 2)/s) + 1/2 and c0 is the midpoint of the
    admissible cost interval (R - T, S - P) evaluated at zero cost.

    Raises:
        PreconditionError: If s is not in (0, 1)
        InternalInvariantError: If the cost interval is empty
    """
    if not 0.0 < s < 1.0:
        raise PreconditionError(f"choose_c0 needs 0 < s < 1, got s={s}")
    gamma0 = max(1.0, SINH_ONE / s) + GAMMA0_MARGIN
    free = reference_chicken_matrix(gamma0, s, 0.0)
    lo, hi = free.R - free.T, free.S - free.P
    if not lo < hi:
        raise InternalInvariantError(
            f"empty admissible cost interval ({lo!r}, {hi!r}) at gamma0={gamma0!r}, s={s!r}"
        )
    c0 = 0.5 * (lo + hi)
    if not reference_chicken_matrix(gamma0, s, c0).is_chicken:
        raise InternalInvariantError(f"c0={c0!r} does not yield T>R>S>P at gamma0={gamma0!r}")
    logger.debug("choose_c0(s=%g): gamma0=%.6g, c0=%.6g in (%.6g, %.6g)", s, gamma0, c0, lo, hi)
    return gamma0, c0


def chicken_interval(
    s: float, c0: float, gamma0: float, step: float = 1e-3, max_steps: int = 100_000
) -> tuple[float, float]:
    """Largest grid interval around gamma0 where T > R > S > P holds and
    gamma > max(1, ln(1 + sqrt 2)/s).

    Returns:
        (gamma_min, gamma_max), both verified grid points
    """
    floor = max(1.0, SINH_ONE / s)
    if not (gamma0 > floor and reference_chicken_matrix(gamma0, s, c0).is_chicken):
        raise PreconditionError(f"gamma0={gamma0!r} is not inside the chicken regime")

    def walk(direction: int) -> float:
        last = gamma0
        for k in range(1, max_steps):
            g = gamma0 + direction * k * step
            if g <= floor or not reference_chicken_matrix(g, s, c0).is_chicken:
                break
            last = g
        return last

    return walk(-1), walk(+1)


def company_game(params: CompanyParams) -> GameInstance:
    """GameInstance of the Company game at fixed parameters."""
    return GameInstance(
        producer=lambda p: expected_payoff(params, True, p),
        scrounger=lambda p: expected_payoff(params, False, p),
        label=(
            f"company(n={params.n},s={params.s:g},c={params.c:g},a={params.a:g},"
            f"p_succ={params.p_succ:g},utility={describe_utility(params.utility)},"
            f"gamma={params.gamma:g})"
        ),
        production=lambda p: total_production(params, p),
        params=params.as_dict(),
    )


def company_family(
    n: int,
    s: float,
    c: float = 0.0,
    a: float = 0.5,
    p_succ: float = 0.5,
    utility: UtilityKind | None = None,
) -> GameFamily:
    """gamma -> Company game.

    With a linear utility, gamma0 is registered as a singular point.
    """
    kind = utility if utility is not None else ExpSaturating()
    template = CompanyParams(n=n, gamma=0.0, s=s, c=c, a=a, p_succ=p_succ, utility=kind)
    singular: tuple[float, ...] = ()
    if isinstance(kind, Linear) and p_succ * s * (1.0 - a) > 0:
        singular = (linear_threshold(template),)
    echo = {"game": "company", **template.as_dict()}
    echo.pop("gamma")

    def build(gamma: float) -> GameInstance:
        return company_game(
            CompanyParams(n=n, gamma=gamma, s=s, c=c, a=a, p_succ=p_succ, utility=kind)
        )

    return GameFamily(
        build=build,
        label=(
            f"company(n={n},s={s:g},c={c:g},a={a:g},p_succ={p_succ:g},"
            f"utility={describe_utility(kind)})"
        ),
        params=echo,
        singular_points=singular,
    )


# ============================================================================
# MARIMO NOTEBOOK (interactive documentation)
# ============================================================================

app = marimo.App(width="medium")


@app.cell
def _():
    import marimo as mo
    import pandas as pd
    from producer_scrounger.core.company import (
        CompanyParams,
        chicken_ess,
        chicken_matrix,
        choose_c0,
        closed_form_pi_star,
        reference_chicken_matrix,
    )
    return (
        mo,
        pd,
        CompanyParams,
        chicken_ess,
        chicken_matrix,
        choose_c0,
        closed_form_pi_star,
        reference_chicken_matrix,
    )


@app.cell
def _(mo):
    mo.md("""
    # 🏢 The Company Game

    Workers either **produce** (pay a cost, make a product of quality `γ`)
    or **scrounge** (free, quality `aγ`). Salaries mix one's own product
    with the co-workers' products, and a concave utility turns salary into
    payoff.

    With two workers the game is a 2×2 matrix `(R, S, T, P)`. When
    `T > R > S > P` it is a *game of chicken* and has a closed-form ESS.
    """)
    return


@app.cell
def _(mo):
    s_slider = mo.ui.slider(0.55, 0.95, step=0.05, value=0.6, label="s")
    s_slider
    return (s_slider,)


@app.cell
def _(mo, pd, chicken_ess, choose_c0, closed_form_pi_star, reference_chicken_matrix, s_slider):
    _gamma0, _c0 = choose_c0(s_slider.value)
    _rows = []
    for _dg in (-0.2, -0.1, 0.0, 0.1, 0.2):
        _g = _gamma0 + _dg
        _m = reference_chicken_matrix(_g, s_slider.value, _c0)
        _rows.append({
            "gamma": _g,
            "chicken": _m.is_chicken,
            "pi_star (matrix)": chicken_ess(_m).pi_star if _m.is_chicken else None,
            "pi_star (closed form)": closed_form_pi_star(_g, s_slider.value, _c0),
        })
    mo.vstack([
        mo.md(f"γ₀ = `{_gamma0:.5f}`, c₀ = `{_c0:.6f}`"),
        mo.ui.table(pd.DataFrame(_rows), selection=None),
    ])
    return


@app.cell
def _(mo, CompanyParams, chicken_matrix):
    _m = chicken_matrix(CompanyParams(n=2, gamma=1.0, s=0.5))
    mo.accordion({
        "Matrix at γ=1, s=0.5, c=0": mo.md(
            f"R = `{_m.R:.6f}`, S = `{_m.S:.6f}`, T = `{_m.T:.6f}`, P = `{_m.P:.6f}`"
        ),
    })
    return


if __name__ == "__main__":
    app.run()
