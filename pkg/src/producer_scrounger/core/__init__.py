"""Core game, solver and sweep modules."""
from producer_scrounger.core.models import (
    ChickenMatrix,
    EssClassification,
    EssResult,
    RcInterval,
    SolverConfig,
    SweepRow,
    SweepTable,
)
from producer_scrounger.core.game import (
    GameFamily,
    GameInstance,
    mixed_payoff,
    payoff_gap,
)
from producer_scrounger.core.solver import (
    find_ess,
    first_violation,
    verify_ess,
)
from producer_scrounger.core.analysis import (
    detect_rc,
    sweep,
)

__all__ = [
    # Models
    "ChickenMatrix",
    "EssClassification",
    "EssResult",
    "RcInterval",
    "SolverConfig",
    "SweepRow",
    "SweepTable",
    # Game
    "GameFamily",
    "GameInstance",
    "mixed_payoff",
    "payoff_gap",
    # Solver
    "find_ess",
    "first_violation",
    "verify_ess",
    # Analysis
    "detect_rc",
    "sweep",
]
