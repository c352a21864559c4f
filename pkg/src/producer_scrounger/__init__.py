"""
Producer-Scrounger

Evolutionarily stable strategies of producer-scrounger games, sweeps over
production capacity gamma, and detection of Reverse Correlation: stretches
of gamma along which better producers end up with a lower equilibrium payoff.
Covers:
- The Foraging game, with closed-form payoffs and threshold analysis
- A modified Foraging game in which producers never lose food
- The Company game with exact expected payoffs for any group size

Usage:
    from producer_scrounger import ForagingParams, foraging_game, find_ess

    result = find_ess(foraging_game(ForagingParams(n=3, s=0.4, gamma=1.0)))
    print(result.summary())

    # Full sweep with RC detection
    from producer_scrounger import foraging_family, sweep, detect_rc

    table = sweep(foraging_family(3, 0.4), 0.0, 3.0, 0.01)
    for interval in detect_rc(table):
        print(interval.gamma_lo, interval.gamma_hi, interval.drop)
"""

from producer_scrounger.core.analysis import (
    assert_no_reverse_correlation,
    derivative_check,
    detect_rc,
    gamma_grid,
    necessary_condition_check,
    sweep,
)
from producer_scrounger.core.company import (
    CappedLinear,
    CompanyParams,
    ExpSaturating,
    Linear,
    chicken_ess,
    chicken_interval,
    chicken_matrix,
    choose_c0,
    closed_form_pi_star,
    company_family,
    company_game,
    expected_payoff,
    parse_utility,
    pi_star_derivative,
    utility_eval,
)
from producer_scrounger.core.errors import (
    ConfigError,
    DomainError,
    InternalInvariantError,
    MultipleCrossingsError,
    NonFiniteEvaluationError,
    PreconditionError,
    ProducerScroungerError,
    SweepError,
)
from producer_scrounger.core.foraging import (
    ForagingParams,
    ModifiedForagingParams,
    abundance_fn_A,
    analytic_ess,
    foraging_family,
    foraging_game,
    gamma_bounds,
    modified_foraging_family,
    modified_foraging_game,
    rc_guarantee,
    threshold_fn_f,
)
from producer_scrounger.core.game import GameFamily, GameInstance, mixed_payoff, payoff_gap
from producer_scrounger.core.models import (
    ChickenMatrix,
    EssClassification,
    EssResult,
    MixedStrategy,
    RcInterval,
    SolverConfig,
    SweepRow,
    SweepTable,
)
from producer_scrounger.core.solver import find_ess, first_violation, verify_ess

__version__ = "0.1.0"

__all__ = [
    # Solving
    "find_ess",
    "verify_ess",
    "first_violation",
    # Games
    "GameInstance",
    "GameFamily",
    "mixed_payoff",
    "payoff_gap",
    "ForagingParams",
    "ModifiedForagingParams",
    "foraging_game",
    "foraging_family",
    "modified_foraging_game",
    "modified_foraging_family",
    "analytic_ess",
    "gamma_bounds",
    "threshold_fn_f",
    "abundance_fn_A",
    "rc_guarantee",
    "CompanyParams",
    "Linear",
    "ExpSaturating",
    "CappedLinear",
    "utility_eval",
    "parse_utility",
    "expected_payoff",
    "company_game",
    "company_family",
    "chicken_matrix",
    "chicken_ess",
    "closed_form_pi_star",
    "pi_star_derivative",
    "choose_c0",
    "chicken_interval",
    # Sweeps and RC
    "sweep",
    "gamma_grid",
    "detect_rc",
    "necessary_condition_check",
    "assert_no_reverse_correlation",
    "derivative_check",
    # Models/Types
    "ChickenMatrix",
    "EssClassification",
    "EssResult",
    "MixedStrategy",
    "RcInterval",
    "SolverConfig",
    "SweepRow",
    "SweepTable",
    # Errors
    "ProducerScroungerError",
    "DomainError",
    "PreconditionError",
    "MultipleCrossingsError",
    "NonFiniteEvaluationError",
    "SweepError",
    "ConfigError",
    "InternalInvariantError",
    # Version
    "__version__",
]
