"""Exception hierarchy.

Domain errors subclass ``ValueError`` so callers that already guard numeric
input with ``except ValueError`` keep working.
"""
from __future__ import annotations


class ProducerScroungerError(ValueError):
    """Base class for all recoverable errors raised by this package."""


class DomainError(ProducerScroungerError):
    """A probability or parameter lies outside its domain."""


class PreconditionError(ProducerScroungerError):
    """An operation was called outside the regime where it is defined."""


class MultipleCrossingsError(ProducerScroungerError):
    """The payoff gap changes sign more than once, or from - to +."""


class NonFiniteEvaluationError(ProducerScroungerError):
    """A payoff or test function returned NaN or an infinity."""


class SweepError(ProducerScroungerError):
    """A solver error raised at a specific gamma of a sweep."""

    def __init__(self, gamma: float, cause: Exception) -> None:
        self.gamma = gamma
        self.cause = cause
        super().__init__(f"at gamma={gamma!r}: {cause}")


class ConfigError(ProducerScroungerError):
    """A run configuration is malformed or has unknown keys."""


class InternalInvariantError(RuntimeError):
    """A mathematical guarantee was violated; this is a bug, not bad input."""
