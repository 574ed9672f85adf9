"""Exception hierarchy for the Benaloh game solvers."""

from __future__ import annotations


class BenalohError(Exception):
    """Base class for every error raised by this package."""


class InvalidArgumentError(BenalohError, ValueError):
    """An argument violates a documented precondition or invariant."""


class ResidualProbabilityError(InvalidArgumentError):
    """A behavioral plan leaves probability mass on never casting."""


class DegenerateTailError(InvalidArgumentError):
    """A mixed strategy puts mass on a round after its budget is exhausted."""


class UnsupportedHorizonError(InvalidArgumentError):
    """The operation is only defined for a specific horizon ``n_max``."""


class NoInteriorEquilibriumError(BenalohError, ArithmeticError):
    """The device indifference system has no unique interior solution."""
