"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes: parameter/domain problems are
usage errors (2), problems with the supplied data are data errors (3), and
iteration or factorization breakdowns are numerical failures (4).
"""

from __future__ import annotations


class BetamodeError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(BetamodeError, ValueError):
    """A parameter lies outside its mathematical domain (e.g. beta not in (0,1))."""


class InvalidInputError(BetamodeError, ValueError):
    """Input data violates a structural precondition (shape, finiteness, ...)."""


class DegenerateColumnError(InvalidInputError):
    """A column has zero sample variance where positive variance is required."""

    def __init__(self, column_id: str):
        super().__init__(f"column {column_id!r} has zero sample variance")
        self.column_id = column_id


class DegenerateDataError(InvalidInputError):
    """Ties or collapsed quantiles make the requested construction impossible."""


class CannotPeelError(BetamodeError):
    """No admissible peel exists for the current box (too few points or all ties)."""


class InsufficientPointsError(BetamodeError):
    """A covering round was asked to run on too few remaining points."""

    def __init__(self, round_index: int, remaining: int, message: str | None = None):
        detail = message or (
            f"covering round {round_index} has only {remaining} points remaining"
        )
        super().__init__(detail)
        self.round_index = round_index
        self.remaining = remaining


class NumericalError(BetamodeError, RuntimeError):
    """An iterative or factorization routine failed to converge."""
