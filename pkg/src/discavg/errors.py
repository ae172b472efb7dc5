"""Exception types shared across the package."""

from __future__ import annotations


class DimensionMismatchError(ValueError):
    """Operands disagree structurally (number of variables, components)."""


class DomainError(ValueError):
    """Inputs are outside the mathematical domain of the operation."""


class CapabilityError(RuntimeError):
    """The map or object lacks a capability the operation requires
    (inverse evaluator, closed-form jet, ...)."""


class EscapeError(RuntimeError):
    """An orbit left the computable domain (overflow / non-finite values).

    ``last_index`` is the last iterate index at which the point was still
    finite; ``last_point`` its value there.
    """

    def __init__(self, message: str, last_index: int, last_point=None):
        super().__init__(message)
        self.last_index = last_index
        self.last_point = last_point


class InsufficientDataError(ValueError):
    """Not enough usable data points for a fit."""
