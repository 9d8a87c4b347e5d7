"""Exception types shared across the package."""

from __future__ import annotations


class MeasureModesError(Exception):
    """Base class for all package errors."""


class ParseError(MeasureModesError, ValueError):
    def __init__(self, message: str, where: str | None = None):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)


class SpaceMismatchError(MeasureModesError, ValueError):
    def __init__(self, left, right):
        self.left = left
        self.right = right
        super().__init__(f"space mismatch: {left} vs {right}")


class UnsupportedSpaceError(MeasureModesError, ValueError):
    """Raised for operations that need a metric (or a real line) on a space without one."""


class DomainError(MeasureModesError, ValueError):
    """A set component or atom lies outside the space's domain."""


class DivergenceError(MeasureModesError, ArithmeticError):
    """An infinite sum or integral has no finite value.

    ``direction`` is +1 or -1 when the divergence is sign-definite, 0 otherwise.
    ``partial`` is the partial-sum (or partial-integral) bound reached, if any.
    """

    def __init__(self, message: str, direction: int = 1, partial=None):
        self.direction = direction
        self.partial = partial
        super().__init__(message)


class UndefinedIntegralError(MeasureModesError, ArithmeticError):
    """Integrand has a non-integrable singularity with no definite sign."""


class QuadratureError(MeasureModesError, ArithmeticError):
    """Adaptive quadrature ran out of subintervals before reaching tolerance."""
