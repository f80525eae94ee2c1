"""Exception hierarchy shared across the package.

The CLI maps ValidationError to exit code 2 and NumericalFailure (and its
subclasses) to exit code 3, so library code should raise the most specific
type that applies.
"""

from __future__ import annotations

__all__ = [
    "ValidationError",
    "NumericalFailure",
    "LossOfSignificance",
    "QuadratureBudgetError",
    "DegenerateFunctional",
]


class ValidationError(ValueError):
    """A parameter or input is outside the admissible domain."""


class NumericalFailure(RuntimeError):
    """A computation could not reach the requested accuracy."""


class LossOfSignificance(NumericalFailure):
    """Cancellation or forward instability destroyed the working precision."""


class QuadratureBudgetError(NumericalFailure):
    """A quadrature rule hit its node budget before converging."""


class DegenerateFunctional(NumericalFailure):
    """A moment functional lost positivity or produced a zero norm."""
