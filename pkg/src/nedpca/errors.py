"""Exception types shared across the package."""

__all__ = [
    "NedpcaError",
    "ParamError",
    "BudgetExceeded",
    "SolveFailed",
    "DomainError",
    "DegenerateDenominator",
    "DimensionMismatch",
]


class NedpcaError(Exception):
    """Base class for every error raised deliberately by this package."""


class ParamError(NedpcaError, ValueError):
    """Model, plan, or call parameters outside their documented domain."""


class BudgetExceeded(NedpcaError):
    """A dense-enumeration request above the configured size cap."""


class SolveFailed(NedpcaError):
    """The stationary linear system turned out singular.

    For valid parameters the chain is irreducible and aperiodic, so this
    signals an escape from parameter validation (or a hand-built matrix).
    """


class DomainError(NedpcaError):
    """An operation was invoked outside its mathematical domain."""


class DegenerateDenominator(DomainError):
    """Pole extraction requested on the line p1 + p2 = 1, where the
    generating-function denominator degenerates to linear order."""


class DimensionMismatch(NedpcaError):
    """Two artifacts with incompatible shapes or parameter sets were combined."""
