"""Exception types raised by the estimators."""


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class UnsupportedSizeError(DomainError):
    """Problem too large for the exhaustive active-set solver."""


class ConditioningError(DomainError):
    """Linear system too ill-conditioned to solve meaningfully."""


class OptimizationError(RuntimeError):
    """No start produced a finite objective value."""
