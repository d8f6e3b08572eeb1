"""Exception hierarchy."""


class FunmeanError(Exception):
    """Base class for all errors raised by this package."""


class NotConvexError(FunmeanError, ValueError):
    """Sampled values violate discrete convexity beyond the repair tolerance."""


class ImproperError(FunmeanError, ValueError):
    """A functional would be improper (empty domain or a ``-inf`` value)."""


class ConditioningError(FunmeanError, ArithmeticError):
    """A matrix is too close to singular to invert reliably."""


class ConfigurationError(FunmeanError, ValueError):
    """Inconsistent grids, rules or options."""


class ConvergenceError(FunmeanError, RuntimeError):
    """An iterative eigensolver hit its iteration cap."""


class DimensionError(FunmeanError, ValueError):
    """Operand dimensions do not match."""
