"""Exception types raised across the package."""


class LyapoptError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(LyapoptError, ValueError):
    pass


class SchemaError(LyapoptError, ValueError):
    """A scenario document is missing a field or has the wrong shape."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class EvaluationError(LyapoptError, ValueError):
    """A primitive evaluated to a non-finite value."""

    def __init__(self, atom, message):
        self.atom = atom
        super().__init__(f"atom {atom}: {message}")


class BudgetError(LyapoptError, RuntimeError):
    """An enumeration would exceed its configured budget."""


class InfeasiblePointError(LyapoptError, ValueError):
    """A point that must lie in the constraint set does not.

    ``feas_residual`` carries the distance from the point to the set.
    """

    def __init__(self, feas_residual, message=None):
        self.feas_residual = float(feas_residual)
        super().__init__(message or f"point lies outside C (distance {self.feas_residual:.3g})")


class InsufficientDataError(LyapoptError, ValueError):
    pass
