"""Exception types shared across the package."""


class SolitonKitError(Exception):
    """Base class for all package errors."""


class DegenerateMetricError(SolitonKitError):
    """Metric matrix is singular or not positive-definite at a point."""


class DomainError(SolitonKitError):
    """A field leaves its admissible range (tau <= 0, ell <= 0, ...)."""


class JetOrderError(SolitonKitError):
    """A field was evaluated with too few derivatives for the operation."""


class ExcludedPointError(SolitonKitError):
    """The quantity is undefined at this point (zero vector, excluded set)."""


class PreconditionError(SolitonKitError):
    """An operation's declared precondition failed numerically."""


class SingularityError(SolitonKitError):
    """Evaluation at a singular parameter value (sigma = c, tau = 2c, ...)."""


class IntervalSplitError(SolitonKitError):
    """A monotonicity requirement fails inside an integration interval."""


class DivisionByZeroError(SolitonKitError, ZeroDivisionError):
    """Exact division by the zero rational function."""


class UnknownScenarioError(SolitonKitError, KeyError):
    """Requested scenario or checker id is not in the catalog."""
