"""Exception types shared across the package."""


class StretchLabError(Exception):
    """Base class for all package errors."""


class NonHyperbolic(StretchLabError):
    """Matrix is not hyperbolic (|trace| <= 2 + tol); signals a malformed word."""


class CapacityExceeded(StretchLabError):
    """An enumeration would exceed the configured word/orbit budget."""


class NotReduced(StretchLabError):
    """No translate within the search depth lands in the fundamental domain."""


class InvarianceBudgetExceeded(StretchLabError):
    """Point is too deep outside the consulted translate horizon of a factor."""


class StepTooSmall(StretchLabError):
    """Finite-difference step dominated by cancellation noise."""


class NotNegativelyCurved(StretchLabError):
    """Conformal factor produces non-negative curvature somewhere on the grid."""


class NotConverged(StretchLabError):
    """Curve-shortening failed to converge within the iteration budget."""


class NoConvergence(StretchLabError):
    """Max-plus value iteration failed to stabilize (indicates a bug)."""


class PeriodNotFound(StretchLabError):
    """Eventual periodicity of max-plus powers was not detected in the window."""


class EmptyMeasure(StretchLabError):
    """Weighted dirac combination has no positive weight."""


class EmptyWindow(StretchLabError):
    """No primitive classes fall in the requested orbit-sum window."""


class ConfigInvalid(StretchLabError):
    """Experiment config failed validation; message carries the field path."""


class SchemaMismatch(StretchLabError):
    """CSV columns do not match the requested plot kind."""


class StageFailed(StretchLabError):
    """A pipeline stage raised; wraps the underlying module error."""
