"""Exception types shared across the toolkit."""


class InvalidInstanceError(ValueError):
    """Construction parameters violate an instance precondition."""


class InvalidDatasetError(ValueError):
    """A training dataset violates the reduction's preconditions."""


class InvalidOverrideError(ValueError):
    """A supplied curvature override is below the function's actual curvature."""


class ZeroSingletonError(ValueError):
    """Curvature operations require f(j) > 0 for every element in play."""


class NonSubmodularError(ValueError):
    """A marginal-gain ratio fell outside [0, 1] beyond float slack."""


class ScaleError(ValueError):
    """Instance exceeds the documented desk-scale limit for an exhaustive operation."""


class GraphParseError(ValueError):
    """Malformed edge-list input; carries the offending line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class InfeasibleConstraintError(ValueError):
    """The constraint family is empty on the given graph."""


class IncompleteSampleError(ValueError):
    """A required sample subset is missing; carries the missing mask."""

    def __init__(self, missing_mask: int, message: str):
        super().__init__(message)
        self.missing_mask = missing_mask


class CertificationError(RuntimeError):
    """A claimed sandwich or fit failed independent re-validation."""


class LearningFailureError(RuntimeError):
    """No separator found; data is non-realizable or the update cap is too low."""
