"""Custom exceptions for the Liouville solver."""


class LiouvilleError(Exception):
    """Base exception for all solver errors."""

    pass


class InvalidSequence(LiouvilleError):
    """Raised when a coefficient sequence description is malformed (e.g. a zero entry)."""

    pass


class InvalidIndex(LiouvilleError):
    """Raised when a sequence index is out of range."""

    pass


class RatioTestFailed(LiouvilleError):
    """Raised when the tail terms do not decay by at least a factor of two.

    Attributes:
        index: The index i at which t_i / t_{i-1} exceeded 1/2. The caller
            must raise the truncation degree past it.
    """

    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


class DimensionMismatch(LiouvilleError):
    """Raised when vector sizes do not match the polynomial map."""

    pass


class InvalidSystem(LiouvilleError):
    """Raised when a system, parameter or point description is malformed."""

    pass


class NotAZero(LiouvilleError):
    """Raised when a candidate point's residual exceeds the residual tolerance."""

    pass


class PrecisionExhausted(LiouvilleError):
    """Raised when a rank decision falls inside the ambiguous tolerance band."""

    pass


class DistinctnessViolated(LiouvilleError):
    """Raised when x-coordinates are zero or not pairwise distinct."""

    pass


class ZeroPolynomial(LiouvilleError):
    """Raised when a polynomial that must be nonzero vanishes."""

    pass


class TrackingError(LiouvilleError):
    """Base class for failures of the root search and path tracker.

    Attributes:
        path: Accepted path states recorded before the failure.
    """

    def __init__(self, message: str, path: list | None = None):
        super().__init__(message)
        self.path = list(path) if path else []


class SingularJacobian(TrackingError):
    """Raised when the composed Jacobian is numerically singular."""

    pass


class NoConvergence(TrackingError):
    """Raised when Newton's method fails within its iteration budget.

    Attributes:
        residual: Last residual norm seen, if any (drives precision escalation).
    """

    def __init__(self, message: str, path: list | None = None, residual=None):
        super().__init__(message, path)
        self.residual = residual


class StartNotFound(TrackingError):
    """Raised when no admissible start root is found within the budget."""

    pass


class PathEscapedBall(TrackingError):
    """Raised when a tracked point leaves the ball of radius R_max."""

    pass


class SubstepLimit(TrackingError):
    """Raised when a homotopy segment needs more substeps than allowed."""

    pass
