"""Exception hierarchy shared across the package."""


class DdbhError(Exception):
    """Base class for all package errors."""


class ConfigError(DdbhError):
    """Malformed or contradictory run configuration."""


class ParameterDomainError(DdbhError):
    """Physical parameters outside their admissible domain."""


class PreconditionError(DdbhError):
    """An operation was called with inputs violating its contract."""


class IntegrationBlowupError(DdbhError):
    """Field amplitude exceeded the blowup guard during time stepping."""

    def __init__(self, step_index, max_abs, cap):
        self.step_index = step_index
        self.max_abs = max_abs
        self.cap = cap
        super().__init__(
            f"integration blew up at step {step_index}: max|field| = {max_abs:.6g} "
            f"exceeds cap {cap:.6g} (reduce dt)"
        )


class TrackingLostError(DdbhError):
    """Domain-wall front tracking found zero or multiple crossings."""


class WallCollisionError(DdbhError):
    """Tracked front approached the parked wall on the ring."""


class BracketingError(DdbhError):
    """Root bracketing failed in a bisection search."""


class ResourceLimitError(DdbhError):
    """A hard resource ceiling (e.g. Fock cutoff) was exceeded."""


class InsufficientDataError(DdbhError):
    """A statistical estimator was given too short a series."""
