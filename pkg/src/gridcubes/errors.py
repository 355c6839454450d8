"""Exception types shared across the package."""


class GridCubesError(Exception):
    """Base class for all package errors."""


class BoundsError(GridCubesError):
    """Geometry referenced coordinates outside the grid."""


class ValidationError(GridCubesError):
    """Malformed input (inverted rectangles, bad fanouts, bad packets)."""


class ConfigError(GridCubesError):
    """Invalid hierarchy configuration."""


class InfeasibleError(GridCubesError):
    """No finite-cost query plan exists (only possible with failures).

    `blocking` holds the failed cells whose unusable data points cross the
    minimal cut, i.e. the ones that would have to be readable for an exact
    answer.
    """

    def __init__(self, message, blocking=()):
        super().__init__(message)
        self.blocking = frozenset(blocking)


class RecoveryError(GridCubesError):
    """A reconstruction path has no usable donors."""


class ScenarioError(GridCubesError):
    """Scenario file problems; `kind` selects the CLI exit code."""

    def __init__(self, message, kind="validation"):
        super().__init__(message)
        self.kind = kind
