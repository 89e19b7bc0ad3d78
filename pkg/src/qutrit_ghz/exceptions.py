"""Exception types raised across the package."""


class DimensionError(ValueError):
    """Array or register sizes do not match what the operation expects."""


class ConnectivityError(ValueError):
    """A two-qutrit gate acts on a pair that the device does not couple."""


class ConditioningError(ValueError):
    """A confusion matrix is too close to singular to invert."""


class UndefinedPhaseError(ValueError):
    """The argument of a (near) zero complex number was requested."""


class DataError(ValueError):
    """Input data lies outside the physically admissible range."""


class NotClockRepresentableError(ValueError):
    """A basis string with all three levels cannot be drawn on the GHZ clock."""
