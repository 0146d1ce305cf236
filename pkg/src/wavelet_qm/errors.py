"""Exception hierarchy.

Every numerical precondition failure derives from ``PreconditionError`` so the
CLI can map it onto a single exit code.
"""


class PreconditionError(ValueError):
    """A numerical precondition of an operation does not hold."""


class GridMismatchError(PreconditionError):
    pass


class TruncationError(PreconditionError):
    """The grid cuts off a non-negligible part of a wave packet."""


class UnderResolutionError(PreconditionError):
    pass


class BoundaryLeakError(PreconditionError):
    def __init__(self, message, leaked_mass):
        super().__init__(message)
        self.leaked_mass = leaked_mass


class CalibrationError(PreconditionError):
    def __init__(self, message, leakage):
        super().__init__(message)
        self.leakage = leakage


class ConfigError(ValueError):
    """Malformed or unknown configuration."""
