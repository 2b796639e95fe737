"""Custom exceptions for entropy-lpp."""


class ContractViolationError(ValueError):
    """A caller broke the precondition of an operation."""

    def __init__(self, message):
        """Initialize the exception."""
        super(ContractViolationError, self).__init__(message)
        self.message = message


class InvalidParameterError(ContractViolationError):
    """Parameter outside its admissible range."""


class UnsortedPointsError(ContractViolationError):
    """Point sequence is not sorted by time."""


class BoxCapacityError(ContractViolationError):
    """More distinct lattice points requested than the box holds."""


class GuardExceededError(ContractViolationError):
    """Exhaustive or Monte Carlo routine asked beyond its size guard."""


class ConfigError(ContractViolationError):
    """Malformed or unknown configuration."""


class ExperimentCheckError(ContractViolationError):
    """A statistical acceptance check failed in strict mode."""


class CurveShapeError(ContractViolationError):
    """A solved curve broke a shape its definition guarantees."""


class EnvironmentFormatError(Exception):
    """Environment document could not be decoded."""

    def __init__(self, message):
        """Initialize the exception."""
        super(EnvironmentFormatError, self).__init__(message)
        self.message = message
