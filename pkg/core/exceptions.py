"""Custom exceptions for the library."""

from typing import Any, Dict


class MCDLabError(Exception):
    """Base exception class for all library errors.

    Keyword arguments are kept as structured details so callers (and the
    CLI) can report them as machine-readable JSON.
    """

    def __init__(self, message: str = "", **details: Any):
        super().__init__(message)
        self.message = message
        self.details: Dict[str, Any] = details

    def to_dict(self) -> Dict[str, Any]:
        """Machine-readable form of the error."""
        payload = {'error': self.__class__.__name__, 'message': self.message}
        payload.update(self.details)
        return payload


class ValidationError(MCDLabError):
    """Exception raised for invalid input data."""
    pass


class DimensionalityError(ValidationError):
    """Exception raised for incompatible dimensions."""
    pass


class ParameterError(ValidationError):
    """Exception raised for invalid parameter values."""
    pass


class BoundExceededError(ValidationError):
    """Exception raised when an exact computation exceeds its size bound."""
    pass


class ConfigurationError(MCDLabError):
    """Exception raised for invalid configuration."""
    pass


class NumericOverflowError(MCDLabError):
    """Exception raised when a computation produces non-finite values."""
    pass


class TrainingDivergedError(MCDLabError):
    """Exception raised when the training loss becomes non-finite."""

    def __init__(self, message: str = "", epoch: int = -1, **details: Any):
        super().__init__(message, epoch=epoch, **details)
        self.epoch = epoch
