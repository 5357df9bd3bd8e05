"""Exception types raised by lambshift."""


class LambShiftError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(LambShiftError, ValueError):
    """Invalid parameters, truncations or sweep specifications."""


class InvalidDimensionError(ConfigurationError):
    pass


class ResonanceError(LambShiftError, ZeroDivisionError):
    """A closed-form expression hit a pole (zero detuning or similar)."""


class PoleError(ResonanceError):
    pass


class ZeroShiftError(LambShiftError, ZeroDivisionError):
    pass


class NumericFailureError(LambShiftError, ArithmeticError):
    """A numerical routine did not meet its accuracy contract.

    The attribute ``residual`` carries the offending residual when one is
    available.
    """

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class InstabilityError(NumericFailureError):
    """Coupling exceeds the stability bound ``g**2 < (omega_a + lambda) * omega_r / 4``."""


class DegeneracyError(NumericFailureError):
    pass


class AmbiguousLabelError(NumericFailureError):
    """A dressed state could not be attributed to a single bare state."""

    def __init__(self, message, label=None, overlap=None):
        super().__init__(message)
        self.label = label
        self.overlap = overlap


class ResourceLimitError(NumericFailureError):
    pass
