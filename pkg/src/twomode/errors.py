"""Exception types shared across the package.

The CLI maps these onto exit codes (config -> 2, numerical -> 3, capacity -> 4).
"""


class TwoModeError(Exception):
    """Base class for all package errors."""


class ConfigError(TwoModeError, ValueError):
    """Invalid user-supplied configuration.

    ``field`` names the offending configuration key when known.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class CapacityError(TwoModeError):
    """Requested photon number exceeds the hierarchy capacity."""


class NumericalError(TwoModeError, ArithmeticError):
    """Integration failed or produced an inconsistent result."""


class UnsupportedConfigurationError(TwoModeError):
    """Operation is only defined for a restricted parameter set."""
