"""Exception hierarchy shared by the library and the command-line front-end."""


class CasimirError(Exception):
    """Base class for all errors raised by :mod:`casimir_eta`."""


class DomainError(CasimirError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class DataError(CasimirError, ValueError):
    """Malformed or physically invalid optical data."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class FitError(DataError):
    """A least-squares fit could not be carried out."""


class ConfigError(CasimirError, ValueError):
    """Invalid run configuration; ``field`` names the offending key."""

    def __init__(self, message, field=None):
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)
        self.field = field


class ConvergenceError(CasimirError, RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance.

    The best available value and its error estimate are attached so callers
    can decide whether the partial result is usable.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error
