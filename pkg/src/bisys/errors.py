"""Exception hierarchy shared by all bisys modules."""


class BisysError(Exception):
    """Base class for every error raised by this package."""


class DomainError(BisysError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class UsageError(BisysError, ValueError):
    """Inputs are individually valid but cannot be combined."""


class QuantumNumberError(DomainError):
    pass


class SupercriticalCouplingError(DomainError):
    pass


class IntegrationError(BisysError, RuntimeError):
    """A fixed-step orbit integration could not continue.

    ``time`` is the simulation time of the step that failed.
    """

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class SearchError(BisysError, RuntimeError):
    """An eigenvalue could not be bracketed in the scan window."""


class ExtrapolationError(BisysError, RuntimeError):
    pass


class ConfigError(BisysError, ValueError):
    """Invalid run configuration; ``line`` is 1-based when known."""

    def __init__(self, message, line=None, key=None):
        where = f" (line {line})" if line is not None else ""
        super().__init__(f"{message}{where}")
        self.line = line
        self.key = key
