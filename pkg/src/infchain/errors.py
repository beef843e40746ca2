"""Exception hierarchy shared by every module."""


class ChainError(Exception):
    """Base class for all errors raised by infchain."""


class DomainError(ChainError, ValueError):
    """An argument lies outside the domain of the operation."""


class ContractionError(ChainError, ValueError):
    """A model violates the contraction condition ``sum(a_j) < 1``."""


class CapacityError(ChainError):
    """A request exceeds the configured resource limits."""


class ConfigError(ChainError, ValueError):
    """An experiment configuration failed validation."""


class NumericError(ChainError, ArithmeticError):
    """A numerical procedure failed.

    Parameters
    ----------
    message : str
        Human readable diagnostic.
    best : float, optional
        Best value found before the failure (e.g. the best grid value of a
        supremum search).
    step : int, optional
        Time index at which a simulation produced a non-finite value.
    """

    def __init__(self, message, best=None, step=None):
        super().__init__(message)
        self.best = best
        self.step = step
