"""Exception hierarchy.

The CLI maps these onto exit codes: configuration problems exit with 2,
numerical failures with 3.
"""


class MusielakError(Exception):
    """Base class for all library errors."""


class DomainError(MusielakError, ValueError):
    """An argument lies outside the domain of the operation (negative
    argument, non-finite value, non-positive potential, ...)."""


class NumericError(MusielakError, ArithmeticError):
    """A numerical procedure failed to reach its tolerance.

    ``achieved`` carries the best tolerance reached, when known.
    """

    def __init__(self, message, achieved=None, iteration=None):
        super().__init__(message)
        self.achieved = achieved
        self.iteration = iteration


class ConfigurationError(MusielakError, ValueError):
    """The requested object is undefined for this configuration,
    e.g. a Sobolev conjugate with ``g_plus >= d / s``."""


class NotInSpaceError(MusielakError, ValueError):
    """The modular of a function is infinite, so no Luxemburg norm exists."""


class PreconditionError(MusielakError, ValueError):
    """A documented precondition of an operation does not hold."""


class GridMismatchError(MusielakError, ValueError):
    """Two grid functions live on different grids."""
