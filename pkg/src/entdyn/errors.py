"""Exception types raised across the package."""


class EntdynError(Exception):
    """Base class for all package errors."""


class NotHermitian(EntdynError, ValueError):
    pass


class DimensionMismatch(EntdynError, ValueError):
    pass


class EmptyKeepSet(EntdynError, ValueError):
    pass


class IndexOutOfRange(EntdynError, IndexError):
    pass


class DimensionTooSmall(EntdynError, ValueError):
    pass


class NegativeTemperature(EntdynError, ValueError):
    pass


class ResonantDenominator(EntdynError, ZeroDivisionError):
    """A coupled transition has (nearly) vanishing energy difference."""


class NonpositiveX(EntdynError, ValueError):
    pass


class CouplingTooLarge(EntdynError, ValueError):
    pass


class BracketFailure(EntdynError, RuntimeError):
    """No entangled/PPT verdict change was found in the temperature bracket.

    ``rows`` holds whatever sweep rows were evaluated before giving up.
    """

    def __init__(self, message: str, rows=()):
        super().__init__(message)
        self.rows = tuple(rows)


class SchemaError(EntdynError, ValueError):
    pass


class TimescaleViolation(UserWarning):
    """Emitted when a timescale-separation assumption is only marginally met."""


class IoError(EntdynError, OSError):
    """An input or output file could not be read or written."""
