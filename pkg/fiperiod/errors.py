"""Exceptions raised by fiperiod.

Every error derives from :class:`FIPeriodError`; most also derive from the
builtin exception a caller would naturally expect.
"""


class FIPeriodError(Exception):
    """Base class of all fiperiod errors."""


class SpecError(FIPeriodError, ValueError):
    """Malformed module, shape, table or series input.

    :param message:  What is wrong.
    :param location: Where it is wrong, either ``line L column C`` for JSON
        syntax errors or a field path such as ``relations[0].terms[1].inj``.

    """

    def __init__(self, message, location=None):
        self.message = message
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class DegreeMismatchError(FIPeriodError, ValueError):
    pass


class IllDefinedMorphismError(FIPeriodError, ValueError):
    pass


class CoverMismatchError(FIPeriodError, ValueError):
    pass


class IncompleteShapeError(FIPeriodError, ValueError):
    pass


class MissingTableEntryError(FIPeriodError, KeyError):
    pass


class WindowTooShortError(FIPeriodError, ValueError):
    pass


class EmptySeriesError(FIPeriodError, ValueError):
    pass


class InfeasibleSizeError(FIPeriodError):
    """The work estimate at some level exceeds the configured cap."""

    def __init__(self, level, dimension, cap, quantity="ambient dimension"):
        self.level = level
        self.dimension = dimension
        self.cap = cap
        self.quantity = quantity
        super().__init__(f"{quantity} {dimension} at n={level} exceeds the cap {cap}")
