"""Exception hierarchy shared by every fblkit module."""


class FblkitError(ValueError):
    """Base class for all toolkit errors."""


class InvalidParameterError(FblkitError):
    pass


# channel construction / words
class RowSumError(FblkitError):
    pass


class NegativeEntryError(FblkitError):
    pass


class DegenerateAlphabetError(FblkitError):
    pass


class LengthMismatchError(FblkitError):
    pass


class SymbolOutOfRangeError(FblkitError):
    pass


class DimensionMismatchError(FblkitError):
    pass


# measures
class UndefinedDensityError(FblkitError):
    """An output symbol has zero probability under the ensemble."""


class NonConvergenceError(FblkitError):
    """Blahut-Arimoto hit ``max_iter`` before reaching the gap tolerance.

    The best iterate is kept on ``.result`` so callers can still use it.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


# bounds
class InfiniteBoundError(FblkitError):
    pass


class InfeasibleSlackError(FblkitError):
    pass


class DomainError(FblkitError):
    pass


# montecarlo
class InstanceTooLargeError(FblkitError):
    pass


class ZeroDispersionError(FblkitError):
    pass


# cli
class SpecParseError(FblkitError):
    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
        self.line = line
        self.column = column
        self.detail = message
