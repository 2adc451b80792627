"""
Error types raised by qarcast.

Data problems, method failures and configuration mistakes are kept apart so
the command line can map each family onto its own exit code.
"""


class QarcastError(Exception):
    """Base class for every error raised by the package."""


# ---------------------------------------------------------------------- #
# Data errors (exit code 3)
# ---------------------------------------------------------------------- #
class DataError(QarcastError, ValueError):
    """The input series or file cannot be used as given."""


class SeriesTooShort(DataError):
    pass


class NonFinite(DataError):
    pass


class EmptyInput(DataError):
    pass


class InsufficientDoF(DataError):
    pass


class NonMonotoneLabels(DataError):
    pass


class EmptyFile(DataError):
    pass


class ParseError(DataError):
    """A row of an input file could not be parsed.

    ``row`` is the 1-based data row (the header is row 0).
    """

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


# ---------------------------------------------------------------------- #
# Argument domain errors
# ---------------------------------------------------------------------- #
class DomainError(QarcastError, ValueError):
    """A numeric argument lies outside the domain of the operation."""


# ---------------------------------------------------------------------- #
# Method errors (exit code 4)
# ---------------------------------------------------------------------- #
class MethodError(QarcastError, RuntimeError):
    """An estimation or interval method failed on valid data."""


class RankDeficient(MethodError):
    pass


class NoConvergence(MethodError):
    pass


# ---------------------------------------------------------------------- #
# Configuration errors (exit code 2)
# ---------------------------------------------------------------------- #
class ConfigError(QarcastError, ValueError):
    """A configuration document is malformed.

    ``key_path`` names the offending entry, e.g. ``methods[2].tau``.
    """

    def __init__(self, message, key_path=None):
        if key_path:
            message = f"{key_path}: {message}"
        super().__init__(message)
        self.key_path = key_path
