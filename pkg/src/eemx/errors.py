"""Exception hierarchy.

Errors fall into three families that map onto CLI exit codes: usage errors
(bad parameters), data errors (malformed input files) and numerical errors
(rank or definiteness failures).
"""


class EemxError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class UsageError(EemxError, ValueError):
    exit_code = 1


class DataError(EemxError, ValueError):
    exit_code = 2


class NumericalError(EemxError, ArithmeticError):
    exit_code = 3


# numerics
class RankDeficient(NumericalError):
    pass


class DimensionMismatch(UsageError):
    pass


class ConstantTarget(NumericalError):
    pass


class NotSymmetric(NumericalError):
    pass


class NotStandardized(NumericalError):
    pass


class NotPositiveDefinite(NumericalError):
    pass


# indices
class ZeroVector(NumericalError):
    pass


class ConstantColumn(NumericalError):
    """The column is a multiple of the intercept, so its I-index is infinite."""


class PerfectCollinearity(NumericalError):
    pass


# model space / selection
class SizeOutOfRange(UsageError):
    pass


class DifferentColumnSizes(UsageError):
    pass


class MixedColumnSizes(UsageError):
    pass


class BudgetExceeded(EemxError):
    exit_code = 3


class IndexOutOfRange(UsageError):
    pass


class ClassTooSmall(UsageError):
    pass


# scoring
class NoResponse(UsageError):
    pass


class EmptyClass(UsageError):
    pass


# fixtures
class SizeError(UsageError):
    pass


# io
class ParseError(DataError):
    def __init__(self, message, row=None, col=None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if col is not None:
            where.append(f"column {col}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.row = row
        self.col = col


class NonNumericCell(ParseError):
    pass


class RaggedRows(ParseError):
    pass


class DuplicateHeader(ParseError):
    pass
