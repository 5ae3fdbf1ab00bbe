"""Exception types raised by the library."""


class MaxAlgebraError(Exception):
    """Base class for all library errors."""


class DimensionError(MaxAlgebraError, ValueError):
    """Operands have incompatible sizes."""


class PreconditionError(MaxAlgebraError, ValueError):
    """An operation was called outside the regime where it is defined."""


class InconclusiveError(MaxAlgebraError):
    """An iteration hit its step cap without settling."""


class IterationCancelled(MaxAlgebraError):
    """A progress hook asked a long-running iteration to stop."""


class ParseError(MaxAlgebraError, ValueError):
    """Matrix text could not be read; carries a 1-based line and column."""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        where = f"line {line}, column {column}: " if line else ""
        super().__init__(f"{where}{message}")
