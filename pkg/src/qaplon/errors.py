"""Exception types shared across the package."""


class QaplonError(Exception):
    """Base class for package-specific errors."""


class ParseError(QaplonError):
    """Malformed instance or artifact file.

    Carries the 1-based line/column of the offending token when known.
    """

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}" + (
                f", column {column})" if column is not None else ")"
            )
        super().__init__(message)


class SizeGuardError(QaplonError):
    """Instance too large for exhaustive enumeration."""


class ComputeError(QaplonError):
    """Internal consistency failure or non-recoverable numeric problem."""
