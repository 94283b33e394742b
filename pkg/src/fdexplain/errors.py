"""Shared exception types."""


class UsageError(ValueError):
    """An operation was invoked outside its contract (bad input, violated precondition)."""


class ModelSyntaxError(UsageError):
    """Model-file syntax error carrying a source position."""

    def __init__(self, message: str, line: int, column: int | None = None):
        where = f"line {line}" + (f", column {column}" if column is not None else "")
        super().__init__(f"{where}: {message}")
        self.line = line
        self.column = column
