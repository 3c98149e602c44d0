"""Exception hierarchy shared by every module."""
from __future__ import annotations


class WifnError(Exception):
    """Base class for all user-facing errors."""


class ParseError(WifnError):
    def __init__(self, message: str, line: int = 1, column: int = 1, source: str | None = None):
        self.message = message
        self.line = line
        self.column = column
        self.source = source
        where = f"{source}:" if source else ""
        super().__init__(f"{where}{line}:{column}: {message}")


class SortError(WifnError):
    """A term or binding violates the sort discipline (e.g. a compound key)."""


class ContextError(WifnError):
    """Missing or inconsistent typing / key information."""


class RoleError(WifnError):
    """A narration or role file is well formed syntactically but not semantically."""
