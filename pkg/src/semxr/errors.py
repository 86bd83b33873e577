"""Exception types shared across the package."""

from __future__ import annotations


class SemXRError(Exception):
    """Base class for all errors raised by this package."""


class ScenarioParseError(SemXRError):
    """Scenario document is not well-formed JSON.

    Carries the 1-based line/column of the first offending character.
    """

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"parse error at line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class ValidationError(SemXRError):
    """A value violates a documented invariant.

    ``field`` is a dotted path into the scenario document (or the name of the
    offending argument for in-process API calls).
    """

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.message = message
