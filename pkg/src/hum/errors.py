"""Exception hierarchy shared across the engine."""

from __future__ import annotations


class HumError(Exception):
    """Base class for every error the engine raises deliberately."""


class ParseError(HumError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{line}:{column}: {message}"
        super().__init__(message)


class AtmsError(HumError):
    """Violation of a truth-maintenance precondition (duplicate node, bad weight, ...)."""


class ModelError(HumError):
    """Violation of a modeling-language precondition (unknown value, arity, ...)."""


class ContradictoryEvidenceError(HumError):
    """No consistent world remains; carries one minimal conflicting nogood."""

    def __init__(self, nogood_names: tuple[str, ...]):
        self.nogood_names = nogood_names
        shown = "{" + ", ".join(nogood_names) + "}"
        super().__init__(f"contradictory evidence: every world violates nogood {shown}")
