"""Exception hierarchy.

Every domain failure raised by the library derives from :class:`WittforgeError`
so the command line front end can turn it into a structured error record.
"""

from __future__ import annotations


class WittforgeError(Exception):
    """Base class for all domain errors."""

    def to_json(self) -> dict:
        return {"error": type(self).__name__, "message": str(self)}


class MixedFields(WittforgeError):
    pass


class DivisionByZero(WittforgeError, ZeroDivisionError):
    pass


class NotIrreducible(WittforgeError, ValueError):
    pass


class NotASubfield(WittforgeError):
    pass


class Reducible(WittforgeError):
    pass


class DimensionMismatch(WittforgeError):
    pass


class Degenerate(WittforgeError):
    pass


class DependentBasis(WittforgeError):
    pass


class DimensionTooSmall(WittforgeError):
    pass


class NotSingular(WittforgeError):
    pass


class BudgetExceeded(WittforgeError):
    pass


class NotPartialIsometry(WittforgeError):
    pass


class OmegaAbsent(WittforgeError):
    pass


class TooSmall(WittforgeError):
    pass


class EvenDegreeForbidden(WittforgeError):
    pass


class NoRoom(WittforgeError):
    pass


class DefectObstruction(WittforgeError):
    pass


class FieldMapObstruction(WittforgeError):
    pass


class TermSyntaxError(WittforgeError, SyntaxError):
    """Malformed S-expression; ``position`` is the character offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class SortError(WittforgeError, TypeError):
    pass


class UnboundVariable(WittforgeError, KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)


class AuditFailure(WittforgeError, AssertionError):
    """An internal cross-check disagreed; always a bug, never user error."""
