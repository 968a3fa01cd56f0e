"""Exception hierarchy shared by every stage of the checker."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


class AchieveError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(AchieveError):
    def __init__(self, message: str, span: Optional[SourceSpan] = None):
        self.message = message
        self.span = span
        super().__init__(f"{span}: {message}" if span else message)


class SafetyError(ParseError):
    """A rule contains a variable that no positive literal binds."""

    def __init__(self, variable: str, span: Optional[SourceSpan] = None):
        self.variable = variable
        super().__init__(f"unsafe variable {variable}", span)


class ArityError(ParseError):
    """An annotation mentions a predicate signature the program does not have."""


class SpecViolation(AchieveError):
    """An instance file contradicts the program's input declarations."""


class IncompleteInput(AchieveError):
    """A declared placeholder has no binding."""


class PrefixRangeError(AchieveError, IndexError):
    pass


class GroundingError(AchieveError):
    pass


class NonFiniteGrounding(GroundingError):
    pass


class UnboundPlaceholder(GroundingError):
    pass


class UnsupportedAggregate(GroundingError):
    """An aggregate depends (possibly indirectly) on the rule it occurs in."""


class AssertionEvalError(AchieveError):
    pass


class BudgetExceeded(AchieveError):
    """Raised when enumeration hits a budget limit; never to be read as a pass."""

    def __init__(self, kind: str, count: int):
        self.kind = kind
        self.count = count
        super().__init__(f"budget exceeded ({kind}) after {count}")
