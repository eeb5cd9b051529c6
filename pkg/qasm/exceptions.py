"""
QASM exceptions for qbench.
"""

from dataclasses import dataclass

from django.db import models


class ParseErrorKind(models.TextChoices):
    """Categories of QASM rejection."""
    UNKNOWN_GATE = 'UnknownGate', 'Unknown gate'
    UNDECLARED_REGISTER = 'UndeclaredRegister', 'Undeclared register'
    INDEX_OUT_OF_RANGE = 'IndexOutOfRange', 'Index out of range'
    BAD_ANGLE_EXPR = 'BadAngleExpr', 'Bad angle expression'
    SYNTAX = 'Syntax', 'Syntax error'


@dataclass(frozen=True)
class SourceSpan:
    """1-based position in a QASM source."""

    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.line}:{self.column}"


class ParseError(ValueError):
    """Raised on the first statement a QASM source cannot be read past."""

    def __init__(self, kind: ParseErrorKind, span: SourceSpan, message: str) -> None:
        self.kind = ParseErrorKind(kind)
        self.span = span
        self.message = message or self.kind.label
        super().__init__(f"{self.span}: {self.kind.value}: {self.message}")
