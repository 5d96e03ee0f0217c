"""Diagnostics collected by the lexer, parser and checker."""

from dataclasses import dataclass, field
from enum import Enum


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    code: str
    message: str
    line: int
    column: int
    length: int = 1

    def format(self, filename: str = "<input>") -> str:
        return (
            f"{filename}:{self.line}:{self.column}: "
            f"{self.severity.value}: {self.message} [{self.code}]"
        )


@dataclass
class DiagnosticSink:
    """Ordered collector shared by all compiler stages."""

    diagnostics: list[Diagnostic] = field(default_factory=list)

    def error(self, code: str, message: str, line: int, column: int, length: int = 1) -> None:
        self.diagnostics.append(Diagnostic(Severity.ERROR, code, message, line, column, length))

    def warning(self, code: str, message: str, line: int, column: int, length: int = 1) -> None:
        self.diagnostics.append(Diagnostic(Severity.WARNING, code, message, line, column, length))

    @property
    def errors(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.severity is Severity.ERROR]

    @property
    def warnings(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.severity is Severity.WARNING]

    def has_errors(self) -> bool:
        return any(d.severity is Severity.ERROR for d in self.diagnostics)

    def extend(self, other: "DiagnosticSink") -> None:
        self.diagnostics.extend(other.diagnostics)
