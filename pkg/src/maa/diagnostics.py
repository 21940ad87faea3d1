"""Source locations and coded diagnostics shared by all compiler stages."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SourceLoc:
    """1-based position of a token in a model file."""

    file: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


ERROR = "error"
WARNING = "warning"

# Convention rules are warnings; everything else is an error.
_WARNING_CODES = frozenset({"C1", "C2", "C3", "C4"})


def severity_of(code: str) -> str:
    return WARNING if code in _WARNING_CODES else ERROR


@dataclass(frozen=True)
class Diagnostic:
    """One checker or parser finding, identified by a rule code."""

    code: str
    severity: str
    loc: SourceLoc
    message: str

    @classmethod
    def at(cls, code: str, loc: SourceLoc, message: str) -> "Diagnostic":
        return cls(code, severity_of(code), loc, message)

    def sort_key(self) -> tuple:
        return (self.loc.file, self.loc.line, self.loc.column, self.code)

    def render(self) -> str:
        return f"{self.loc} {self.severity} {self.code}: {self.message}"

    def to_json(self) -> dict:
        return {
            "code": self.code,
            "severity": self.severity,
            "file": self.loc.file,
            "line": self.loc.line,
            "column": self.loc.column,
            "message": self.message,
        }


def sort_diagnostics(diags: list[Diagnostic]) -> list[Diagnostic]:
    return sorted(diags, key=Diagnostic.sort_key)


def has_errors(diags: list[Diagnostic]) -> bool:
    return any(d.severity == ERROR for d in diags)
