# -*- coding: utf-8 -*-
"""Exception hierarchy for the whole package.

Each class carries the CLI exit code it maps to, so the front end never has
to know about individual failure kinds:

    1 = validation, 2 = numeric/assertion failure, 3 = I/O
"""

from __future__ import annotations

from typing import Any, Dict, List, Optional, Sequence

from core.types import Issue


class WrapLossError(Exception):
    exit_code: int = 2


# --- numeric / contract failures (exit 2) ---

class ArchitectureError(WrapLossError):
    """Invalid layer widths, activation tag, head tag or dropout rate."""


class ShapeError(WrapLossError):
    """Arrays whose shapes do not agree with the network or each other."""


class NumericError(WrapLossError):
    """Non-finite values where finite ones are required."""

    def __init__(self, message: str, *, diagnostics: Optional[Dict[str, Any]] = None) -> None:
        super().__init__(message)
        self.diagnostics: Dict[str, Any] = dict(diagnostics or {})

    def __str__(self) -> str:
        base = super().__str__()
        if not self.diagnostics:
            return base
        details = ", ".join(f"{k}={v}" for k, v in self.diagnostics.items())
        return f"{base} ({details})"


class LabelError(WrapLossError):
    """Class label outside [0, c)."""


class ProbabilityError(WrapLossError):
    """Probability row that is not on the simplex."""


class WeightDomainError(WrapLossError):
    """Wrap weight below its positivity floor."""


class DomainError(WrapLossError):
    """Argument outside the mathematical domain of an operation."""


class DegenerateClassError(WrapLossError):
    """A class with zero samples where at least one is required."""


# --- configuration (exit 1) ---

class ConfigError(WrapLossError):
    exit_code = 1


class ConfigValidationError(ConfigError):
    """Raised with the complete list of violations, never just the first."""

    def __init__(self, issues: Sequence[Issue]) -> None:
        self.issues: List[Issue] = list(issues)
        lines = "\n".join("  - " + it.describe() for it in self.issues)
        super().__init__(f"invalid configuration ({len(self.issues)} issue(s)):\n{lines}")


# --- I/O (exit 3) ---

class DatasetIOError(WrapLossError):
    exit_code = 3


class ParseError(DatasetIOError):
    """Malformed cell in a data file; ``row`` is 1-based, counting data rows."""

    def __init__(self, message: str, *, row: int, column: Any) -> None:
        super().__init__(f"{message} (row {row}, column {column!r})")
        self.row = int(row)
        self.column = column
