# -*- coding: utf-8 -*-
"""Shared value types (pure, test-friendly)."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Optional


class Severity(str, Enum):
    INFO = "info"
    WARNING = "warning"
    ERROR = "error"


@dataclass(frozen=True)
class Issue:
    """One validation finding.

    ``context`` is the dotted config path the issue refers to (e.g. ``train.lr``).
    """

    code: str
    message: str
    severity: Severity = Severity.ERROR
    context: Optional[str] = None

    def describe(self) -> str:
        where = f"{self.context}: " if self.context else ""
        return f"[{self.code}] {where}{self.message}"


def errors_only(issues: Iterable[Issue]) -> List[Issue]:
    return [it for it in issues if it.severity == Severity.ERROR]
