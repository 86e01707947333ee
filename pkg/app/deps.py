# -*- coding: utf-8 -*-
"""Runtime dependency checks for wraploss."""
from __future__ import annotations

from importlib import import_module
from importlib.metadata import PackageNotFoundError, version
from typing import List, Sequence, Tuple

# (pip name, import name, minimum major.minor)
RUNTIME_PACKAGES: Sequence[Tuple[str, str, Tuple[int, int]]] = (
    ("numpy", "numpy", (1, 22)),
)


def _major_minor(text: str) -> Tuple[int, int]:
    parts = []
    for piece in text.split(".")[:2]:
        digits = "".join(ch for ch in piece if ch.isdigit())
        parts.append(int(digits) if digits else 0)
    while len(parts) < 2:
        parts.append(0)
    return parts[0], parts[1]


def missing_runtime_packages(packages: Sequence[Tuple[str, str, Tuple[int, int]]] = RUNTIME_PACKAGES) -> List[str]:
    """Pip requirement strings for packages that are absent or too old."""
    problems: List[str] = []
    for pip_name, import_name, minimum in packages:
        req = f"{pip_name}>={minimum[0]}.{minimum[1]}"
        try:
            import_module(import_name)
        except ModuleNotFoundError:
            problems.append(req)
            continue
        try:
            installed = version(pip_name)
        except PackageNotFoundError:
            continue  # importable but not installed via pip (vendored, source tree)
        if _major_minor(installed) < minimum:
            problems.append(f"{req} (found {installed})")
    return problems


def ensure_runtime_deps() -> None:
    """Raise RuntimeError with install guidance if required deps are missing."""
    problems = missing_runtime_packages()
    if not problems:
        return
    raise RuntimeError(
        "wraploss needs: " + ", ".join(problems) + "\n\n"
        "Install with:\n"
        "  pip install -r requirements.txt\n"
        "  pip install -e ."
    )
