"""Architecture boundary checks.

Runs a lightweight static import scan to prevent layer inversions.

Usage:
    python tools/check_architecture.py

Exit code:
    0 = OK
    1 = violations found
"""

from __future__ import annotations

import ast
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]

PROJECT_PACKAGES = {"core", "domain", "storage", "services", "infra", "app", "wraploss"}

# Project packages each layer may import (itself always allowed).
LAYER_RULES = {
    "core": {"allowed": set()},
    "domain": {"allowed": {"core"}},
    "infra": {"allowed": set()},
    "storage": {"allowed": {"core", "domain", "infra"}},
    "services": {"allowed": {"core", "domain", "storage", "infra"}},
    "app": {"allowed": {"core", "domain", "storage", "services", "infra"}},
}

# Third-party packages the lower layers may use.
THIRD_PARTY_ALLOWED = {"numpy"}
STDLIB = set(getattr(sys, "stdlib_module_names", ()))


def top_package(modname: str) -> str | None:
    if not modname:
        return None
    return modname.split(".")[0]


def file_layer(path: Path) -> str | None:
    try:
        rel = path.relative_to(ROOT)
    except ValueError:
        return None
    if not rel.parts:
        return None
    return rel.parts[0]


def scan_file(path: Path) -> list[tuple[str, str]]:
    """Return list of (imported_top_pkg, detail)"""
    try:
        tree = ast.parse(path.read_text(encoding="utf-8"), filename=str(path))
    except SyntaxError:
        return []

    imports: list[tuple[str, str]] = []
    for node in ast.walk(tree):
        if isinstance(node, ast.Import):
            for alias in node.names:
                pkg = top_package(alias.name)
                if pkg:
                    imports.append((pkg, alias.name))
        elif isinstance(node, ast.ImportFrom):
            if node.module and node.level == 0:
                pkg = top_package(node.module)
                if pkg:
                    imports.append((pkg, node.module))
    return imports


def check_file(path: Path, layer: str) -> list[str]:
    allowed = LAYER_RULES[layer]["allowed"] | {layer}
    out: list[str] = []
    for pkg, detail in scan_file(path):
        if pkg in PROJECT_PACKAGES:
            if pkg not in allowed:
                out.append(f"{path.relative_to(ROOT)} imports '{detail}' (layer={layer})")
        elif layer in {"core", "domain", "infra"} and STDLIB and pkg not in STDLIB and pkg != "__future__":
            if pkg not in THIRD_PARTY_ALLOWED:
                out.append(f"{path.relative_to(ROOT)} imports third-party '{detail}' (layer={layer})")
    return out


def find_violations(root: Path = ROOT) -> list[str]:
    violations: list[str] = []
    for f in sorted(root.rglob("*.py")):
        if "__pycache__" in f.parts or "examples" in f.relative_to(root).parts:
            continue
        layer = file_layer(f)
        if layer not in LAYER_RULES:
            continue
        violations.extend(check_file(f, layer))
    return violations


def main() -> int:
    violations = find_violations()
    if violations:
        print("Architecture violations found:\n")
        for v in violations:
            print(" -", v)
        print("\nFix: move logic to lower layers or pass data in through a service.")
        return 1

    print("OK: no architecture boundary violations.")
    return 0


if __name__ == "__main__":
    sys.exit(main())
