# -*- coding: utf-8 -*-
"""
Centralized path resolver for:
- the output root for run artifacts (WRAPLOSS_OUT, fallback ./runs)
- the log directory under it
"""
from __future__ import annotations

import os
from pathlib import Path
from typing import Optional, Union

OUT_ENV = "WRAPLOSS_OUT"
DEFAULT_OUT = "runs"


def ensure_dir(p: Path) -> Path:
    p.mkdir(parents=True, exist_ok=True)
    return p


def output_root(override: Optional[Union[str, Path]] = None) -> Path:
    """--out-dir beats WRAPLOSS_OUT beats ./runs. Not created here."""
    if override:
        return Path(override)
    env = os.getenv(OUT_ENV, "").strip()
    return Path(env) if env else Path.cwd() / DEFAULT_OUT


def logs_dir(root: Optional[Union[str, Path]] = None) -> Path:
    return ensure_dir(output_root(root) / "logs")
