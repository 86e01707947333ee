# -*- coding: utf-8 -*-
"""
domain/parse.py

Strict cell parsing for tabular data files.

Only decimal-point floats are accepted. Blank cells are missing values and
are never imputed.
"""

from __future__ import annotations

import math
from typing import Any, Optional


def is_blank(val: Any) -> bool:
    """True if the value counts as a missing cell."""
    if val is None:
        return True
    # bool is a subclass of int; it is not blank here.
    if isinstance(val, (int, float)):
        return False
    return str(val).strip() == ""


def to_float(val: Any) -> Optional[float]:
    """Finite float or None (blank, malformed or non-finite)."""
    if is_blank(val) or isinstance(val, bool):
        return None
    if isinstance(val, (int, float)):
        out = float(val)
    else:
        s = str(val).strip()
        # "1,5" is rejected rather than guessed at
        if "," in s:
            return None
        try:
            out = float(s)
        except ValueError:
            return None
    return out if math.isfinite(out) else None


def to_label(val: Any) -> Optional[int]:
    """Integer class label or None. "3" and "3.0" both parse; "3.5" does not."""
    f = to_float(val)
    if f is None or not f.is_integer():
        return None
    return int(f)
