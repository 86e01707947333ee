# -*- coding: utf-8 -*-
"""Atomic text writes (temp file in the target directory + os.replace).

Floats are rendered with 17 significant digits so files round-trip exactly
and identical runs produce identical bytes.
"""

from __future__ import annotations

import json
import logging
import math
import os
import tempfile
from pathlib import Path
from typing import Any, Union

from core.errors import DatasetIOError

log = logging.getLogger(__name__)

PathLike = Union[str, Path]


def fmt_float(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def write_text_atomic(path: PathLike, text: str) -> Path:
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp", dir=str(target.parent))
        try:
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
                f.write(text)
            os.replace(tmp, target)
        except BaseException:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise
    except OSError as exc:
        raise DatasetIOError(f"cannot write {target}: {exc}") from exc
    log.debug("wrote %s (%d chars)", target, len(text))
    return target


def _json_safe(obj: Any) -> Any:
    # NaN/inf are not valid JSON; emit null instead
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    return obj


def dumps_json(data: Any) -> str:
    return json.dumps(_json_safe(data), indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def write_json_atomic(path: PathLike, data: Any) -> Path:
    return write_text_atomic(path, dumps_json(data))


def read_json(path: PathLike) -> Any:
    p = Path(path)
    try:
        with open(p, "r", encoding="utf-8") as f:
            return json.load(f)
    except FileNotFoundError as exc:
        raise DatasetIOError(f"file not found: {p}") from exc
    except json.JSONDecodeError as exc:
        raise DatasetIOError(f"{p} is not valid JSON: {exc}") from exc
    except OSError as exc:
        raise DatasetIOError(f"cannot read {p}: {exc}") from exc
