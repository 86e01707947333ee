# -*- coding: utf-8 -*-
"""Block timings.

``span`` always measures (callers read ``.seconds`` for timings.json) and
logs to ``wraploss.perf`` only when WRAPLOSS_PERF is set.
"""

from __future__ import annotations

import logging
import os
import time
from contextlib import contextmanager
from dataclasses import dataclass
from typing import Iterator

PERF_ENV = "WRAPLOSS_PERF"
PERF_LOGGER = "wraploss.perf"

log = logging.getLogger(PERF_LOGGER)


def is_enabled() -> bool:
    return os.environ.get(PERF_ENV, "").strip().lower() in ("1", "true", "yes", "on")


@dataclass
class Timer:
    label: str
    seconds: float = 0.0


@contextmanager
def span(label: str, *, threshold_ms: float = 50.0) -> Iterator[Timer]:
    timer = Timer(label)
    t0 = time.perf_counter()
    try:
        yield timer
    finally:
        timer.seconds = time.perf_counter() - t0
        if is_enabled() and timer.seconds * 1000.0 >= threshold_ms:
            log.info("%s %.1fms", label, timer.seconds * 1000.0)
