# -*- coding: utf-8 -*-
"""
Application bootstrap (runs before any command):
- Init logging under the output root
- Perf logging when WRAPLOSS_PERF is set
- Global crash hooks
"""
from __future__ import annotations

from pathlib import Path
from typing import Optional, Union

from infra.crash_handler import install_global_exception_handlers
from infra.logging_setup import init_logging, init_perf_logging
from infra.paths import logs_dir
from infra.perf import is_enabled as perf_enabled


def bootstrap(out_dir: Optional[Union[str, Path]] = None, level: str = "INFO") -> Path:
    log_dir = logs_dir(out_dir)
    log_path = init_logging(log_dir, level=level)
    if perf_enabled():
        init_perf_logging(log_dir)
    install_global_exception_handlers()
    return log_path
