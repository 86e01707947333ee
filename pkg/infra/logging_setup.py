# -*- coding: utf-8 -*-
"""
Logging setup: one file handler under the output root plus stderr.
Safe to call more than once.
"""
from __future__ import annotations

import logging
from pathlib import Path
from typing import Optional, Union

from infra.paths import logs_dir
from infra.perf import PERF_LOGGER

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def _has_file_handler(logger: logging.Logger, log_path: Path) -> bool:
    return any(
        isinstance(h, logging.FileHandler) and getattr(h, "baseFilename", "") == str(log_path)
        for h in logger.handlers
    )


def init_logging(
    log_dir: Optional[Union[str, Path]] = None,
    filename: str = "wraploss.log",
    level: Union[int, str] = logging.INFO,
) -> Path:
    log_path = (Path(log_dir) if log_dir else logs_dir()) / filename
    log_path.parent.mkdir(parents=True, exist_ok=True)
    root = logging.getLogger()
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
    root.setLevel(level)
    # Don't add multiple handlers if init called twice
    if not _has_file_handler(root, log_path):
        fmt = logging.Formatter(LOG_FORMAT)
        fh = logging.FileHandler(log_path, encoding="utf-8")
        fh.setFormatter(fmt)
        root.addHandler(fh)
        if not any(type(h) is logging.StreamHandler for h in root.handlers):
            sh = logging.StreamHandler()
            sh.setFormatter(fmt)
            root.addHandler(sh)
    return log_path


def init_perf_logging(log_dir: Optional[Union[str, Path]] = None, filename: str = "perf.log") -> Path:
    """Dedicated file handler for timings emitted by infra.perf.span."""
    log_path = (Path(log_dir) if log_dir else logs_dir()) / filename
    log_path.parent.mkdir(parents=True, exist_ok=True)
    logger = logging.getLogger(PERF_LOGGER)
    logger.setLevel(logging.INFO)
    if not _has_file_handler(logger, log_path):
        fh = logging.FileHandler(log_path, encoding="utf-8")
        fh.setLevel(logging.INFO)
        fh.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(fh)
    return log_path
