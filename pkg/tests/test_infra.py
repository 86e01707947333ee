# -*- coding: utf-8 -*-
"""Startup plumbing: output paths, logging, perf spans, crash hooks, dependency check."""

from __future__ import annotations

import logging
import sys
import threading

from app.deps import ensure_runtime_deps, missing_runtime_packages
from infra.crash_handler import install_global_exception_handlers
from infra.logging_setup import init_logging
from infra.paths import logs_dir, output_root
from infra.perf import PERF_LOGGER, span


def test_output_root_precedence(tmp_path, monkeypatch):
    monkeypatch.setenv("WRAPLOSS_OUT", str(tmp_path / "env"))
    assert output_root(tmp_path / "flag") == tmp_path / "flag"
    assert output_root() == tmp_path / "env"
    monkeypatch.setenv("WRAPLOSS_OUT", "  ")
    assert output_root().name == "runs"


def test_logs_dir_is_created(tmp_path):
    d = logs_dir(tmp_path)
    assert d == tmp_path / "logs" and d.is_dir()


def test_init_logging_is_idempotent(tmp_path):
    root = logging.getLogger()
    before = list(root.handlers)
    level = root.level
    try:
        path = init_logging(tmp_path, level="DEBUG")
        n = len(root.handlers)
        assert init_logging(tmp_path, level="DEBUG") == path
        assert len(root.handlers) == n
        logging.getLogger("wraploss.test").info("hello")
        for h in root.handlers:
            h.flush()
        assert "wraploss.test: hello" in path.read_text(encoding="utf-8")
    finally:
        for h in list(root.handlers):
            if h not in before:
                root.removeHandler(h)
                h.close()
        root.setLevel(level)


def test_span_measures_and_logs_only_when_enabled(monkeypatch, caplog):
    monkeypatch.delenv("WRAPLOSS_PERF", raising=False)
    with caplog.at_level(logging.INFO, logger=PERF_LOGGER):
        with span("quiet", threshold_ms=0.0) as t:
            sum(range(1000))
        assert t.seconds >= 0.0
        assert not [r for r in caplog.records if r.name == PERF_LOGGER]

        monkeypatch.setenv("WRAPLOSS_PERF", "yes")
        with span("loud", threshold_ms=0.0):
            pass
    assert any(r.name == PERF_LOGGER and "loud" in r.getMessage() for r in caplog.records)


def test_crash_hooks_install_and_restore():
    prev_sys, prev_thread = sys.excepthook, threading.excepthook
    restore = install_global_exception_handlers()
    try:
        assert sys.excepthook is not prev_sys
        assert threading.excepthook is not prev_thread
    finally:
        restore()
    assert sys.excepthook is prev_sys and threading.excepthook is prev_thread


def test_main_hook_logs_critical(caplog):
    restore = install_global_exception_handlers()
    try:
        try:
            raise ValueError("boom")
        except ValueError:
            exc_type, exc, tb = sys.exc_info()
        with caplog.at_level(logging.CRITICAL):
            sys.excepthook(exc_type, exc, tb)
    finally:
        restore()
    assert any(r.levelno == logging.CRITICAL and "ValueError" in r.getMessage() for r in caplog.records)


def test_dependency_check():
    assert missing_runtime_packages() == []
    ensure_runtime_deps()
    problems = missing_runtime_packages([("surely-absent-pkg", "surely_absent_pkg_xyz", (1, 0)),
                                         ("numpy", "numpy", (999, 0))])
    assert problems[0] == "surely-absent-pkg>=1.0"
    assert problems[1].startswith("numpy>=999.0 (found ")
