# -*- coding: utf-8 -*-
"""Global crash/exception handlers.

Uncaught exceptions in the main thread and in worker threads (comparison
runs) end up in the log at CRITICAL instead of vanishing.
"""

from __future__ import annotations

import logging
import sys
import threading
import traceback
from types import TracebackType
from typing import Callable, Optional, Type

log = logging.getLogger(__name__)


def _report(where: str, exc_type: Type[BaseException], exc: BaseException, tb: Optional[TracebackType]) -> None:
    text = "".join(traceback.format_exception(exc_type, exc, tb))
    try:
        log.critical("unhandled %s in %s:\n%s", exc_type.__name__, where, text)
    except Exception:
        sys.stderr.write(f"unhandled {exc_type.__name__} in {where} (logging failed):\n{text}")


def _main_hook(exc_type: Type[BaseException], exc: BaseException, tb: Optional[TracebackType]) -> None:
    if issubclass(exc_type, KeyboardInterrupt):
        sys.__excepthook__(exc_type, exc, tb)
        return
    _report("main thread", exc_type, exc, tb)


def _thread_hook(args: threading.ExceptHookArgs) -> None:  # pragma: no cover
    if args.exc_type is SystemExit:
        return
    name = args.thread.name if args.thread is not None else "?"
    _report(f"thread {name}", args.exc_type, args.exc_value, args.exc_traceback)


def install_global_exception_handlers() -> Callable[[], None]:
    """Install the hooks; returns a function that puts the previous ones back."""
    prev_sys, prev_thread = sys.excepthook, threading.excepthook
    sys.excepthook = _main_hook  # type: ignore[assignment]
    threading.excepthook = _thread_hook  # type: ignore[assignment]

    def restore() -> None:
        sys.excepthook = prev_sys
        threading.excepthook = prev_thread

    return restore
