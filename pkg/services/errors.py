# -*- coding: utf-8 -*-
"""services/errors.py

Exit-code contract of the command line:

    0 success, 1 validation, 2 numeric/assertion failure, 3 I/O
"""

from __future__ import annotations

import logging
from enum import IntEnum

from core.errors import WrapLossError

log = logging.getLogger(__name__)


class ExitCode(IntEnum):
    OK = 0
    VALIDATION = 1
    NUMERIC = 2
    IO = 3


def exit_code_for(exc: BaseException) -> ExitCode:
    if isinstance(exc, WrapLossError):
        return ExitCode(exc.exit_code)
    if isinstance(exc, OSError):
        return ExitCode.IO
    log.error("unexpected %s", type(exc).__name__, exc_info=exc)
    return ExitCode.NUMERIC
