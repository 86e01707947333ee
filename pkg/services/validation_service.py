# -*- coding: utf-8 -*-
"""ValidationService

Runs every pure section validator over an ExperimentConfig and raises one
ConfigValidationError listing all ERROR-level issues.

File existence for csv sources is checked here (validators stay pure).
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

from core.errors import ConfigValidationError
from core.models.data import DataSource
from core.models.experiment import ExperimentConfig
from core.sections import Section
from core.types import Issue, Severity, errors_only
from core.validators.experiment import (
    validate_data,
    validate_experiment,
    validate_metrics,
    validate_network,
    validate_train,
)

log = logging.getLogger(__name__)

Validator = Callable[[ExperimentConfig], List[Issue]]

_VALIDATOR_MAP: Dict[Section, Validator] = {
    Section.EXPERIMENT: validate_experiment,
    Section.DATA: validate_data,
    Section.NETWORK: validate_network,
    Section.TRAIN: validate_train,
    Section.METRICS: validate_metrics,
}


def _file_issues(cfg: ExperimentConfig) -> List[Issue]:
    if cfg.data.source != DataSource.CSV:
        return []
    out: List[Issue] = []
    for key in ("train_path", "test_path"):
        p = getattr(cfg.data, key)
        if p and not Path(p).is_file():
            out.append(Issue(code="DATA_FILE", message=f"file not found: {p}", severity=Severity.ERROR,
                             context=f"data.{key}"))
    return out


def collect_issues(
    cfg: ExperimentConfig,
    sections: Optional[Sequence[Section]] = None,
    check_files: bool = True,
) -> List[Issue]:
    flat: List[Issue] = []
    for sec in (sections or list(Section)):
        flat.extend(_VALIDATOR_MAP[Section(sec)](cfg))
    if check_files:
        flat.extend(_file_issues(cfg))

    # Deduplicate by (code, message, context)
    seen = set()
    uniq: List[Issue] = []
    for it in flat:
        key = (it.code, it.message, it.context)
        if key in seen:
            continue
        seen.add(key)
        uniq.append(it)
    for it in uniq:
        if it.severity != Severity.ERROR:
            log.warning("%s", it.describe())
    return uniq


def ensure_valid(cfg: ExperimentConfig, check_files: bool = True) -> ExperimentConfig:
    errors = errors_only(collect_issues(cfg, check_files=check_files))
    if errors:
        raise ConfigValidationError(errors)
    return cfg
