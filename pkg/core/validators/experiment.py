# -*- coding: utf-8 -*-
"""Validations per experiment-config section.

Each validate_<section>(cfg) -> List[Issue]; the service runs them all and
reports every error together.
"""

from __future__ import annotations

import math
from typing import List

from core.keys import MEDIAN_FREQUENCY
from core.models.data import DataSource
from core.models.experiment import ExperimentConfig, Task
from core.models.train import Metric, OMode
from core.types import Issue, Severity
from core.validators.data import validate_csv_schema, validate_hetero_spec, validate_imbalance_spec
from core.validators.train import validate_train_config


def _err(code: str, context: str, message: str) -> Issue:
    return Issue(code=code, message=message, severity=Severity.ERROR, context=context)


def validate_experiment(cfg: ExperimentConfig) -> List[Issue]:
    issues: List[Issue] = []
    if not isinstance(cfg.label, str) or not cfg.label.strip():
        issues.append(_err("EXP_LABEL", "label", "label must be a non-empty string"))
    elif any(ch in cfg.label for ch in "/\\") or cfg.label in (".", ".."):
        issues.append(_err("EXP_LABEL", "label", f"label {cfg.label!r} cannot be used as a directory name"))
    implied = cfg.data.implied_task
    if implied is not None and implied != cfg.task:
        issues.append(_err("EXP_TASK", "task",
                           f"task {cfg.task.value!r} does not match data source {cfg.data.source.value!r}"))
    return issues


def validate_data(cfg: ExperimentConfig) -> List[Issue]:
    d = cfg.data
    if d.source == DataSource.HETERO:
        if d.hetero is None:
            return [_err("DATA_MISSING", "data", "hetero source without generator settings")]
        return validate_hetero_spec(d.hetero)
    if d.source == DataSource.IMBALANCE:
        if d.imbalance is None:
            return [_err("DATA_MISSING", "data", "imbalance source without generator settings")]
        return validate_imbalance_spec(d.imbalance)
    issues: List[Issue] = []
    for key in ("train_path", "test_path"):
        if not getattr(d, key):
            issues.append(_err("DATA_PATH", f"data.{key}", f"csv source needs {key}"))
    if d.schema is None:
        issues.append(_err("DATA_SCHEMA", "data.schema", "csv source needs a schema"))
    else:
        issues.extend(validate_csv_schema(d.schema))
    return issues


def validate_network(cfg: ExperimentConfig) -> List[Issue]:
    issues: List[Issue] = []
    net = cfg.network
    if any(not isinstance(h, int) or isinstance(h, bool) or h < 1 for h in net.hidden):
        issues.append(_err("NET_HIDDEN", "network.hidden", f"hidden widths must be integers >= 1, got {list(net.hidden)}"))
    rates = net.dropout if isinstance(net.dropout, tuple) else (net.dropout,)
    if isinstance(net.dropout, tuple) and len(rates) != len(net.hidden):
        issues.append(_err("NET_DROPOUT_LEN", "network.dropout",
                           f"dropout needs one rate per hidden layer ({len(net.hidden)}), got {len(rates)}"))
    if any(not _finite(r) or not (0.0 <= r < 1.0) for r in rates):
        issues.append(_err("NET_DROPOUT", "network.dropout", "dropout rates must lie in [0, 1)"))
    return issues


def validate_train(cfg: ExperimentConfig) -> List[Issue]:
    issues = validate_train_config(cfg.train, n_outputs=cfg.data.n_outputs)
    if cfg.train.loss_kind != cfg.task.loss_kind:
        issues.append(_err("TRAIN_LOSS_TASK", "train", f"{cfg.task.value} needs the {cfg.task.loss_kind.value} loss"))
    if cfg.static_weights_rule is not None:
        if cfg.static_weights_rule != MEDIAN_FREQUENCY:
            issues.append(_err("TRAIN_STATIC_RULE", "train.static_weights",
                               f"unknown static weight rule {cfg.static_weights_rule!r}"))
        if cfg.task != Task.CLASSIFICATION:
            issues.append(_err("TRAIN_STATIC_RULE", "train.static_weights",
                               "median-frequency weights need a classification task"))
        if cfg.train.o_mode != OMode.OFF:
            issues.append(_err("TRAIN_STATIC_WITH_O", "train.static_weights",
                               f"static weights replace learned o; set o_mode to 'off' (got {cfg.train.o_mode.value!r})"))
    return issues


def validate_metrics(cfg: ExperimentConfig) -> List[Issue]:
    issues: List[Issue] = []
    if len(set(cfg.metrics)) != len(cfg.metrics):
        issues.append(_err("METRIC_DUP", "metrics", "metrics are listed more than once"))
    for m in cfg.metrics:
        if cfg.task == Task.REGRESSION and m in (Metric.ACCURACY, Metric.PER_CLASS_ACCURACY):
            issues.append(_err("METRIC_TASK", "metrics", f"{m.value!r} needs a classification task"))
        if cfg.task == Task.CLASSIFICATION and m == Metric.RMSE:
            issues.append(_err("METRIC_TASK", "metrics", "'rmse' needs a regression task"))
    if cfg.metrics and cfg.metrics[0] == Metric.PER_CLASS_ACCURACY:
        issues.append(_err("METRIC_VECTOR", "metrics", "the first (tracked) metric must be scalar"))
    return issues


def _finite(x) -> bool:
    try:
        return math.isfinite(float(x))
    except (TypeError, ValueError):
        return False
