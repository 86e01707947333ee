# -*- coding: utf-8 -*-
"""Validations for training settings."""

from __future__ import annotations

import math
from typing import List, Optional

from core.models.losses import LossKind
from core.models.train import ClassLoss, Metric, OMode, TrainConfig
from core.types import Issue, Severity


def validate_train_config(cfg: TrainConfig, n_outputs: Optional[int] = None, prefix: str = "train") -> List[Issue]:
    issues: List[Issue] = []

    def bad(code: str, key: str, message: str) -> None:
        issues.append(Issue(code=code, message=message, severity=Severity.ERROR, context=f"{prefix}.{key}"))

    if not isinstance(cfg.epochs, int) or cfg.epochs < 1:
        bad("TRAIN_EPOCHS", "epochs", f"epochs must be an integer >= 1, got {cfg.epochs!r}")
    if not _finite(cfg.lr) or cfg.lr <= 0:
        bad("TRAIN_LR", "lr", f"learning rate must be > 0, got {cfg.lr!r}")
    if not isinstance(cfg.batch_size, int) or cfg.batch_size < 1:
        bad("TRAIN_BATCH", "batch_size", f"batch size must be an integer >= 1, got {cfg.batch_size!r}")
    if cfg.o_mode == OMode.SMOOTHED and not (_finite(cfg.beta) and 0.0 < cfg.beta < 1.0):
        bad("TRAIN_BETA", "beta", f"smoothed mode needs beta in (0, 1), got {cfg.beta!r}")
    if cfg.o_lr is not None and (not _finite(cfg.o_lr) or cfg.o_lr <= 0):
        bad("TRAIN_O_LR", "o_lr", f"o learning rate must be > 0, got {cfg.o_lr!r}")
    if not _finite(cfg.o_floor) or cfg.o_floor <= 0:
        bad("TRAIN_O_FLOOR", "o_floor", f"o floor must be > 0, got {cfg.o_floor!r}")
    if not _finite(cfg.tol) or cfg.tol <= 0:
        bad("TRAIN_TOL", "tol", f"convergence tolerance must be > 0, got {cfg.tol!r}")
    if not isinstance(cfg.patience, int) or cfg.patience < 1:
        bad("TRAIN_PATIENCE", "patience", f"patience must be an integer >= 1, got {cfg.patience!r}")
    if not isinstance(cfg.log_every, int) or cfg.log_every < 1:
        bad("TRAIN_LOG_EVERY", "log_every", f"log_every must be an integer >= 1, got {cfg.log_every!r}")

    if cfg.class_loss == ClassLoss.TOTAL and cfg.loss_kind != LossKind.CROSS_ENTROPY:
        bad("TRAIN_CLASS_LOSS", "class_loss", "class_loss 'total' needs a classification task")

    if cfg.static_weights is not None:
        if cfg.o_mode != OMode.OFF:
            bad("TRAIN_STATIC_WITH_O", "static_weights",
                f"static weights replace learned o; set o_mode to 'off' (got {cfg.o_mode.value!r})")
        if any(not _finite(w) or w <= 0 for w in cfg.static_weights):
            bad("TRAIN_STATIC_RANGE", "static_weights", "static weights must be finite and > 0")
        if n_outputs is not None and len(cfg.static_weights) != n_outputs:
            bad("TRAIN_STATIC_LEN", "static_weights",
                f"expected {n_outputs} static weights, got {len(cfg.static_weights)}")

    metric = cfg.default_metric()
    if cfg.loss_kind == LossKind.SQUARED and metric in (Metric.ACCURACY, Metric.PER_CLASS_ACCURACY):
        bad("TRAIN_METRIC_TASK", "eval_metric", f"metric {metric.value!r} needs a classification task")
    if cfg.loss_kind == LossKind.CROSS_ENTROPY and metric == Metric.RMSE:
        bad("TRAIN_METRIC_TASK", "eval_metric", "rmse needs a regression task")
    if metric == Metric.PER_CLASS_ACCURACY:
        bad("TRAIN_METRIC_VECTOR", "eval_metric", "the tracked metric must be scalar; use accuracy")

    return issues


def _finite(x) -> bool:
    try:
        return math.isfinite(float(x))
    except (TypeError, ValueError):
        return False
