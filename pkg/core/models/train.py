# -*- coding: utf-8 -*-
"""Models for wrapped-loss training runs."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

from core.models.losses import DEFAULT_O_FLOOR, LossKind
from core.models.nn import OptimizerKind


class OMode(str, Enum):
    """How the wrap weights move each mini-batch.

    off        : o stays at 1 (plain training)
    gradient   : o <- o - a (l - 1/o)
    assignment : o <- 1 / max(l, floor)
    smoothed   : o <- (1 - b) o + b / max(l, floor)
    """

    OFF = "off"
    GRADIENT = "gradient"
    ASSIGNMENT = "assignment"
    SMOOTHED = "smoothed"


class ClassLoss(str, Enum):
    """Which per-class loss drives the o update in classification.

    mean  : mean cross-entropy over the class samples in the batch
    total : that mean times the class share of the training set, an
            estimate of the class total loss (rare classes get larger o)
    """

    MEAN = "mean"
    TOTAL = "total"


class Metric(str, Enum):
    RMSE = "rmse"
    ORIGINAL_LOSS = "original_loss"
    ACCURACY = "accuracy"
    PER_CLASS_ACCURACY = "per_class_accuracy"

    @property
    def maximize(self) -> bool:
        return self in (Metric.ACCURACY, Metric.PER_CLASS_ACCURACY)


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 100
    lr: float = 0.01
    batch_size: int = 10
    optimizer: OptimizerKind = OptimizerKind.ADAGRAD
    loss_kind: LossKind = LossKind.SQUARED
    o_mode: OMode = OMode.ASSIGNMENT
    class_loss: ClassLoss = ClassLoss.MEAN
    beta: float = 0.5
    o_lr: Optional[float] = None
    static_weights: Optional[Tuple[float, ...]] = None
    o_floor: float = DEFAULT_O_FLOOR
    tol: float = 1e-5
    patience: int = 50
    seed: int = 0
    eval_metric: Optional[Metric] = None
    log_every: int = 10
    shuffle: bool = True

    @property
    def effective_o_lr(self) -> float:
        return float(self.lr if self.o_lr is None else self.o_lr)

    @property
    def uses_static_weights(self) -> bool:
        return self.static_weights is not None

    def default_metric(self) -> Metric:
        if self.eval_metric is not None:
            return self.eval_metric
        return Metric.ACCURACY if self.loss_kind == LossKind.CROSS_ENTROPY else Metric.RMSE


@dataclass(frozen=True)
class EpochMetrics:
    """One row of training history (epochs are 1-based)."""

    epoch: int
    train_wrapped_loss: float
    train_original_loss: float
    eval_metric: float
    eval_metric_name: str
    o_min: float
    o_max: float
    o_mean: float
    max_abs_o_grad: float = 0.0
    per_class_accuracy: Optional[Tuple[float, ...]] = field(default=None)
