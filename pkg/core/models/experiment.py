# -*- coding: utf-8 -*-
"""Experiment configuration (one training run)."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple, Union

from core.models.data import CsvSchema, DataSource, HeteroSpec, ImbalanceSpec
from core.models.losses import LossKind
from core.models.nn import Activation, Head
from core.models.train import Metric, TrainConfig


class Task(str, Enum):
    REGRESSION = "regression"
    CLASSIFICATION = "classification"

    @property
    def loss_kind(self) -> LossKind:
        return LossKind.CROSS_ENTROPY if self == Task.CLASSIFICATION else LossKind.SQUARED

    @property
    def head(self) -> Head:
        return Head.SOFTMAX if self == Task.CLASSIFICATION else Head.LINEAR


@dataclass(frozen=True)
class DataConfig:
    source: DataSource = DataSource.HETERO
    standardize: bool = True
    hetero: Optional[HeteroSpec] = None
    imbalance: Optional[ImbalanceSpec] = None
    train_path: Optional[str] = None
    test_path: Optional[str] = None
    schema: Optional[CsvSchema] = None

    @property
    def implied_task(self) -> Optional[Task]:
        if self.source == DataSource.HETERO:
            return Task.REGRESSION
        if self.source == DataSource.IMBALANCE:
            return Task.CLASSIFICATION
        if self.schema is None:
            return None
        return Task.CLASSIFICATION if self.schema.is_classification else Task.REGRESSION

    @property
    def n_outputs(self) -> Optional[int]:
        """Output width when it is known without reading any file."""
        if self.hetero is not None:
            return self.hetero.n_outputs
        if self.imbalance is not None:
            return self.imbalance.n_classes
        if self.schema is not None:
            if self.schema.is_classification:
                return self.schema.n_classes
            return len(self.schema.target_columns)
        return None


@dataclass(frozen=True)
class NetworkConfig:
    hidden: Tuple[int, ...] = (32, 32)
    activation: Activation = Activation.RELU
    dropout: Union[float, Tuple[float, ...]] = 0.0
    # None: reuse the training seed
    init_seed: Optional[int] = None


@dataclass(frozen=True)
class ExperimentConfig:
    label: str
    task: Task
    data: DataConfig
    network: NetworkConfig = field(default_factory=NetworkConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    metrics: Tuple[Metric, ...] = ()
    output_dir: Optional[str] = None
    # "median_frequency": static weights computed from the train class counts
    static_weights_rule: Optional[str] = None

    @property
    def tracked_metric(self) -> Metric:
        return self.metrics[0] if self.metrics else self.train.default_metric()
