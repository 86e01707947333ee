# -*- coding: utf-8 -*-
"""Data-source specifications (synthetic generators and CSV schemas)."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

import numpy as np


class MapKind(str, Enum):
    LINEAR = "linear"
    TANH_MIXTURE = "tanh_mixture"


class DataSource(str, Enum):
    HETERO = "hetero"
    IMBALANCE = "imbalance"
    CSV = "csv"


@dataclass(frozen=True)
class HeteroSpec:
    """Multi-output regression Y_i = f(X)_i + e_i, e_i ~ N(0, sigma_i^2), independent per output."""

    n_features: int = 10
    n_outputs: int = 4
    map_kind: MapKind = MapKind.LINEAR
    sigma: Tuple[float, ...] = (0.1, 0.5, 1.0, 2.0)
    n_train: int = 5000
    n_test: int = 2000
    mixture_units: int = 8
    seed: int = 0


@dataclass(frozen=True)
class ImbalanceSpec:
    """Gaussian blobs, one per class; ``retention[i]`` scales the train count of class i."""

    n_classes: int = 10
    n_features: int = 10
    base_per_class: int = 500
    retention: Tuple[float, ...] = (1.0,) * 10
    test_per_class: int = 100
    spread: float = 1.0
    separation: float = 3.0
    seed: int = 0

    def train_counts(self) -> Tuple[int, ...]:
        # half-up so that 500 * 0.1 -> 50 regardless of float noise around .5
        return tuple(int(np.floor(self.base_per_class * r + 0.5)) for r in self.retention)


@dataclass(frozen=True)
class CsvSchema:
    """Exactly one of target_columns (regression) or label_column (classification).

    Columns are header names when ``header`` is true, otherwise 0-based indices.
    An empty ``feature_columns`` means every column that is not a target.
    """

    target_columns: Tuple[object, ...] = ()
    label_column: Optional[object] = None
    feature_columns: Tuple[object, ...] = ()
    delimiter: str = ","
    header: bool = True
    n_classes: Optional[int] = None

    @property
    def is_classification(self) -> bool:
        return self.label_column is not None


@dataclass(frozen=True, eq=False)
class FeatureStats:
    """Train-split column statistics used by standardize()."""

    mean: np.ndarray
    std: np.ndarray
    constant: np.ndarray

    def as_dict(self) -> dict:
        return {
            "mean": [float(v) for v in self.mean],
            "std": [float(v) for v in self.std],
            "constant": [bool(v) for v in self.constant],
        }
