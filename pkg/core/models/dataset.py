# -*- coding: utf-8 -*-
"""Dataset model: features plus either continuous targets or class labels."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from core.errors import DomainError, LabelError, NumericError, ShapeError


@dataclass(frozen=True, eq=False)
class Dataset:
    X: np.ndarray
    Y: Optional[np.ndarray] = None
    labels: Optional[np.ndarray] = None
    n_classes: Optional[int] = None
    provenance: str = ""

    def __post_init__(self) -> None:
        X = np.array(self.X, dtype=np.float64, copy=True)
        if X.ndim != 2 or X.shape[0] < 1:
            raise ShapeError(f"X must be (n >= 1, p), got {X.shape}")
        if not np.all(np.isfinite(X)):
            raise NumericError("X contains non-finite entries")
        if (self.Y is None) == (self.labels is None):
            raise DomainError("a dataset holds exactly one of Y (regression) or labels (classification)")
        X.setflags(write=False)
        object.__setattr__(self, "X", X)

        if self.Y is not None:
            Y = np.array(self.Y, dtype=np.float64, copy=True)
            if Y.ndim == 1:
                Y = Y.reshape(-1, 1)
            if Y.shape[0] != X.shape[0]:
                raise ShapeError(f"{Y.shape[0]} target rows for {X.shape[0]} feature rows")
            if not np.all(np.isfinite(Y)):
                raise NumericError("Y contains non-finite entries")
            Y.setflags(write=False)
            object.__setattr__(self, "Y", Y)
            object.__setattr__(self, "n_classes", None)
        else:
            lab = np.asarray(self.labels).reshape(-1)
            as_int = lab.astype(np.int64)
            if lab.size and not np.array_equal(as_int, lab):
                raise LabelError("labels must be integers")
            if as_int.shape[0] != X.shape[0]:
                raise ShapeError(f"{as_int.shape[0]} labels for {X.shape[0]} feature rows")
            c = int(self.n_classes) if self.n_classes is not None else int(as_int.max()) + 1
            if np.any(as_int < 0) or np.any(as_int >= c):
                raise LabelError(f"labels must lie in [0, {c})")
            as_int = as_int.copy()
            as_int.setflags(write=False)
            object.__setattr__(self, "labels", as_int)
            object.__setattr__(self, "n_classes", c)

    @property
    def is_classification(self) -> bool:
        return self.labels is not None

    @property
    def n(self) -> int:
        return int(self.X.shape[0])

    @property
    def p(self) -> int:
        return int(self.X.shape[1])

    @property
    def c(self) -> int:
        """Output width: target columns, or class count."""
        if self.Y is not None:
            return int(self.Y.shape[1])
        return int(self.n_classes)

    def targets(self) -> np.ndarray:
        return self.labels if self.labels is not None else self.Y

    def class_counts(self) -> np.ndarray:
        if self.labels is None:
            raise DomainError("class counts need a classification dataset")
        return np.bincount(self.labels, minlength=self.c)

    def same_as(self, other: "Dataset") -> bool:
        if self.is_classification != other.is_classification:
            return False
        if not np.array_equal(self.X, other.X):
            return False
        if self.is_classification:
            return bool(np.array_equal(self.labels, other.labels) and self.n_classes == other.n_classes)
        return bool(np.array_equal(self.Y, other.Y))
