# -*- coding: utf-8 -*-
"""Value types for per-output losses and the learnable wrap weights."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Union

import numpy as np

from core.errors import DomainError, ShapeError, WeightDomainError

DEFAULT_O_FLOOR = 1e-8


class LossKind(str, Enum):
    SQUARED = "squared"
    CROSS_ENTROPY = "cross_entropy"


def _vector(values, name: str) -> np.ndarray:
    v = np.array(values, dtype=np.float64, copy=True).reshape(-1)
    v.setflags(write=False)
    return v


@dataclass(frozen=True, eq=False)
class PerOutputLosses:
    """Batch-aggregated loss per output (or per class).

    ``coverage[i]`` counts the batch samples that contributed to ``values[i]``;
    0 means the value was carried over from an earlier batch.
    """

    values: np.ndarray
    coverage: np.ndarray

    def __post_init__(self) -> None:
        values = _vector(self.values, "values")
        coverage = np.array(self.coverage, dtype=np.int64, copy=True).reshape(-1)
        coverage.setflags(write=False)
        if values.shape != coverage.shape:
            raise ShapeError(f"values {values.shape} and coverage {coverage.shape} differ")
        if np.any(values < 0.0):
            raise DomainError("per-output losses must be >= 0")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "coverage", coverage)

    @property
    def size(self) -> int:
        return int(self.values.size)

    @property
    def total(self) -> float:
        return float(np.sum(self.values))

    @classmethod
    def full(cls, values: Sequence[float], batch_size: int = 1) -> "PerOutputLosses":
        v = np.asarray(values, dtype=np.float64).reshape(-1)
        return cls(values=v, coverage=np.full(v.size, int(batch_size), dtype=np.int64))


@dataclass(frozen=True, eq=False)
class WrapWeights:
    """The learnable o vector. Every entry stays >= floor > 0."""

    o: np.ndarray
    floor: float = DEFAULT_O_FLOOR

    def __post_init__(self) -> None:
        if not (self.floor > 0.0):
            raise WeightDomainError(f"o floor must be > 0, got {self.floor}")
        o = _vector(self.o, "o")
        if not np.all(np.isfinite(o)):
            raise WeightDomainError("wrap weights must be finite")
        if np.any(o < self.floor):
            raise WeightDomainError(f"wrap weights below floor {self.floor}: min o = {float(np.min(o))}")
        object.__setattr__(self, "o", o)

    @property
    def size(self) -> int:
        return int(self.o.size)

    @classmethod
    def ones(cls, c: int, floor: float = DEFAULT_O_FLOOR) -> "WrapWeights":
        return cls(o=np.ones(int(c)), floor=floor)

    def snapshot(self) -> dict:
        return {"min": float(np.min(self.o)), "max": float(np.max(self.o)), "mean": float(np.mean(self.o))}


WeightsLike = Union[WrapWeights, Sequence[float], np.ndarray]


def as_wrap_weights(o: WeightsLike, floor: Optional[float] = None) -> WrapWeights:
    if isinstance(o, WrapWeights):
        return o
    return WrapWeights(o=np.asarray(o, dtype=np.float64), floor=DEFAULT_O_FLOOR if floor is None else floor)


@dataclass(frozen=True, eq=False)
class SigmaVector:
    """Per-output residual standard deviations."""

    sigma: np.ndarray

    def __post_init__(self) -> None:
        s = _vector(self.sigma, "sigma")
        if not np.all(np.isfinite(s)) or np.any(s <= 0.0):
            raise DomainError("sigma entries must be finite and > 0")
        object.__setattr__(self, "sigma", s)

    @property
    def variance(self) -> np.ndarray:
        return self.sigma ** 2


@dataclass(frozen=True, eq=False)
class LossReport:
    original_total: float
    wrapped_total: float
    per_output: PerOutputLosses
    o: WrapWeights

    def is_finite(self) -> bool:
        return bool(np.isfinite(self.original_total) and np.isfinite(self.wrapped_total))
