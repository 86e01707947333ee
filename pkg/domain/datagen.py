# -*- coding: utf-8 -*-
"""Synthetic datasets and feature standardization.

All generators are pure functions of their spec: the seed is split into
independent streams (true map / train draws / test draws) with
numpy SeedSequence, so train and test are disjoint draws of one process.
"""

from __future__ import annotations

import logging
from typing import Callable, Tuple

import numpy as np

from core.errors import ConfigValidationError, DegenerateClassError, ShapeError
from core.models.data import FeatureStats, HeteroSpec, ImbalanceSpec, MapKind
from core.models.dataset import Dataset
from core.types import errors_only
from core.validators.data import validate_hetero_spec, validate_imbalance_spec

log = logging.getLogger(__name__)

TrueMap = Callable[[np.ndarray], np.ndarray]


def _streams(seed: int) -> Tuple[np.random.Generator, np.random.Generator, np.random.Generator]:
    a, b, c = np.random.SeedSequence(int(seed)).spawn(3)
    return np.random.default_rng(a), np.random.default_rng(b), np.random.default_rng(c)


def _check(issues) -> None:
    errors = errors_only(issues)
    if errors:
        raise ConfigValidationError(errors)


def true_function(spec: HeteroSpec) -> TrueMap:
    """The noiseless map f of a HeteroSpec.

    linear       : f(x) = A x + b
    tanh_mixture : f(x) = A x + b + U tanh(V x + d)
    """
    _check(validate_hetero_spec(spec))
    map_rng, _, _ = _streams(spec.seed)
    p, c = spec.n_features, spec.n_outputs
    A = map_rng.normal(0.0, 1.0 / np.sqrt(p), size=(c, p))
    b = map_rng.normal(0.0, 1.0, size=c)
    if MapKind(spec.map_kind) == MapKind.LINEAR:
        def f(X: np.ndarray) -> np.ndarray:
            return np.asarray(X, dtype=np.float64) @ A.T + b
        return f

    k = spec.mixture_units
    V = map_rng.normal(0.0, 1.0 / np.sqrt(p), size=(k, p))
    d = map_rng.normal(0.0, 0.5, size=k)
    U = map_rng.normal(0.0, 1.0 / np.sqrt(k), size=(c, k))

    def f(X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        return X @ A.T + b + np.tanh(X @ V.T + d) @ U.T
    return f


def gen_heteroscedastic_regression(spec: HeteroSpec) -> Tuple[Dataset, Dataset]:
    f = true_function(spec)
    _, train_rng, test_rng = _streams(spec.seed)
    sigma = np.asarray(spec.sigma, dtype=np.float64)
    tag = f"hetero(map={MapKind(spec.map_kind).value}, seed={spec.seed})"

    def draw(rng: np.random.Generator, n: int) -> Dataset:
        X = rng.normal(0.0, 1.0, size=(n, spec.n_features))
        noise = rng.normal(0.0, 1.0, size=(n, spec.n_outputs)) * sigma[None, :]
        return Dataset(X=X, Y=f(X) + noise, provenance=tag)

    train = draw(train_rng, spec.n_train)
    test = draw(test_rng, spec.n_test)
    log.debug("generated %s: train=%d test=%d", tag, train.n, test.n)
    return train, test


def gen_imbalanced_classification(spec: ImbalanceSpec) -> Tuple[Dataset, Dataset]:
    """Train class i gets round(base * retention_i) samples; the test split stays balanced."""
    _check(validate_imbalance_spec(spec))
    counts = spec.train_counts()
    empty = [i for i, n in enumerate(counts) if n < 1]
    if empty:
        raise DegenerateClassError(f"retention leaves classes {empty} with zero training samples")

    map_rng, train_rng, test_rng = _streams(spec.seed)
    means = map_rng.normal(0.0, spec.separation, size=(spec.n_classes, spec.n_features))
    tag = f"imbalance(c={spec.n_classes}, seed={spec.seed})"

    def draw(rng: np.random.Generator, per_class) -> Dataset:
        labels = np.repeat(np.arange(spec.n_classes), per_class)
        X = means[labels] + rng.normal(0.0, spec.spread, size=(labels.size, spec.n_features))
        order = rng.permutation(labels.size)
        return Dataset(X=X[order], labels=labels[order], n_classes=spec.n_classes, provenance=tag)

    train = draw(train_rng, np.asarray(counts))
    test = draw(test_rng, np.full(spec.n_classes, spec.test_per_class))
    log.debug("generated %s: train counts=%s", tag, list(counts))
    return train, test


def standardize(train: Dataset, test: Dataset) -> Tuple[Dataset, Dataset, FeatureStats]:
    """Zero-mean unit-variance features using train statistics only.

    Constant train columns map to 0 in both splits.
    """
    if train.p != test.p:
        raise ShapeError(f"train has {train.p} features, test has {test.p}")
    mean = np.mean(train.X, axis=0)
    std = np.std(train.X, axis=0)
    constant = std == 0.0
    safe = np.where(constant, 1.0, std)

    def apply(ds: Dataset) -> Dataset:
        Z = (ds.X - mean) / safe
        Z[:, constant] = 0.0
        if ds.is_classification:
            return Dataset(X=Z, labels=ds.labels, n_classes=ds.n_classes, provenance=ds.provenance)
        return Dataset(X=Z, Y=ds.Y, provenance=ds.provenance)

    if np.any(constant):
        log.info("standardize: %d constant feature column(s) mapped to 0", int(np.sum(constant)))
    return apply(train), apply(test), FeatureStats(mean=mean, std=std, constant=constant)
