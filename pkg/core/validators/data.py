# -*- coding: utf-8 -*-
"""Validations for data-source specifications."""

from __future__ import annotations

import math
from typing import List

from core.models.data import CsvSchema, HeteroSpec, ImbalanceSpec, MapKind
from core.types import Issue, Severity


def _issue(code: str, prefix: str, key: str, message: str) -> Issue:
    return Issue(code=code, message=message, severity=Severity.ERROR, context=f"{prefix}.{key}")


def _pos_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool) and v >= 1


def _finite(v) -> bool:
    try:
        return math.isfinite(float(v))
    except (TypeError, ValueError):
        return False


def validate_hetero_spec(spec: HeteroSpec, prefix: str = "data") -> List[Issue]:
    issues: List[Issue] = []
    for key in ("n_features", "n_outputs", "n_train", "n_test"):
        if not _pos_int(getattr(spec, key)):
            issues.append(_issue("DATA_DIM", prefix, key, f"{key} must be an integer >= 1, got {getattr(spec, key)!r}"))
    if spec.map_kind == MapKind.TANH_MIXTURE and not _pos_int(spec.mixture_units):
        issues.append(_issue("DATA_UNITS", prefix, "mixture_units", "tanh mixture needs at least one unit"))
    sigma = tuple(spec.sigma)
    if _pos_int(spec.n_outputs) and len(sigma) != spec.n_outputs:
        issues.append(_issue("DATA_SIGMA_LEN", prefix, "sigma",
                             f"sigma needs {spec.n_outputs} entries, got {len(sigma)}"))
    if any(not _finite(s) or s < 0 for s in sigma):
        issues.append(_issue("DATA_SIGMA", prefix, "sigma", "sigma entries must be finite and >= 0"))
    return issues


def validate_imbalance_spec(spec: ImbalanceSpec, prefix: str = "data") -> List[Issue]:
    issues: List[Issue] = []
    for key in ("n_classes", "n_features", "base_per_class", "test_per_class"):
        if not _pos_int(getattr(spec, key)):
            issues.append(_issue("DATA_DIM", prefix, key, f"{key} must be an integer >= 1, got {getattr(spec, key)!r}"))
    if _pos_int(spec.n_classes) and spec.n_classes < 2:
        issues.append(_issue("DATA_CLASSES", prefix, "n_classes", "classification needs at least 2 classes"))
    retention = tuple(spec.retention)
    if _pos_int(spec.n_classes) and len(retention) != spec.n_classes:
        issues.append(_issue("DATA_RETENTION_LEN", prefix, "retention",
                             f"retention needs {spec.n_classes} entries, got {len(retention)}"))
    if any(not _finite(r) or not (0.0 < r <= 1.0) for r in retention):
        issues.append(_issue("DATA_RETENTION", prefix, "retention", "retention entries must lie in (0, 1]"))
    if not _finite(spec.spread) or spec.spread <= 0:
        issues.append(_issue("DATA_SPREAD", prefix, "spread", f"spread must be > 0, got {spec.spread!r}"))
    if not _finite(spec.separation) or spec.separation < 0:
        issues.append(_issue("DATA_SEPARATION", prefix, "separation", f"separation must be >= 0, got {spec.separation!r}"))
    return issues


def validate_csv_schema(schema: CsvSchema, prefix: str = "data.schema") -> List[Issue]:
    issues: List[Issue] = []
    has_targets = len(schema.target_columns) > 0
    if has_targets == schema.is_classification:
        issues.append(_issue("CSV_TARGETS", prefix, "target_columns",
                             "give exactly one of target_columns or label_column"))
    if not isinstance(schema.delimiter, str) or len(schema.delimiter) != 1:
        issues.append(_issue("CSV_DELIMITER", prefix, "delimiter", "delimiter must be a single character"))
    if schema.n_classes is not None and not (_pos_int(schema.n_classes) and schema.n_classes >= 2):
        issues.append(_issue("CSV_CLASSES", prefix, "n_classes", "n_classes must be an integer >= 2"))
    if not schema.header:
        cols = list(schema.target_columns) + list(schema.feature_columns)
        if schema.label_column is not None:
            cols.append(schema.label_column)
        if any(not isinstance(c, int) or isinstance(c, bool) or c < 0 for c in cols):
            issues.append(_issue("CSV_COLUMNS", prefix, "header",
                                 "without a header row, columns must be 0-based indices"))
    return issues
