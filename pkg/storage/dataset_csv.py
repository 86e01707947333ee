# -*- coding: utf-8 -*-
"""CSV ingestion and export for datasets.

Comma-delimited (configurable), optional single header row, decimal-point
floats, UTF-8. Missing or malformed cells and empty lines between records
raise ParseError with the 1-based data row and the column; nothing is
imputed. Trailing empty lines are ignored.
"""

from __future__ import annotations

import csv
import io
import logging
from pathlib import Path
from typing import List, Optional, Tuple, Union

import numpy as np

from core.errors import ConfigValidationError, DatasetIOError, ParseError
from core.models.data import CsvSchema
from core.models.dataset import Dataset
from core.types import errors_only
from core.validators.data import validate_csv_schema
from domain.parse import to_float, to_label
from storage.atomic import fmt_float, write_text_atomic

log = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _read_rows(path: Path, delimiter: str) -> List[List[str]]:
    try:
        with open(path, "r", encoding="utf-8", newline="") as f:
            rows = list(csv.reader(f, delimiter=delimiter))
    except FileNotFoundError as exc:
        raise DatasetIOError(f"dataset file not found: {path}") from exc
    except (OSError, UnicodeDecodeError, csv.Error) as exc:
        raise DatasetIOError(f"cannot read {path}: {exc}") from exc
    while rows and not rows[-1]:
        rows.pop()
    return rows


def _resolve(col: object, header: Optional[List[str]], width: int) -> int:
    if header is not None and isinstance(col, str):
        if col not in header:
            raise DatasetIOError(f"column {col!r} not found in header {header}")
        return header.index(col)
    if isinstance(col, int) and not isinstance(col, bool) and 0 <= col < width:
        return col
    raise DatasetIOError(f"column {col!r} does not exist (file has {width} columns)")


def _column_plan(schema: CsvSchema, header: Optional[List[str]], width: int) -> Tuple[List[int], List[int]]:
    if schema.is_classification:
        target_idx = [_resolve(schema.label_column, header, width)]
    else:
        target_idx = [_resolve(c, header, width) for c in schema.target_columns]
    if schema.feature_columns:
        feature_idx = [_resolve(c, header, width) for c in schema.feature_columns]
    else:
        feature_idx = [i for i in range(width) if i not in target_idx]
    if not feature_idx:
        raise DatasetIOError("no feature columns left after removing targets")
    return feature_idx, target_idx


def load_csv_dataset(path: PathLike, schema: CsvSchema) -> Dataset:
    errors = errors_only(validate_csv_schema(schema))
    if errors:
        raise ConfigValidationError(errors)
    p = Path(path)
    rows = _read_rows(p, schema.delimiter)
    header: Optional[List[str]] = None
    if schema.header:
        if not rows:
            raise DatasetIOError(f"{p} is empty")
        if not rows[0]:
            raise DatasetIOError(f"{p}: expected a header on the first line, found an empty line")
        header = [h.strip() for h in rows[0]]
        rows = rows[1:]
    if not rows:
        raise DatasetIOError(f"{p} has no data rows")
    blank = next((r for r, row in enumerate(rows, start=1) if not row), None)
    if blank is not None:
        raise ParseError("empty line between records", row=blank, column=None)

    width = len(header) if header is not None else len(rows[0])
    feature_idx, target_idx = _column_plan(schema, header, width)

    def col_name(j: int) -> object:
        return header[j] if header is not None else j

    X = np.empty((len(rows), len(feature_idx)))
    T = np.empty((len(rows), len(target_idx)))
    labels: List[int] = []
    for r, row in enumerate(rows, start=1):
        if len(row) != width:
            raise ParseError(f"expected {width} cells, got {len(row)}", row=r, column=None)
        for k, j in enumerate(feature_idx):
            v = to_float(row[j])
            if v is None:
                raise ParseError(f"bad numeric cell {row[j]!r}", row=r, column=col_name(j))
            X[r - 1, k] = v
        if schema.is_classification:
            j = target_idx[0]
            lab = to_label(row[j])
            if lab is None:
                raise ParseError(f"bad class label {row[j]!r}", row=r, column=col_name(j))
            labels.append(lab)
        else:
            for k, j in enumerate(target_idx):
                v = to_float(row[j])
                if v is None:
                    raise ParseError(f"bad numeric cell {row[j]!r}", row=r, column=col_name(j))
                T[r - 1, k] = v

    log.info("loaded %s: n=%d p=%d", p, len(rows), len(feature_idx))
    if schema.is_classification:
        return Dataset(X=X, labels=np.asarray(labels, dtype=np.int64), n_classes=schema.n_classes, provenance=str(p))
    return Dataset(X=X, Y=T, provenance=str(p))


def dataset_to_csv_text(ds: Dataset, delimiter: str = ",") -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    features = [f"x{j}" for j in range(ds.p)]
    if ds.is_classification:
        writer.writerow(features + ["label"])
        for x, lab in zip(ds.X, ds.labels):
            writer.writerow([fmt_float(v) for v in x] + [str(int(lab))])
    else:
        writer.writerow(features + [f"y{i}" for i in range(ds.c)])
        for x, y in zip(ds.X, ds.Y):
            writer.writerow([fmt_float(v) for v in x] + [fmt_float(v) for v in y])
    return buf.getvalue()


def write_csv_dataset(ds: Dataset, path: PathLike, delimiter: str = ",") -> Path:
    """Write with a header (x0.., then y0.. or label); the matching load schema is schema_for()."""
    return write_text_atomic(path, dataset_to_csv_text(ds, delimiter))


def schema_for(ds: Dataset, delimiter: str = ",") -> CsvSchema:
    if ds.is_classification:
        return CsvSchema(label_column="label", delimiter=delimiter, header=True, n_classes=ds.n_classes)
    return CsvSchema(target_columns=tuple(f"y{i}" for i in range(ds.c)), delimiter=delimiter, header=True)

