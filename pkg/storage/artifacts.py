# -*- coding: utf-8 -*-
"""Run and comparison artifacts.

Everything except timings.json is a pure function of the config, so two
identical runs leave byte-identical files behind.
"""

from __future__ import annotations

import csv
import io
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Sequence, Tuple, Union

import numpy as np

from core.errors import DatasetIOError
from core.models.losses import WrapWeights
from core.models.nn import Activation, DenseLayer, Head, Network
from core.models.train import EpochMetrics
from storage.atomic import fmt_float, read_json, write_json_atomic, write_text_atomic
from storage.schema import (
    ARTIFACT_VERSION,
    COMPARISON_COLUMNS,
    COMPARISON_CSV,
    COMPARISON_JSON,
    METRICS_COLUMNS,
    METRICS_FILE,
    MODEL_FILE,
    SUMMARY_FILE,
    TIMINGS_FILE,
)

log = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _csv_text(header: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def metrics_csv_text(history: Sequence[EpochMetrics]) -> str:
    rows = (
        [str(m.epoch)] + [fmt_float(v) for v in (
            m.train_wrapped_loss, m.train_original_loss, m.eval_metric, m.o_min, m.o_max, m.o_mean)]
        for m in history
    )
    return _csv_text(METRICS_COLUMNS, rows)


def write_metrics_csv(run_dir: PathLike, history: Sequence[EpochMetrics]) -> Path:
    return write_text_atomic(Path(run_dir) / METRICS_FILE, metrics_csv_text(history))


def read_metrics_csv(path: PathLike) -> List[Dict[str, float]]:
    p = Path(path)
    try:
        with open(p, "r", encoding="utf-8", newline="") as f:
            return [{k: float(v) for k, v in row.items()} for row in csv.DictReader(f)]
    except FileNotFoundError as exc:
        raise DatasetIOError(f"file not found: {p}") from exc


def write_summary(run_dir: PathLike, summary: Mapping[str, Any]) -> Path:
    payload = {"artifact_version": ARTIFACT_VERSION}
    payload.update(summary)
    return write_json_atomic(Path(run_dir) / SUMMARY_FILE, payload)


def write_timings(run_dir: PathLike, timings: Mapping[str, float]) -> Path:
    return write_json_atomic(Path(run_dir) / TIMINGS_FILE, dict(timings))


# --- model snapshot --------------------------------------------------------

def model_to_dict(net: Network, o: WrapWeights) -> Dict[str, Any]:
    return {
        "artifact_version": ARTIFACT_VERSION,
        "arch": list(net.arch),
        "head": net.head.value,
        "activations": [a.value for a in net.activations],
        "dropout": list(net.dropout),
        "layers": [
            {"weight": layer.weight.tolist(), "bias": layer.bias.tolist()}
            for layer in net.layers
        ],
        "o": o.o.tolist(),
        "o_floor": o.floor,
    }


def model_from_dict(data: Mapping[str, Any]) -> Tuple[Network, WrapWeights]:
    try:
        layers = tuple(
            DenseLayer(weight=np.asarray(l["weight"], dtype=np.float64), bias=np.asarray(l["bias"], dtype=np.float64))
            for l in data["layers"]
        )
        net = Network(
            layers=layers,
            arch=tuple(int(w) for w in data["arch"]),
            activations=tuple(Activation(a) for a in data["activations"]),
            head=Head(data["head"]),
            dropout=tuple(float(r) for r in data["dropout"]),
        )
        o = WrapWeights(o=np.asarray(data["o"], dtype=np.float64), floor=float(data["o_floor"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise DatasetIOError(f"malformed model snapshot: {exc}") from exc
    return net, o


def write_model(run_dir: PathLike, net: Network, o: WrapWeights) -> Path:
    return write_json_atomic(Path(run_dir) / MODEL_FILE, model_to_dict(net, o))


def load_model(path: PathLike) -> Tuple[Network, WrapWeights]:
    return model_from_dict(read_json(path))


# --- comparison ------------------------------------------------------------

def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return fmt_float(v)
    return str(v)


def comparison_csv_text(rows: Sequence[Mapping[str, Any]]) -> str:
    return _csv_text(COMPARISON_COLUMNS, ([_cell(r.get(c)) for c in COMPARISON_COLUMNS] for r in rows))


def write_comparison(out_dir: PathLike, rows: Sequence[Mapping[str, Any]], report: Mapping[str, Any]) -> Tuple[Path, Path]:
    out = Path(out_dir)
    csv_path = write_text_atomic(out / COMPARISON_CSV, comparison_csv_text(rows))
    payload = {"artifact_version": ARTIFACT_VERSION}
    payload.update(report)
    json_path = write_json_atomic(out / COMPARISON_JSON, payload)
    log.info("comparison written to %s", out)
    return csv_path, json_path


# --- analysis grids --------------------------------------------------------

def surface_csv_text(axis1_name: str, axis2_name: str, axis1, axis2, values) -> str:
    """First row: corner label then axis2 values; each next row: axis1 value then the surface row."""
    header = [f"{axis1_name}\\{axis2_name}"] + [fmt_float(v) for v in axis2]
    rows = ([fmt_float(a)] + [fmt_float(v) for v in row] for a, row in zip(axis1, values))
    return _csv_text(header, rows)


def write_surface_csv(path: PathLike, axis1_name: str, axis2_name: str, axis1, axis2, values) -> Path:
    return write_text_atomic(path, surface_csv_text(axis1_name, axis2_name, axis1, axis2, values))
