# -*- coding: utf-8 -*-
"""Experiment config serializer (JSON dict <-> ExperimentConfig).

from_dict collects every structural problem (unknown keys, wrong types,
unknown enum tags) before raising, so one run of the CLI reports them all.
Range checks live in core/validators and run afterwards.
"""
from __future__ import annotations

import math
from dataclasses import fields
from enum import Enum
from pathlib import Path
from typing import Any, Dict, FrozenSet, List, Optional, Tuple, Type

from core.errors import ConfigValidationError
from core.keys import (
    CSV_KEYS,
    CSV_SCHEMA_KEYS,
    HETERO_KEYS,
    IMBALANCE_KEYS,
    NETWORK_KEYS,
    TOP_LEVEL_KEYS,
    TRAIN_KEYS,
    K,
)
from core.models.data import CsvSchema, DataSource, HeteroSpec, ImbalanceSpec, MapKind
from core.models.experiment import DataConfig, ExperimentConfig, NetworkConfig, Task
from core.models.nn import Activation, OptimizerKind
from core.models.train import ClassLoss, Metric, OMode, TrainConfig
from core.types import Issue, Severity


def _at(ctx: str, key: str) -> str:
    return f"{ctx}.{key}" if ctx else key


class _Reader:
    """Typed field access that records an Issue instead of raising."""

    def __init__(self) -> None:
        self.issues: List[Issue] = []

    def bad(self, context: str, message: str, code: str = "CFG_TYPE") -> None:
        self.issues.append(Issue(code=code, message=message, severity=Severity.ERROR, context=context))

    def section(self, data: Any, context: str, allowed: FrozenSet[str]) -> Dict[str, Any]:
        if not isinstance(data, dict):
            self.bad(context, f"expected an object, got {type(data).__name__}")
            return {}
        for key in sorted(set(data) - allowed):
            self.bad(_at(context, key), "unknown key", code="CFG_UNKNOWN_KEY")
        return data

    def integer(self, d: Dict[str, Any], key: str, ctx: str, default: Any) -> Any:
        v = d.get(key, default)
        if v is default:
            return v
        if isinstance(v, bool) or not isinstance(v, (int, float)) or (isinstance(v, float) and not v.is_integer()):
            self.bad(_at(ctx, key), f"expected an integer, got {v!r}")
            return default
        return int(v)

    def number(self, d: Dict[str, Any], key: str, ctx: str, default: Any) -> Any:
        v = d.get(key, default)
        if v is default:
            return v
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            self.bad(_at(ctx, key), f"expected a finite number, got {v!r}")
            return default
        return float(v)

    def boolean(self, d: Dict[str, Any], key: str, ctx: str, default: bool) -> bool:
        v = d.get(key, default)
        if not isinstance(v, bool):
            self.bad(_at(ctx, key), f"expected true/false, got {v!r}")
            return default
        return v

    def string(self, d: Dict[str, Any], key: str, ctx: str, default: Any) -> Any:
        v = d.get(key, default)
        if v is default or v is None:
            return v
        if not isinstance(v, str):
            self.bad(_at(ctx, key), f"expected a string, got {v!r}")
            return default
        return v

    def enum(self, d: Dict[str, Any], key: str, ctx: str, cls: Type[Enum], default: Any) -> Any:
        v = d.get(key, default)
        if v is default:
            return v
        try:
            return cls(v)
        except ValueError:
            choices = ", ".join(repr(m.value) for m in cls)
            self.bad(_at(ctx, key), f"{v!r} is not one of {choices}", code="CFG_ENUM")
            return default

    def numbers(self, d: Dict[str, Any], key: str, ctx: str, default: Any) -> Any:
        v = d.get(key, default)
        if v is default:
            return v
        if not isinstance(v, list) or any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in v):
            self.bad(_at(ctx, key), f"expected a list of numbers, got {v!r}")
            return default
        return tuple(float(x) for x in v)

    def integers(self, d: Dict[str, Any], key: str, ctx: str, default: Any) -> Any:
        v = d.get(key, default)
        if v is default:
            return v
        if not isinstance(v, list) or any(isinstance(x, bool) or not isinstance(x, int) for x in v):
            self.bad(_at(ctx, key), f"expected a list of integers, got {v!r}")
            return default
        return tuple(int(x) for x in v)


def _defaults(cls) -> Dict[str, Any]:
    return {f.name: f.default for f in fields(cls)}


def _hetero(r: _Reader, d: Dict[str, Any]) -> HeteroSpec:
    df = _defaults(HeteroSpec)
    return HeteroSpec(
        n_features=r.integer(d, "n_features", "data", df["n_features"]),
        n_outputs=r.integer(d, "n_outputs", "data", df["n_outputs"]),
        map_kind=r.enum(d, "map_kind", "data", MapKind, df["map_kind"]),
        sigma=r.numbers(d, "sigma", "data", df["sigma"]),
        n_train=r.integer(d, "n_train", "data", df["n_train"]),
        n_test=r.integer(d, "n_test", "data", df["n_test"]),
        mixture_units=r.integer(d, "mixture_units", "data", df["mixture_units"]),
        seed=r.integer(d, "seed", "data", df["seed"]),
    )


def _imbalance(r: _Reader, d: Dict[str, Any]) -> ImbalanceSpec:
    df = _defaults(ImbalanceSpec)
    n_classes = r.integer(d, "n_classes", "data", df["n_classes"])
    retention = r.numbers(d, "retention", "data", None)
    if retention is None:
        retention = (1.0,) * (n_classes if isinstance(n_classes, int) and n_classes > 0 else 0)
    return ImbalanceSpec(
        n_classes=n_classes,
        n_features=r.integer(d, "n_features", "data", df["n_features"]),
        base_per_class=r.integer(d, "base_per_class", "data", df["base_per_class"]),
        retention=retention,
        test_per_class=r.integer(d, "test_per_class", "data", df["test_per_class"]),
        spread=r.number(d, "spread", "data", df["spread"]),
        separation=r.number(d, "separation", "data", df["separation"]),
        seed=r.integer(d, "seed", "data", df["seed"]),
    )


def _columns(r: _Reader, d: Dict[str, Any], key: str) -> Tuple[object, ...]:
    v = d.get(key, [])
    if not isinstance(v, list) or any(isinstance(x, bool) or not isinstance(x, (str, int)) for x in v):
        r.bad(f"data.schema.{key}", f"expected a list of column names or indices, got {v!r}")
        return ()
    return tuple(v)


def _schema(r: _Reader, raw: Any) -> CsvSchema:
    d = r.section(raw, "data.schema", CSV_SCHEMA_KEYS)
    label = d.get("label_column")
    if label is not None and (isinstance(label, bool) or not isinstance(label, (str, int))):
        r.bad("data.schema.label_column", f"expected a column name or index, got {label!r}")
        label = None
    return CsvSchema(
        target_columns=_columns(r, d, "target_columns"),
        label_column=label,
        feature_columns=_columns(r, d, "feature_columns"),
        delimiter=r.string(d, "delimiter", "data.schema", ","),
        header=r.boolean(d, "header", "data.schema", True),
        n_classes=r.integer(d, "n_classes", "data.schema", None),
    )


def _resolve_path(p: Optional[str], base_dir: Optional[Path]) -> Optional[str]:
    if not p or base_dir is None or Path(p).is_absolute():
        return p
    return str((base_dir / p).resolve())


def _data(r: _Reader, raw: Any, base_dir: Optional[Path]) -> DataConfig:
    if not isinstance(raw, dict):
        r.bad("data", f"expected an object, got {type(raw).__name__}")
        return DataConfig(hetero=HeteroSpec())
    source = r.enum(raw, K.SOURCE, "data", DataSource, DataSource.HETERO)
    allowed = {DataSource.HETERO: HETERO_KEYS, DataSource.IMBALANCE: IMBALANCE_KEYS, DataSource.CSV: CSV_KEYS}[source]
    d = r.section(raw, "data", allowed)
    standardize = r.boolean(d, K.STANDARDIZE, "data", True)
    if source == DataSource.HETERO:
        return DataConfig(source=source, standardize=standardize, hetero=_hetero(r, d))
    if source == DataSource.IMBALANCE:
        return DataConfig(source=source, standardize=standardize, imbalance=_imbalance(r, d))
    return DataConfig(
        source=source,
        standardize=standardize,
        train_path=_resolve_path(r.string(d, K.TRAIN_PATH, "data", None), base_dir),
        test_path=_resolve_path(r.string(d, K.TEST_PATH, "data", None), base_dir),
        schema=_schema(r, d[K.SCHEMA]) if K.SCHEMA in d else None,
    )


def _network(r: _Reader, raw: Any) -> NetworkConfig:
    d = r.section(raw, "network", NETWORK_KEYS)
    df = _defaults(NetworkConfig)
    dropout_raw = d.get(K.DROPOUT, df["dropout"])
    if isinstance(dropout_raw, list):
        dropout = r.numbers(d, K.DROPOUT, "network", df["dropout"])
    else:
        dropout = r.number(d, K.DROPOUT, "network", df["dropout"])
    return NetworkConfig(
        hidden=r.integers(d, K.HIDDEN, "network", df["hidden"]),
        activation=r.enum(d, K.ACTIVATION, "network", Activation, df["activation"]),
        dropout=dropout,
        init_seed=r.integer(d, K.INIT_SEED, "network", df["init_seed"]),
    )


def _train(r: _Reader, raw: Any, task: Task, tracked: Optional[Metric]) -> Tuple[TrainConfig, Optional[str]]:
    d = r.section(raw, "train", TRAIN_KEYS)
    df = _defaults(TrainConfig)
    static = d.get(K.STATIC_WEIGHTS)
    rule: Optional[str] = None
    weights = None
    if isinstance(static, str):
        rule = static
    elif static is not None:
        weights = r.numbers(d, K.STATIC_WEIGHTS, "train", None)
    cfg = TrainConfig(
        epochs=r.integer(d, K.EPOCHS, "train", df["epochs"]),
        lr=r.number(d, K.LR, "train", df["lr"]),
        batch_size=r.integer(d, K.BATCH_SIZE, "train", df["batch_size"]),
        optimizer=r.enum(d, K.OPTIMIZER, "train", OptimizerKind, df["optimizer"]),
        loss_kind=task.loss_kind,
        o_mode=r.enum(d, K.O_MODE, "train", OMode, df["o_mode"]),
        class_loss=r.enum(d, K.CLASS_LOSS, "train", ClassLoss, df["class_loss"]),
        beta=r.number(d, K.BETA, "train", df["beta"]),
        o_lr=r.number(d, K.O_LR, "train", None),
        static_weights=weights,
        o_floor=r.number(d, K.O_FLOOR, "train", df["o_floor"]),
        tol=r.number(d, K.TOL, "train", df["tol"]),
        patience=r.integer(d, K.PATIENCE, "train", df["patience"]),
        seed=r.integer(d, K.SEED, "train", df["seed"]),
        eval_metric=tracked,
        log_every=r.integer(d, K.LOG_EVERY, "train", df["log_every"]),
    )
    return cfg, rule


def from_dict(data: Any, base_dir: Optional[Path] = None) -> ExperimentConfig:
    """Build an ExperimentConfig. Relative csv paths resolve against ``base_dir``."""
    r = _Reader()
    top = r.section(data, "", TOP_LEVEL_KEYS)
    label = r.string(top, K.LABEL, "", None)
    if label is None:
        r.bad(K.LABEL, "missing label", code="CFG_MISSING")
        label = ""
    task = r.enum(top, K.TASK, "", Task, None)
    if task is None:
        if K.TASK not in top:
            r.bad(K.TASK, "missing task ('regression' or 'classification')", code="CFG_MISSING")
        task = Task.REGRESSION

    metrics: List[Metric] = []
    raw_metrics = top.get(K.METRICS, [])
    if not isinstance(raw_metrics, list):
        r.bad(K.METRICS, f"expected a list of metric names, got {raw_metrics!r}")
        raw_metrics = []
    for m in raw_metrics:
        try:
            metrics.append(Metric(m))
        except ValueError:
            r.bad(K.METRICS, f"unknown metric {m!r}", code="CFG_ENUM")

    if K.DATA not in top:
        r.bad(K.DATA, "missing data section", code="CFG_MISSING")
    data_cfg = _data(r, top.get(K.DATA, {}), base_dir)
    network = _network(r, top.get(K.NETWORK, {}))
    train, rule = _train(r, top.get(K.TRAIN, {}), task, metrics[0] if metrics else None)
    output_dir = r.string(top, K.OUTPUT_DIR, "", None)

    if r.issues:
        raise ConfigValidationError(r.issues)
    return ExperimentConfig(
        label=label,
        task=task,
        data=data_cfg,
        network=network,
        train=train,
        metrics=tuple(metrics),
        output_dir=output_dir,
        static_weights_rule=rule,
    )


def _plain(v: Any) -> Any:
    if isinstance(v, Enum):
        return v.value
    if isinstance(v, tuple):
        return [_plain(x) for x in v]
    return v


def _spec_dict(obj: Any) -> Dict[str, Any]:
    return {f.name: _plain(getattr(obj, f.name)) for f in fields(obj)}


def to_dict(cfg: ExperimentConfig) -> Dict[str, Any]:
    """Config echo in the same shape from_dict accepts."""
    d = cfg.data
    data: Dict[str, Any] = {K.SOURCE: d.source.value, K.STANDARDIZE: d.standardize}
    if d.hetero is not None:
        data.update(_spec_dict(d.hetero))
    elif d.imbalance is not None:
        data.update(_spec_dict(d.imbalance))
    else:
        data[K.TRAIN_PATH] = d.train_path
        data[K.TEST_PATH] = d.test_path
        if d.schema is not None:
            data[K.SCHEMA] = _spec_dict(d.schema)

    t = cfg.train
    train = {
        K.EPOCHS: t.epochs,
        K.LR: t.lr,
        K.BATCH_SIZE: t.batch_size,
        K.OPTIMIZER: t.optimizer.value,
        K.O_MODE: t.o_mode.value,
        K.CLASS_LOSS: t.class_loss.value,
        K.BETA: t.beta,
        K.O_FLOOR: t.o_floor,
        K.TOL: t.tol,
        K.PATIENCE: t.patience,
        K.SEED: t.seed,
        K.LOG_EVERY: t.log_every,
    }
    if t.o_lr is not None:
        train[K.O_LR] = t.o_lr
    if cfg.static_weights_rule is not None:
        train[K.STATIC_WEIGHTS] = cfg.static_weights_rule
    elif t.static_weights is not None:
        train[K.STATIC_WEIGHTS] = list(t.static_weights)

    out: Dict[str, Any] = {
        K.LABEL: cfg.label,
        K.TASK: cfg.task.value,
        K.DATA: data,
        K.NETWORK: _spec_dict(cfg.network),
        K.TRAIN: train,
        K.METRICS: [m.value for m in cfg.metrics],
    }
    if cfg.output_dir is not None:
        out[K.OUTPUT_DIR] = cfg.output_dir
    return out


def data_from_dict(raw: Any, base_dir: Optional[Path] = None) -> DataConfig:
    """Parse a lone data section (used by the datagen command)."""
    r = _Reader()
    cfg = _data(r, raw, base_dir)
    if r.issues:
        raise ConfigValidationError(r.issues)
    return cfg
