# -*- coding: utf-8 -*-
"""ExperimentService

One config -> data -> network -> training -> artifacts on disk.

Run directory layout (``<root>/<label>/``):
    metrics.csv   one row per epoch
    summary.json  best metric, epoch of best, diagnostics, config echo
    model.json    final network and o
    timings.json  wall-clock seconds (the only non-reproducible file)
"""

from __future__ import annotations

import dataclasses
import logging
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from core.calculations.losses import median_frequency_weights, mle_sigma_sq, per_output_squared_error
from core.calculations.nn import degrees_of_freedom, forward, init_network
from core.keys import MEDIAN_FREQUENCY
from core.models.data import DataSource
from core.models.dataset import Dataset
from core.models.experiment import ExperimentConfig, Task
from core.models.losses import WrapWeights
from core.models.nn import Mode, Network
from core.models.train import EpochMetrics, Metric
from domain.analysis import expected_wrap_estimate
from domain.datagen import gen_heteroscedastic_regression, gen_imbalanced_classification, standardize
from domain.trainer import Observer, epoch_of_best, evaluate, train
from infra.paths import output_root
from infra.perf import span
from services.validation_service import ensure_valid
from storage.artifacts import write_metrics_csv, write_model, write_summary, write_timings
from storage.atomic import read_json
from storage.dataset_csv import load_csv_dataset
from storage.serializers.experiment_json import from_dict, to_dict

log = logging.getLogger(__name__)

PathLike = Union[str, Path]


@dataclass
class RunResult:
    label: str
    run_dir: Path
    summary: Dict[str, Any]
    history: List[EpochMetrics]
    network: Network
    o: WrapWeights
    timings: Dict[str, float] = field(default_factory=dict)


# --- config ----------------------------------------------------------------

def load_config(path: PathLike, *, seed: Optional[int] = None) -> ExperimentConfig:
    """Parse and validate; ``seed`` overrides train.seed."""
    p = Path(path)
    cfg = from_dict(read_json(p), base_dir=p.resolve().parent)
    if seed is not None:
        cfg = with_seed(cfg, seed)
    return ensure_valid(cfg)


def with_seed(cfg: ExperimentConfig, seed: int) -> ExperimentConfig:
    return dataclasses.replace(cfg, train=dataclasses.replace(cfg.train, seed=int(seed)))


# --- building blocks -------------------------------------------------------

def prepare_data(cfg: ExperimentConfig) -> Tuple[Dataset, Dataset]:
    d = cfg.data
    with span(f"data:{cfg.label}"):
        if d.source == DataSource.HETERO:
            train_ds, test_ds = gen_heteroscedastic_regression(d.hetero)
        elif d.source == DataSource.IMBALANCE:
            train_ds, test_ds = gen_imbalanced_classification(d.imbalance)
        else:
            train_ds = load_csv_dataset(d.train_path, d.schema)
            test_ds = load_csv_dataset(d.test_path, d.schema)
            if train_ds.is_classification and train_ds.n_classes != test_ds.n_classes:
                # widen both to the same class count
                c = max(train_ds.n_classes, test_ds.n_classes)
                train_ds = Dataset(X=train_ds.X, labels=train_ds.labels, n_classes=c, provenance=train_ds.provenance)
                test_ds = Dataset(X=test_ds.X, labels=test_ds.labels, n_classes=c, provenance=test_ds.provenance)
        if d.standardize:
            train_ds, test_ds, _ = standardize(train_ds, test_ds)
    return train_ds, test_ds


def build_network(cfg: ExperimentConfig, train_ds: Dataset) -> Network:
    arch = [train_ds.p, *cfg.network.hidden, train_ds.c]
    seed = cfg.network.init_seed if cfg.network.init_seed is not None else cfg.train.seed
    return init_network(arch, head=cfg.task.head, dropout=cfg.network.dropout, seed=seed,
                        activation=cfg.network.activation)


def resolve_static_weights(cfg: ExperimentConfig, train_ds: Dataset) -> ExperimentConfig:
    if cfg.static_weights_rule != MEDIAN_FREQUENCY:
        return cfg
    weights = tuple(float(w) for w in median_frequency_weights(train_ds.class_counts()))
    log.info("%s: median-frequency weights %s", cfg.label, [round(w, 4) for w in weights])
    return dataclasses.replace(cfg, train=dataclasses.replace(cfg.train, static_weights=weights))


def _scalar(v: Any) -> Any:
    if isinstance(v, np.ndarray):
        return [float(x) for x in v]
    return float(v)


def build_summary(
    cfg: ExperimentConfig,
    history: List[EpochMetrics],
    net: Network,
    o: WrapWeights,
    test_ds: Dataset,
) -> Dict[str, Any]:
    metric = cfg.tracked_metric
    best_epoch, best_value = epoch_of_best(history, metric.maximize)
    dof = degrees_of_freedom(net)
    summary: Dict[str, Any] = {
        "label": cfg.label,
        "task": cfg.task.value,
        "metric": metric.value,
        "best_metric": best_value,
        "epoch_of_best": best_epoch,
        "epochs_run": len(history),
        "dof": dof,
        "final_train_wrapped_loss": history[-1].train_wrapped_loss,
        "final_train_original_loss": history[-1].train_original_loss,
        "final_o": [float(v) for v in o.o],
        "final_metrics": {m.value: _scalar(evaluate(net, test_ds, m)) for m in (cfg.metrics or (metric,))},
    }
    if cfg.static_weights_rule is not None or cfg.train.static_weights is not None:
        summary["static_weights"] = list(cfg.train.static_weights or ())
    if cfg.task == Task.REGRESSION:
        outputs, _ = forward(net, test_ds.X, mode=Mode.EVAL)
        sigma_sq = mle_sigma_sq(per_output_squared_error(test_ds.Y, outputs)).variance
        summary["expected_wrap_estimate"] = expected_wrap_estimate(test_ds.c, dof, sigma_sq)
        summary["test_sigma_sq"] = [float(v) for v in sigma_sq]
    else:
        best = history[best_epoch - 1]
        summary["best_per_class_accuracy"] = list(best.per_class_accuracy or ())
        summary["final_per_class_accuracy"] = list(history[-1].per_class_accuracy or ())
    summary["config"] = to_dict(cfg)
    return summary


# --- run -------------------------------------------------------------------

def run_prepared(
    cfg: ExperimentConfig,
    train_ds: Dataset,
    test_ds: Dataset,
    root: PathLike,
    observer: Optional[Observer] = None,
) -> RunResult:
    run_dir = Path(root) / cfg.label
    t0 = time.perf_counter()
    cfg = resolve_static_weights(cfg, train_ds)
    net = build_network(cfg, train_ds)
    log.info("run %s: arch=%s o_mode=%s epochs<=%d", cfg.label, list(net.arch), cfg.train.o_mode.value, cfg.train.epochs)
    with span(f"train:{cfg.label}", threshold_ms=0.0) as timed:
        result = train(net, train_ds, test_ds, cfg.train, observer=observer)
    t_train = timed.seconds

    summary = build_summary(cfg, result.history, result.network, result.o, test_ds)
    write_metrics_csv(run_dir, result.history)
    write_summary(run_dir, summary)
    write_model(run_dir, result.network, result.o)
    timings = {"train_s": t_train, "total_s": time.perf_counter() - t0}
    write_timings(run_dir, timings)
    log.info("run %s: best %s=%.6g at epoch %d of %d", cfg.label, summary["metric"], summary["best_metric"],
             summary["epoch_of_best"], summary["epochs_run"])
    return RunResult(label=cfg.label, run_dir=run_dir, summary=summary, history=result.history,
                     network=result.network, o=result.o, timings=timings)


def resolve_root(cfg_output_dir: Optional[str], out_dir: Optional[PathLike]) -> Path:
    """--out-dir, then the config's output_dir, then WRAPLOSS_OUT / ./runs."""
    if out_dir:
        return Path(out_dir)
    if cfg_output_dir:
        return Path(cfg_output_dir)
    return output_root()


def run_experiment(
    cfg: ExperimentConfig,
    out_dir: Optional[PathLike] = None,
    observer: Optional[Observer] = None,
) -> RunResult:
    ensure_valid(cfg)
    train_ds, test_ds = prepare_data(cfg)
    return run_prepared(cfg, train_ds, test_ds, resolve_root(cfg.output_dir, out_dir), observer=observer)


def run_experiment_file(path: PathLike, *, seed: Optional[int] = None, out_dir: Optional[PathLike] = None) -> RunResult:
    return run_experiment(load_config(path, seed=seed), out_dir=out_dir)
