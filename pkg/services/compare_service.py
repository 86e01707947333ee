# -*- coding: utf-8 -*-
"""CompareService

Expands a grid config (or a list of experiment configs) into runs, executes
them on a thread pool and assembles a ComparisonReport. A failing run never
aborts the others; it shows up as a failed row with its diagnostics.

Grid config:
    {
      "base": {...experiment config...},
      "grid": {"train.o_mode": ["off", "assignment"], "train.seed": [1, 2]},
      "runs": [{"label": "wr", "overrides": {"train.o_mode": "assignment"}}],
      "adjusted_class": 3,
      "output_dir": "runs/cmp"
    }

Grid axes expand as a cartesian product in declaration order; labels get
"-key=value" suffixes. ``runs`` entries (if any) are crossed with the grid.
"""

from __future__ import annotations

import copy
import itertools
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from core.errors import ConfigValidationError, WrapLossError
from core.keys import GRID_KEYS, K
from core.models.data import DataSource
from core.models.dataset import Dataset
from core.models.experiment import ExperimentConfig, Task
from core.models.train import Metric
from core.types import Issue, Severity
from infra.perf import span
from services.errors import ExitCode, exit_code_for
from services.experiment_service import prepare_data, resolve_root, run_prepared, with_seed
from services.validation_service import collect_issues
from storage.artifacts import write_comparison, write_timings
from storage.atomic import read_json
from storage.serializers.experiment_json import from_dict

log = logging.getLogger(__name__)

PathLike = Union[str, Path]


@dataclass(frozen=True)
class RunRow:
    label: str
    status: str
    metric: Optional[str] = None
    best_metric: Optional[float] = None
    epoch_of_best: Optional[int] = None
    epochs_run: Optional[int] = None
    o_min: Optional[float] = None
    o_max: Optional[float] = None
    o_mean: Optional[float] = None
    adj_accuracy: Optional[float] = None
    total_accuracy: Optional[float] = None
    per_class_accuracy: Optional[Tuple[float, ...]] = None
    final_o: Optional[Tuple[float, ...]] = None
    error: Optional[str] = None
    exit_code: int = 0
    wall_time_s: float = 0.0

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def as_dict(self) -> Dict[str, Any]:
        """Reproducible fields only (no wall time)."""
        d = {
            "label": self.label,
            "status": self.status,
            "metric": self.metric,
            "best_metric": self.best_metric,
            "epoch_of_best": self.epoch_of_best,
            "epochs_run": self.epochs_run,
            "o_min": self.o_min,
            "o_max": self.o_max,
            "o_mean": self.o_mean,
            "adj_accuracy": self.adj_accuracy,
            "total_accuracy": self.total_accuracy,
            "error": self.error,
        }
        if self.per_class_accuracy is not None:
            d["per_class_accuracy"] = list(self.per_class_accuracy)
        if self.final_o is not None:
            d["final_o"] = list(self.final_o)
        return d


@dataclass
class ComparisonReport:
    rows: List[RunRow]
    adjusted_class: Optional[int] = None
    out_dir: Optional[Path] = None
    timings: Dict[str, float] = field(default_factory=dict)

    @property
    def failures(self) -> List[RunRow]:
        return [r for r in self.rows if not r.ok]

    @property
    def exit_code(self) -> ExitCode:
        for r in self.rows:
            if not r.ok:
                return ExitCode(r.exit_code)
        return ExitCode.OK

    def row(self, label: str) -> RunRow:
        for r in self.rows:
            if r.label == label:
                return r
        raise KeyError(label)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "adjusted_class": self.adjusted_class,
            "runs": [r.as_dict() for r in self.rows],
            "failures": [{"label": r.label, "error": r.error, "exit_code": r.exit_code} for r in self.failures],
        }


# --- grid expansion --------------------------------------------------------

def _set_dotted(cfg: Dict[str, Any], dotted: str, value: Any) -> None:
    parts = dotted.split(".")
    node = cfg
    for p in parts[:-1]:
        if not isinstance(node.get(p), dict):
            node[p] = {}
        node = node[p]
    node[parts[-1]] = copy.deepcopy(value)


def _fmt_value(v: Any) -> str:
    if isinstance(v, list):
        return "[" + ",".join(_fmt_value(x) for x in v) + "]"
    return str(v)


def expand_grid(grid_cfg: Dict[str, Any]) -> List[Dict[str, Any]]:
    """Experiment-config dicts, one per run, in a stable order."""
    issues: List[Issue] = []
    if not isinstance(grid_cfg, dict):
        raise ConfigValidationError([Issue("CMP_SHAPE", "grid config must be an object", Severity.ERROR, None)])
    for key in sorted(set(grid_cfg) - GRID_KEYS):
        issues.append(Issue("CFG_UNKNOWN_KEY", "unknown key", Severity.ERROR, key))
    base = grid_cfg.get(K.BASE)
    if not isinstance(base, dict):
        issues.append(Issue("CMP_BASE", "grid config needs a 'base' experiment object", Severity.ERROR, K.BASE))
    grid = grid_cfg.get(K.GRID, {}) or {}
    if not isinstance(grid, dict) or any(not isinstance(v, list) or not v for v in grid.values()):
        issues.append(Issue("CMP_GRID", "grid maps 'section.key' to a non-empty list of values", Severity.ERROR, K.GRID))
        grid = {}
    runs = grid_cfg.get(K.RUNS, []) or []
    if not isinstance(runs, list) or any(
        not isinstance(r, dict) or not isinstance(r.get(K.LABEL), str) or not isinstance(r.get(K.OVERRIDES, {}), dict)
        for r in runs
    ):
        issues.append(Issue("CMP_RUNS", "runs must be a list of {label, overrides}", Severity.ERROR, K.RUNS))
        runs = []
    if issues:
        raise ConfigValidationError(issues)

    variants: List[Tuple[str, Dict[str, Any]]] = (
        [(r[K.LABEL], r.get(K.OVERRIDES, {})) for r in runs] if runs else [(str(base.get(K.LABEL, "run")), {})]
    )
    axes = list(grid.items())
    out: List[Dict[str, Any]] = []
    for label, overrides in variants:
        for combo in itertools.product(*(values for _, values in axes)):
            cfg = copy.deepcopy(base)
            for dotted, value in overrides.items():
                _set_dotted(cfg, dotted, value)
            suffix = []
            for (dotted, _), value in zip(axes, combo):
                _set_dotted(cfg, dotted, value)
                suffix.append(f"{dotted.split('.')[-1]}={_fmt_value(value)}")
            cfg[K.LABEL] = "-".join([label] + suffix)
            out.append(cfg)
    return out


def _adjusted_class(cfg: ExperimentConfig, explicit: Optional[int]) -> Optional[int]:
    if explicit is not None:
        return int(explicit)
    spec = cfg.data.imbalance
    if cfg.data.source != DataSource.IMBALANCE or spec is None:
        return None
    reduced = [i for i, r in enumerate(spec.retention) if r < 1.0]
    return reduced[0] if len(reduced) == 1 else None


def load_comparison(
    paths: Sequence[PathLike],
    *,
    seed: Optional[int] = None,
) -> Tuple[List[ExperimentConfig], Optional[int], Optional[str]]:
    """One grid config, or two or more experiment configs.

    Returns (configs, explicit adjusted class, output_dir). Raises one
    ConfigValidationError naming every problem across all runs.
    """
    raw_cfgs: List[Tuple[Dict[str, Any], Path]] = []
    adjusted = None
    output_dir = None
    first = read_json(paths[0])
    if len(paths) == 1 and isinstance(first, dict) and K.BASE in first:
        base_dir = Path(paths[0]).resolve().parent
        raw_cfgs = [(c, base_dir) for c in expand_grid(first)]
        adjusted = first.get(K.ADJUSTED_CLASS)
        output_dir = first.get(K.OUTPUT_DIR)
    else:
        raw_cfgs = [(first, Path(paths[0]).resolve().parent)]
        raw_cfgs += [(read_json(p), Path(p).resolve().parent) for p in paths[1:]]

    issues: List[Issue] = []
    configs: List[ExperimentConfig] = []
    for raw, base_dir in raw_cfgs:
        tag = raw.get(K.LABEL, "?") if isinstance(raw, dict) else "?"
        try:
            cfg = from_dict(raw, base_dir=base_dir)
        except ConfigValidationError as exc:
            issues.extend(_prefixed(exc.issues, str(tag)))
            continue
        if seed is not None:
            cfg = with_seed(cfg, seed)
        issues.extend(_prefixed([i for i in collect_issues(cfg) if i.severity == Severity.ERROR], cfg.label))
        configs.append(cfg)

    if len(raw_cfgs) < 2:
        issues.append(Issue("CMP_COUNT", "a comparison needs at least 2 runs", Severity.ERROR, None))
    labels = [c.label for c in configs]
    dupes = sorted({l for l in labels if labels.count(l) > 1})
    if dupes:
        issues.append(Issue("CMP_LABELS", f"duplicate run labels: {dupes}", Severity.ERROR, K.LABEL))
    if adjusted is not None and (isinstance(adjusted, bool) or not isinstance(adjusted, int) or adjusted < 0):
        issues.append(Issue("CMP_ADJ", f"adjusted_class must be a class index, got {adjusted!r}", Severity.ERROR,
                            K.ADJUSTED_CLASS))
    if issues:
        raise ConfigValidationError(issues)
    return configs, adjusted, output_dir


def _prefixed(issues: Sequence[Issue], label: str) -> List[Issue]:
    return [Issue(i.code, i.message, i.severity, f"{label}:{i.context}" if i.context else label) for i in issues]


# --- execution -------------------------------------------------------------

def _row_from_summary(summary: Dict[str, Any], history, adjusted: Optional[int], wall: float) -> RunRow:
    best = history[summary["epoch_of_best"] - 1]
    per_class = tuple(best.per_class_accuracy) if best.per_class_accuracy is not None else None
    adj = None
    if per_class is not None and adjusted is not None and 0 <= adjusted < len(per_class):
        adj = per_class[adjusted]
    total = best.eval_metric if summary["metric"] == Metric.ACCURACY.value else None
    o = np.asarray(summary["final_o"], dtype=np.float64)
    return RunRow(
        label=summary["label"],
        status="ok",
        metric=summary["metric"],
        best_metric=float(summary["best_metric"]),
        epoch_of_best=int(summary["epoch_of_best"]),
        epochs_run=int(summary["epochs_run"]),
        o_min=float(np.min(o)),
        o_max=float(np.max(o)),
        o_mean=float(np.mean(o)),
        adj_accuracy=adj,
        total_accuracy=total,
        per_class_accuracy=per_class,
        final_o=tuple(float(v) for v in o),
        wall_time_s=wall,
    )


def _run_one(
    cfg: ExperimentConfig,
    data: Tuple[Dataset, Dataset],
    root: Path,
    adjusted: Optional[int],
) -> RunRow:
    t0 = time.perf_counter()
    try:
        result = run_prepared(cfg, data[0], data[1], root)
    except Exception as exc:  # partial report: one failure must not sink the others
        code = exit_code_for(exc)
        level = logging.WARNING if isinstance(exc, WrapLossError) else logging.ERROR
        log.log(level, "run %s failed: %s", cfg.label, exc)
        return RunRow(label=cfg.label, status="failed", error=f"{type(exc).__name__}: {exc}",
                      exit_code=int(code), wall_time_s=time.perf_counter() - t0)
    return _row_from_summary(result.summary, result.history, adjusted, time.perf_counter() - t0)


def run_comparison(
    configs: Sequence[ExperimentConfig],
    *,
    out_dir: Optional[PathLike] = None,
    output_dir: Optional[str] = None,
    adjusted_class: Optional[int] = None,
    jobs: int = 1,
) -> ComparisonReport:
    """Run every config (``jobs`` at a time) and write comparison.csv/json under the output root."""
    if len(configs) < 2:
        raise ConfigValidationError([Issue("CMP_COUNT", "a comparison needs at least 2 runs", Severity.ERROR, None)])
    root = resolve_root(output_dir, out_dir)
    adjusted = _adjusted_class(configs[0], adjusted_class)

    prepared: List[Tuple[Dataset, Dataset]] = []
    with span("compare:data"):
        for cfg in configs:
            prepared.append(prepare_data(cfg))
    reference = prepared[0][1]
    mismatched = [cfg.label for cfg, (_, test) in zip(configs, prepared) if not test.same_as(reference)]
    if mismatched:
        raise ConfigValidationError([Issue(
            "CMP_EVAL_DATA", f"runs {mismatched} evaluate on different data than {configs[0].label!r}",
            Severity.ERROR, K.DATA,
        )])
    if adjusted is not None and configs[0].task == Task.CLASSIFICATION and adjusted >= reference.c:
        raise ConfigValidationError([Issue(
            "CMP_ADJ", f"adjusted_class {adjusted} is not a class of a {reference.c}-class task",
            Severity.ERROR, K.ADJUSTED_CLASS,
        )])

    t0 = time.perf_counter()
    workers = max(1, int(jobs))
    log.info("comparison: %d runs, %d worker(s), output %s", len(configs), workers, root)
    if workers == 1:
        rows = [_run_one(cfg, data, root, adjusted) for cfg, data in zip(configs, prepared)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_one, cfg, data, root, adjusted) for cfg, data in zip(configs, prepared)]
            rows = [f.result() for f in futures]

    report = ComparisonReport(rows=rows, adjusted_class=adjusted, out_dir=root)
    report.timings = {r.label: r.wall_time_s for r in rows}
    report.timings["total_s"] = time.perf_counter() - t0
    write_comparison(root, [r.as_dict() for r in rows], report.as_dict())
    write_timings(root, report.timings)
    if report.failures:
        log.warning("comparison: %d of %d runs failed", len(report.failures), len(rows))
    return report


def compare_files(
    paths: Sequence[PathLike],
    *,
    seed: Optional[int] = None,
    out_dir: Optional[PathLike] = None,
    jobs: int = 1,
) -> ComparisonReport:
    configs, adjusted, output_dir = load_comparison(paths, seed=seed)
    return run_comparison(configs, out_dir=out_dir, output_dir=output_dir, adjusted_class=adjusted, jobs=jobs)
