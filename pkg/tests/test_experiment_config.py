# -*- coding: utf-8 -*-
"""Config parsing and validation: every problem is reported, none silently ignored."""

from __future__ import annotations

import copy
import json

import pytest

from conftest import CONFIGS
from core.errors import ConfigValidationError
from core.keys import MEDIAN_FREQUENCY
from core.models.data import DataSource
from core.models.experiment import Task
from core.models.losses import LossKind
from core.models.train import ClassLoss, Metric, OMode
from core.types import errors_only
from services.compare_service import expand_grid
from services.experiment_service import load_config
from services.validation_service import collect_issues, ensure_valid
from storage.serializers.experiment_json import data_from_dict, from_dict, to_dict


def _codes(exc_info):
    return {(i.code, i.context) for i in exc_info.value.issues}


@pytest.mark.parametrize("name", ["hetero_wrapped.json", "hetero_plain.json", "quick_regression.json"])
def test_shipped_configs_are_valid(name):
    cfg = load_config(CONFIGS / name)
    assert cfg.task == Task.REGRESSION
    assert cfg.train.loss_kind == LossKind.SQUARED


def test_from_dict_fills_defaults_and_derives_loss(small_imbalance_config):
    cfg = from_dict(small_imbalance_config)
    assert cfg.data.source == DataSource.IMBALANCE
    assert cfg.data.imbalance.retention == (1.0, 0.25, 1.0)
    assert cfg.train.loss_kind == LossKind.CROSS_ENTROPY
    assert cfg.train.eval_metric == Metric.ACCURACY
    assert cfg.tracked_metric == Metric.ACCURACY
    assert cfg.network.hidden == (8,)
    assert ensure_valid(cfg) is cfg


def test_to_dict_echo_parses_to_the_same_config(small_regression_config):
    cfg = from_dict(small_regression_config)
    echo = to_dict(cfg)
    assert to_dict(from_dict(json.loads(json.dumps(echo)))) == echo
    assert echo["train"]["o_mode"] == "assignment"


def test_all_structural_problems_reported_together(small_regression_config):
    raw = copy.deepcopy(small_regression_config)
    raw["train"]["epoch"] = 3
    raw["train"]["o_mode"] = "sometimes"
    raw["network"]["hidden"] = "wide"
    raw["extra"] = True
    with pytest.raises(ConfigValidationError) as exc:
        from_dict(raw)
    codes = _codes(exc)
    assert ("CFG_UNKNOWN_KEY", "train.epoch") in codes
    assert ("CFG_ENUM", "train.o_mode") in codes
    assert ("CFG_TYPE", "network.hidden") in codes
    assert ("CFG_UNKNOWN_KEY", "extra") in codes


def test_missing_label_and_task(small_regression_config):
    raw = copy.deepcopy(small_regression_config)
    del raw["label"]
    del raw["task"]
    with pytest.raises(ConfigValidationError) as exc:
        from_dict(raw)
    assert {"label", "task"} <= {ctx for _, ctx in _codes(exc)}


def test_range_problems_are_validation_issues(small_regression_config):
    raw = copy.deepcopy(small_regression_config)
    raw["train"]["lr"] = -1.0
    raw["train"]["o_mode"] = "smoothed"
    raw["train"]["beta"] = 2.0
    raw["network"]["dropout"] = 1.0
    raw["metrics"] = ["accuracy"]
    cfg = from_dict(raw)
    codes = {i.code for i in collect_issues(cfg)}
    assert {"TRAIN_LR", "TRAIN_BETA", "NET_DROPOUT", "METRIC_TASK"} <= codes
    with pytest.raises(ConfigValidationError):
        ensure_valid(cfg)


def test_task_must_match_data_source(small_regression_config):
    raw = copy.deepcopy(small_regression_config)
    raw["task"] = "classification"
    raw["metrics"] = ["accuracy"]
    with pytest.raises(ConfigValidationError) as exc:
        ensure_valid(from_dict(raw))
    assert "EXP_TASK" in {c for c, _ in _codes(exc)}


def test_static_weights_need_o_mode_off(small_imbalance_config):
    raw = copy.deepcopy(small_imbalance_config)
    raw["train"]["static_weights"] = MEDIAN_FREQUENCY
    cfg = from_dict(raw)
    assert cfg.static_weights_rule == MEDIAN_FREQUENCY
    assert "TRAIN_STATIC_WITH_O" in {i.code for i in collect_issues(cfg)}

    raw["train"]["o_mode"] = "off"
    ensure_valid(from_dict(raw))

    raw["train"]["static_weights"] = [1.0, 2.0]
    assert "TRAIN_STATIC_LEN" in {i.code for i in collect_issues(from_dict(raw))}


def test_csv_source_paths_resolve_and_must_exist(tmp_path):
    raw = {
        "label": "csv",
        "task": "regression",
        "data": {"source": "csv", "train_path": "train.csv", "test_path": "test.csv",
                 "schema": {"target_columns": ["y0"]}},
    }
    cfg = from_dict(raw, base_dir=tmp_path)
    assert cfg.data.train_path == str((tmp_path / "train.csv").resolve())
    issues = collect_issues(cfg)
    assert {i.context for i in issues if i.code == "DATA_FILE"} == {"data.train_path", "data.test_path"}


def test_seed_override(write_config, small_regression_config):
    cfg = load_config(write_config(small_regression_config), seed=42)
    assert cfg.train.seed == 42


def test_data_from_dict_rejects_unknown_keys():
    assert data_from_dict({"source": "hetero", "n_outputs": 2, "sigma": [1, 1]}).hetero.n_outputs == 2
    with pytest.raises(ConfigValidationError):
        data_from_dict({"source": "imbalance", "sigma": [1.0]})


def test_o_mode_enum_values():
    assert {m.value for m in OMode} == {"off", "gradient", "assignment", "smoothed"}


GRID_CONFIGS = sorted(
    [p.relative_to(CONFIGS).as_posix() for p in CONFIGS.glob("*grid.json")]
    + [p.relative_to(CONFIGS).as_posix() for p in (CONFIGS / "sweeps").glob("*.json")]
)


def test_grid_config_set_covers_regularizer_and_imbalance_sweeps():
    assert {"hetero_grid.json", "hetero_dropout_grid.json", "imbalance_grid.json"} <= set(GRID_CONFIGS)
    retain = {n for n in GRID_CONFIGS if n.startswith("sweeps/imbalance_retain")}
    classes = {n for n in GRID_CONFIGS if n.startswith("sweeps/classes")}
    assert len(retain) == 5 and len(classes) == 6


@pytest.mark.parametrize("name", GRID_CONFIGS)
def test_shipped_grid_configs_expand_to_valid_runs(name):
    raw = json.loads((CONFIGS / name).read_text(encoding="utf-8"))
    runs = expand_grid(raw)
    assert len({r["label"] for r in runs}) == len(runs) >= 2
    for run in runs:
        cfg = from_dict(run)
        assert errors_only(collect_issues(cfg, check_files=False)) == []
        if cfg.task == Task.CLASSIFICATION:
            assert cfg.train.o_floor == 0.01
            imbalanced = min(cfg.data.imbalance.retention) < 1.0
            assert (cfg.train.class_loss == ClassLoss.TOTAL) == imbalanced


def test_sweep_configs_set_retention_and_class_count():
    raw = json.loads((CONFIGS / "sweeps" / "imbalance_retain02.json").read_text(encoding="utf-8"))
    spec = from_dict(expand_grid(raw)[0]).data.imbalance
    assert spec.train_counts()[3] == 10
    assert [n for i, n in enumerate(spec.train_counts()) if i != 3] == [500] * 9
    raw = json.loads((CONFIGS / "sweeps" / "classes100.json").read_text(encoding="utf-8"))
    runs = expand_grid(raw)
    spec = from_dict(runs[0]).data.imbalance
    assert spec.n_classes == 100 and set(spec.train_counts()) == {200}
    assert {r["label"].rsplit("-seed=", 1)[0] for r in runs} == {"plain", "dropout", "wrapped", "wrapped-dropout"}


def test_class_loss_round_trips_and_is_checked(small_imbalance_config, small_regression_config):
    raw = copy.deepcopy(small_imbalance_config)
    raw["train"]["class_loss"] = "total"
    cfg = from_dict(raw)
    assert cfg.train.class_loss == ClassLoss.TOTAL
    assert to_dict(cfg)["train"]["class_loss"] == "total"
    assert from_dict(to_dict(cfg)).train.class_loss == ClassLoss.TOTAL

    bad = copy.deepcopy(small_regression_config)
    bad["train"]["class_loss"] = "total"
    issues = collect_issues(from_dict(bad), check_files=False)
    assert "TRAIN_CLASS_LOSS" in {i.code for i in issues}

    bad["train"]["class_loss"] = "sum"
    with pytest.raises(ConfigValidationError) as exc:
        from_dict(bad)
    assert ("CFG_ENUM", "train.class_loss") in _codes(exc)
