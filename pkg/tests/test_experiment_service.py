# -*- coding: utf-8 -*-
"""End-to-end single runs: artifacts on disk and byte-identical reruns."""

from __future__ import annotations

import copy
import json
import math

import numpy as np
import pytest

from core.calculations.losses import median_frequency_weights
from core.errors import DatasetIOError
from core.models.data import HeteroSpec
from domain.datagen import gen_heteroscedastic_regression
from services.experiment_service import load_config, run_experiment, run_experiment_file
from storage.artifacts import load_model, read_metrics_csv
from storage.dataset_csv import write_csv_dataset
from storage.schema import METRICS_COLUMNS


def test_run_writes_all_artifacts(tmp_path, write_config, small_regression_config):
    result = run_experiment_file(write_config(small_regression_config), out_dir=tmp_path / "out")
    run_dir = tmp_path / "out" / "small"
    assert result.run_dir == run_dir
    for name in ("metrics.csv", "summary.json", "model.json", "timings.json"):
        assert (run_dir / name).is_file()

    header = (run_dir / "metrics.csv").read_text(encoding="utf-8").splitlines()[0]
    assert header.split(",") == list(METRICS_COLUMNS)
    rows = read_metrics_csv(run_dir / "metrics.csv")
    assert [int(r["epoch"]) for r in rows] == [1, 2, 3]

    summary = json.loads((run_dir / "summary.json").read_text(encoding="utf-8"))
    assert summary["label"] == "small"
    assert summary["metric"] == "rmse"
    assert 1 <= summary["epoch_of_best"] <= summary["epochs_run"] == 3
    assert summary["best_metric"] == min(r["eval_metric"] for r in rows)
    assert len(summary["final_o"]) == 3
    assert len(summary["test_sigma_sq"]) == 3
    assert math.isfinite(summary["expected_wrap_estimate"])
    assert summary["config"]["label"] == "small"
    assert "train_s" in json.loads((run_dir / "timings.json").read_text(encoding="utf-8"))


def test_reruns_are_byte_identical(tmp_path, write_config, small_regression_config):
    path = write_config(small_regression_config)
    run_experiment_file(path, out_dir=tmp_path / "a")
    run_experiment_file(path, out_dir=tmp_path / "b")
    for name in ("metrics.csv", "summary.json", "model.json"):
        assert (tmp_path / "a" / "small" / name).read_bytes() == (tmp_path / "b" / "small" / name).read_bytes()


def test_seed_changes_the_trajectory(tmp_path, write_config, small_regression_config):
    path = write_config(small_regression_config)
    run_experiment_file(path, seed=1, out_dir=tmp_path / "a")
    run_experiment_file(path, seed=2, out_dir=tmp_path / "b")
    a = (tmp_path / "a" / "small" / "metrics.csv").read_bytes()
    b = (tmp_path / "b" / "small" / "metrics.csv").read_bytes()
    assert a != b


def test_model_snapshot_reloads(tmp_path, write_config, small_regression_config):
    result = run_experiment_file(write_config(small_regression_config), out_dir=tmp_path)
    net, o = load_model(tmp_path / "small" / "model.json")
    assert net.arch == result.network.arch
    assert np.array_equal(o.o, result.o.o)
    for a, b in zip(net.layers, result.network.layers):
        assert np.array_equal(a.weight, b.weight)


def test_output_root_from_environment(tmp_path, monkeypatch, write_config, small_regression_config):
    monkeypatch.setenv("WRAPLOSS_OUT", str(tmp_path / "env"))
    run_experiment_file(write_config(small_regression_config))
    assert (tmp_path / "env" / "small" / "metrics.csv").is_file()


def test_classification_summary_has_per_class_accuracy(tmp_path, write_config, small_imbalance_config):
    result = run_experiment_file(write_config(small_imbalance_config), out_dir=tmp_path)
    s = result.summary
    assert s["metric"] == "accuracy"
    assert len(s["best_per_class_accuracy"]) == 3
    assert len(s["final_metrics"]["per_class_accuracy"]) == 3
    assert "expected_wrap_estimate" not in s


def test_median_frequency_baseline_uses_train_counts(tmp_path, write_config, small_imbalance_config):
    raw = copy.deepcopy(small_imbalance_config)
    raw["train"]["o_mode"] = "off"
    raw["train"]["static_weights"] = "median_frequency"
    result = run_experiment_file(write_config(raw), out_dir=tmp_path)
    # train counts are (40, 10, 40)
    expected = median_frequency_weights([40, 10, 40])
    assert np.allclose(result.summary["static_weights"], expected, rtol=0, atol=0)
    assert np.array_equal(result.o.o, expected)


def test_csv_source_run(tmp_path):
    train, test = gen_heteroscedastic_regression(HeteroSpec(n_features=3, n_outputs=2, sigma=(0.2, 1.0),
                                                            n_train=60, n_test=20, seed=1))
    write_csv_dataset(train, tmp_path / "train.csv")
    write_csv_dataset(test, tmp_path / "test.csv")
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({
        "label": "from-csv",
        "task": "regression",
        "data": {"source": "csv", "train_path": "train.csv", "test_path": "test.csv",
                 "schema": {"target_columns": ["y0", "y1"]}},
        "network": {"hidden": [4]},
        "train": {"epochs": 2, "batch_size": 10},
    }), encoding="utf-8")
    result = run_experiment(load_config(cfg_path), out_dir=tmp_path / "out")
    assert result.summary["epochs_run"] == 2
    assert result.network.arch == (3, 4, 2)


def test_missing_config_is_io_error(tmp_path):
    with pytest.raises(DatasetIOError):
        run_experiment_file(tmp_path / "missing.json")
