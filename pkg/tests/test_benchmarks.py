# -*- coding: utf-8 -*-
"""Desk-scale benchmarks.

The reduction identity runs with the default suite. The two training
benchmarks take minutes of CPU and are marked ``slow``:

    pytest -m slow
"""

from __future__ import annotations

import json
from statistics import mean

import numpy as np
import pytest

from conftest import CONFIGS
from core.calculations.losses import (
    median_frequency_weights,
    per_class_cross_entropy,
    per_output_squared_error,
    wrapped_total,
)
from core.calculations.nn import forward, init_network
from core.models.nn import Head
from services.compare_service import compare_files

SEEDS = (1, 2, 3, 4, 5)


def test_unit_weights_reduce_to_original_loss_on_random_instances():
    rng = np.random.default_rng(2024)
    for k in range(1000):
        p, c = int(rng.integers(1, 6)), int(rng.integers(1, 6))
        hidden = [int(h) for h in rng.integers(1, 8, size=rng.integers(0, 3))]
        n = int(rng.integers(1, 12))
        X = rng.normal(size=(n, p))
        if k % 2:
            net = init_network([p, *hidden, c], seed=k)
            out, _ = forward(net, X)
            losses = per_output_squared_error(rng.normal(scale=3.0, size=(n, c)), out)
        else:
            c = max(c, 2)
            net = init_network([p, *hidden, c], head=Head.SOFTMAX, seed=k)
            out, _ = forward(net, X)
            losses = per_class_cross_entropy(rng.integers(0, c, size=n), out)
        rep = wrapped_total(np.ones(losses.size), losses)
        assert rep.wrapped_total == pytest.approx(rep.original_total, rel=1e-12, abs=1e-300)


def _by_variant(report, prefix_of):
    out = {}
    for row in report.rows:
        assert row.ok, row.error
        out.setdefault(prefix_of(row.label), []).append(row)
    return out


@pytest.mark.slow
def test_heteroscedastic_regression_wrapped_vs_plain(tmp_path):
    report = compare_files([CONFIGS / "hetero_grid.json"], out_dir=tmp_path, jobs=4)
    groups = _by_variant(report, lambda label: label.split("-seed=")[0])
    plain = groups["hetero-o_mode=off"]
    wrapped = groups["hetero-o_mode=assignment"]
    assert len(plain) == len(wrapped) == len(SEEDS)

    rmse_plain = mean(r.best_metric for r in plain)
    rmse_wrapped = mean(r.best_metric for r in wrapped)
    assert rmse_wrapped <= rmse_plain * 1.02, (rmse_wrapped, rmse_plain)

    epochs_plain = mean(r.epoch_of_best for r in plain)
    epochs_wrapped = mean(r.epoch_of_best for r in wrapped)
    assert epochs_wrapped <= 0.5 * epochs_plain, (epochs_wrapped, epochs_plain)


@pytest.mark.slow
def test_imbalanced_classification_wrapped_vs_plain(tmp_path):
    report = compare_files([CONFIGS / "imbalance_grid.json"], out_dir=tmp_path, jobs=4)
    assert report.adjusted_class == 3
    groups = _by_variant(report, lambda label: label.rsplit("-seed=", 1)[0])
    plain, wrapped = groups["plain"], groups["wrapped"]

    assert mean(r.adj_accuracy for r in wrapped) >= mean(r.adj_accuracy for r in plain)
    assert mean(r.total_accuracy for r in wrapped) >= mean(r.total_accuracy for r in plain) - 0.005
    assert mean(r.epoch_of_best for r in wrapped) <= mean(r.epoch_of_best for r in plain)

    # 9 classes keep 500 samples, the adjusted one keeps 50
    counts = [500] * 10
    counts[3] = 50
    expected = median_frequency_weights(counts)
    assert np.allclose(expected, [1.0, 1.0, 1.0, 10.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0], rtol=1e-12)
    for seed in SEEDS:
        summary = json.loads((tmp_path / f"median-freq-seed={seed}" / "summary.json").read_text(encoding="utf-8"))
        assert summary["static_weights"] == expected.tolist()
