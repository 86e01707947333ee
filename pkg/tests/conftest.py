# -*- coding: utf-8 -*-

"""Pytest configuration.

The repo is a plain folder layout (packages at the root, not installed).
For local testing we add the repository root to sys.path so that imports
like `from core...` work reliably.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import pytest


ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), ".."))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

CONFIGS = Path(ROOT) / "configs"


@pytest.fixture
def small_regression_config() -> dict:
    """A tiny but complete regression experiment (a few hundred samples, 3 epochs)."""
    return {
        "label": "small",
        "task": "regression",
        "data": {"source": "hetero", "n_features": 4, "n_outputs": 3, "sigma": [0.1, 0.5, 1.0],
                 "n_train": 120, "n_test": 60, "seed": 11},
        "network": {"hidden": [6]},
        "train": {"epochs": 3, "lr": 0.05, "batch_size": 16, "o_mode": "assignment", "seed": 5,
                  "log_every": 1},
        "metrics": ["rmse"],
    }


@pytest.fixture
def small_imbalance_config() -> dict:
    return {
        "label": "small-imb",
        "task": "classification",
        "data": {"source": "imbalance", "n_classes": 3, "n_features": 4, "base_per_class": 40,
                 "retention": [1.0, 0.25, 1.0], "test_per_class": 20, "seed": 2},
        "network": {"hidden": [8]},
        "train": {"epochs": 3, "lr": 0.05, "batch_size": 16, "o_mode": "assignment", "seed": 1},
        "metrics": ["accuracy", "per_class_accuracy"],
    }


@pytest.fixture
def write_config(tmp_path: Path):
    """Dump a config dict to tmp_path and return the file path."""

    def _write(cfg: dict, name: str = "cfg.json") -> Path:
        p = tmp_path / name
        p.write_text(json.dumps(cfg), encoding="utf-8")
        return p

    return _write
