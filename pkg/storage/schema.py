# -*- coding: utf-8 -*-
"""storage/schema.py

Schema/version constants for on-disk artifacts.
"""

# Bump when the layout of summary.json / model.json / comparison.json changes.
ARTIFACT_VERSION = 1

METRICS_COLUMNS = ("epoch", "wrapped_loss", "original_loss", "eval_metric", "o_min", "o_max", "o_mean")

COMPARISON_COLUMNS = (
    "label",
    "status",
    "metric",
    "best_metric",
    "epoch_of_best",
    "epochs_run",
    "o_min",
    "o_max",
    "o_mean",
    "adj_accuracy",
    "total_accuracy",
    "error",
)

METRICS_FILE = "metrics.csv"
SUMMARY_FILE = "summary.json"
MODEL_FILE = "model.json"
TIMINGS_FILE = "timings.json"
COMPARISON_CSV = "comparison.csv"
COMPARISON_JSON = "comparison.json"
