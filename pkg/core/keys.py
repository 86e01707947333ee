# -*- coding: utf-8 -*-
"""Single source of truth for experiment-config keys.

These are the keys accepted in the JSON experiment files. Keep them stable;
the parser rejects anything not listed here so a typo can never silently
change an experiment.
"""

from __future__ import annotations

from typing import FrozenSet


class ConfigKeys:
    # top level
    LABEL = "label"
    TASK = "task"
    DATA = "data"
    NETWORK = "network"
    TRAIN = "train"
    METRICS = "metrics"
    OUTPUT_DIR = "output_dir"

    # data
    SOURCE = "source"
    STANDARDIZE = "standardize"
    TRAIN_PATH = "train_path"
    TEST_PATH = "test_path"
    SCHEMA = "schema"

    # network
    HIDDEN = "hidden"
    ACTIVATION = "activation"
    DROPOUT = "dropout"
    INIT_SEED = "init_seed"

    # train
    EPOCHS = "epochs"
    LR = "lr"
    BATCH_SIZE = "batch_size"
    OPTIMIZER = "optimizer"
    O_MODE = "o_mode"
    CLASS_LOSS = "class_loss"
    BETA = "beta"
    O_LR = "o_lr"
    STATIC_WEIGHTS = "static_weights"
    O_FLOOR = "o_floor"
    TOL = "tol"
    PATIENCE = "patience"
    SEED = "seed"
    LOG_EVERY = "log_every"

    # grid (compare)
    BASE = "base"
    GRID = "grid"
    RUNS = "runs"
    OVERRIDES = "overrides"
    ADJUSTED_CLASS = "adjusted_class"


K = ConfigKeys

TOP_LEVEL_KEYS: FrozenSet[str] = frozenset(
    {K.LABEL, K.TASK, K.DATA, K.NETWORK, K.TRAIN, K.METRICS, K.OUTPUT_DIR}
)

HETERO_KEYS: FrozenSet[str] = frozenset(
    {K.SOURCE, K.STANDARDIZE, "n_features", "n_outputs", "map_kind", "sigma",
     "n_train", "n_test", "mixture_units", "seed"}
)

IMBALANCE_KEYS: FrozenSet[str] = frozenset(
    {K.SOURCE, K.STANDARDIZE, "n_classes", "n_features", "base_per_class",
     "retention", "test_per_class", "spread", "separation", "seed"}
)

CSV_KEYS: FrozenSet[str] = frozenset(
    {K.SOURCE, K.STANDARDIZE, K.TRAIN_PATH, K.TEST_PATH, K.SCHEMA}
)

CSV_SCHEMA_KEYS: FrozenSet[str] = frozenset(
    {"target_columns", "label_column", "feature_columns", "delimiter", "header", "n_classes"}
)

NETWORK_KEYS: FrozenSet[str] = frozenset({K.HIDDEN, K.ACTIVATION, K.DROPOUT, K.INIT_SEED})

TRAIN_KEYS: FrozenSet[str] = frozenset(
    {K.EPOCHS, K.LR, K.BATCH_SIZE, K.OPTIMIZER, K.O_MODE, K.CLASS_LOSS, K.BETA, K.O_LR,
     K.STATIC_WEIGHTS, K.O_FLOOR, K.TOL, K.PATIENCE, K.SEED, K.LOG_EVERY}
)

GRID_KEYS: FrozenSet[str] = frozenset({K.BASE, K.GRID, K.RUNS, K.ADJUSTED_CLASS, K.OUTPUT_DIR})

# static_weights may name a rule instead of listing numbers
MEDIAN_FREQUENCY = "median_frequency"
