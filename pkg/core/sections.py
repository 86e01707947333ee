# -*- coding: utf-8 -*-
"""Config section keys (single source of truth).

Used by the validation pipeline to run one validator per section and to
group the issues it reports.
"""

from __future__ import annotations

from enum import Enum


class Section(str, Enum):
    EXPERIMENT = "experiment"
    DATA = "data"
    NETWORK = "network"
    TRAIN = "train"
    METRICS = "metrics"
