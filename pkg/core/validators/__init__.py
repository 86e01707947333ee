# -*- coding: utf-8 -*-
"""Validation pipeline (pure).

Each module exports validate_<section>(cfg) -> List[Issue].
"""
