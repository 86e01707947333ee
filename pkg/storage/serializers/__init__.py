# -*- coding: utf-8 -*-
"""Serializers package."""
