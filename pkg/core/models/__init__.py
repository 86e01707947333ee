"""Frozen value models used by the pure calculation layer."""
