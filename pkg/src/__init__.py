"""Invariant-measure stability laboratory for interval and circle maps."""

__version__ = "1.0.0"
