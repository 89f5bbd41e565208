"""Tests for the invariant-measure laboratory."""
