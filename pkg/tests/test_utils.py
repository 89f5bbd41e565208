"""
Tests for float formatting and the thread fan-out.
"""

import threading

import numpy as np

from src.utils import format_float, parallel_map


class TestFormatFloat:
    """Test the result-file number format."""

    def test_round_trips(self):
        """Test that formatted floats parse back to the same double."""
        for value in (0.1, 1 / 3, 2.0 ** -40, np.float64(0.99)):
            assert float(format_float(value)) == value

    def test_seventeen_digits(self):
        """Test the fixed significant-digit count."""
        assert format_float(0.1) == "0.10000000000000001"
        assert format_float(0.5) == "0.5"

    def test_non_floats(self):
        """Test booleans, integers, strings and missing values."""
        assert format_float(True) == "true"
        assert format_float(None) == "none"
        assert format_float(7) == "7"
        assert format_float("") == ""


class TestParallelMap:
    """Test order-preserving fan-out."""

    def test_inline(self):
        """Test that one thread runs the tasks in the caller's thread."""
        names = parallel_map(lambda _: threading.current_thread().name, range(3))

        assert set(names) == {threading.current_thread().name}

    def test_order_preserved(self):
        """Test that results come back in input order on a pool."""
        assert parallel_map(lambda x: x * x, range(20), threads=4) == [x * x for x in range(20)]

    def test_empty(self):
        """Test that no items give no results."""
        assert parallel_map(lambda x: x, [], threads=4) == []
