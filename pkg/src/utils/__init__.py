"""Utility modules for logging, parallel execution and number formatting."""

from src.utils.formatting import format_float
from src.utils.logging_config import setup_logging
from src.utils.parallel import parallel_map

__all__ = ["setup_logging", "parallel_map", "format_float"]
