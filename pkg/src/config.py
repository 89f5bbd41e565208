"""
Configuration management for the laboratory.

This module loads runtime settings (logging, output location, seed, thread
count) from environment variables and `.env` files, and collects the numeric
defaults shared by the experiment drivers.
"""

import os
import logging
from dataclasses import dataclass
from typing import Optional

from dotenv import load_dotenv

from src.errors import ConfigurationError

logger = logging.getLogger(__name__)

_TRUTHY = ("true", "1", "yes")


def _env_flag(name: str, default: str = "false") -> bool:
    return os.getenv(name, default).lower() in _TRUTHY


@dataclass(frozen=True)
class ExperimentDefaults:
    """Documented numeric defaults of the experiment drivers."""

    # Birkhoff / search
    alpha: float = 0.25
    window: float = 0.25
    horizon: int = 100_000
    candidates: int = 512
    max_period: int = 4
    cycle_tol: float = 1e-9

    # Ulam
    samples_per_cell: int = 64
    edge_threshold: float = 1e-13
    direct_solve_limit: int = 2048
    power_iterations: int = 100_000
    power_tolerance: float = 1e-12

    # Measures
    merge_tol: float = 1e-14
    lp_tol: float = 1e-10
    dedup_tol: float = 1e-10
    trig_modes: int = 8
    hinge_centers: int = 16

    # Maps
    c0_grid: int = 4096


DEFAULTS = ExperimentDefaults()


@dataclass
class LabSettings:
    """Runtime settings of the laboratory."""

    # Logging
    log_level: str = "INFO"
    log_format: str = "text"  # json or text
    log_file: Optional[str] = None

    # Outputs
    out_dir: str = "results"
    timestamps: bool = False

    # Reproducibility and parallelism
    seed: int = 0
    threads: int = 1

    @classmethod
    def from_env(cls) -> "LabSettings":
        """Load settings from environment variables (and a `.env` file if present)."""
        load_dotenv()

        try:
            seed = int(os.getenv("LAB_SEED", "0"))
            threads = int(os.getenv("LAB_THREADS", "1"))
        except ValueError as e:
            raise ConfigurationError(f"LAB_SEED and LAB_THREADS must be integers: {e}") from e

        return cls(
            log_level=os.getenv("LAB_LOG_LEVEL", "INFO"),
            log_format=os.getenv("LAB_LOG_FORMAT", "text"),
            log_file=os.getenv("LAB_LOG_FILE"),
            out_dir=os.getenv("LAB_OUT_DIR", "results"),
            timestamps=_env_flag("LAB_TIMESTAMPS"),
            seed=seed,
            threads=threads,
        )

    def validate(self) -> None:
        """Validate settings and raise ConfigurationError for invalid values."""
        if self.threads < 1:
            raise ConfigurationError(f"Invalid thread count: {self.threads}. Must be >= 1")

        if self.seed < 0:
            raise ConfigurationError(f"Invalid seed: {self.seed}. Must be >= 0")

        if self.log_format not in ("json", "text"):
            raise ConfigurationError(f"Invalid log format: {self.log_format}. Must be one of: json, text")

        if self.log_level.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            logger.warning(f"Unknown log level {self.log_level!r}, falling back to INFO")


# Global settings instance
_settings: Optional[LabSettings] = None


def get_settings() -> LabSettings:
    """Get the global settings instance, loading it if necessary."""
    global _settings
    if _settings is None:
        _settings = LabSettings.from_env()
        _settings.validate()
    return _settings


def reload_settings() -> LabSettings:
    """Reload settings from the environment (useful for testing)."""
    global _settings
    _settings = None
    return get_settings()
