"""
Pytest configuration and fixtures for testing.
"""

import os
from typing import Generator

import numpy as np
import pytest

from src.systems.maps import MapSpec
from src.systems.phase_space import PhaseSpace

GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@pytest.fixture(autouse=True)
def clean_env(monkeypatch) -> Generator:
    """
    Clean environment variables before each test.

    This prevents tests from being affected by actual environment variables.
    """
    original_env = dict(os.environ)

    for var in list(os.environ):
        if var.startswith("LAB_"):
            monkeypatch.delenv(var, raising=False)

    yield

    os.environ.clear()
    os.environ.update(original_env)


@pytest.fixture(autouse=True)
def reset_settings(monkeypatch):
    """Drop the cached settings so each test reads its own environment."""
    monkeypatch.setattr("src.config._settings", None)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def interval() -> PhaseSpace:
    return PhaseSpace.interval()


@pytest.fixture
def circle() -> PhaseSpace:
    return PhaseSpace.circle()


@pytest.fixture
def doubling() -> MapSpec:
    return MapSpec.doubling()


@pytest.fixture
def half_rotation() -> MapSpec:
    return MapSpec.rotation(0.5)


@pytest.fixture
def golden_rotation() -> MapSpec:
    return MapSpec.rotation(GOLDEN)


@pytest.fixture
def identity() -> MapSpec:
    return MapSpec.identity()
