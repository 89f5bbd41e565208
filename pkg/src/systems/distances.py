"""
C0 distances between maps, estimated as a sup over a uniform grid.

The grid {i / grid_n} is nested for grid sizes that divide each other, so the
estimate is nondecreasing along such refinements.
"""

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from src.config import DEFAULTS
from src.errors import ConfigurationError
from src.systems.maps import MapSpec

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class C0DistancePair:
    """Forward and inverse C0 distances; `inverse` is None unless both maps are invertible."""

    forward: float
    inverse: Optional[float] = None

    def within(self, delta: float) -> bool:
        """Both bounds d(S, T) < delta and d(S^-1, T^-1) < delta (the latter when defined)."""
        return self.forward < delta and (self.inverse is None or self.inverse < delta)

    def as_tuple(self) -> Tuple[float, Optional[float]]:
        return self.forward, self.inverse


def _check(a: MapSpec, b: MapSpec, grid_n: int) -> np.ndarray:
    if grid_n < 2:
        raise ConfigurationError(f"C0 grid needs at least 2 points, got {grid_n}")
    if a.space != b.space:
        raise ConfigurationError(
            f"Cannot compare maps on different phase spaces ({a.space} vs {b.space})",
            {"a": a.label, "b": b.label},
        )
    return np.arange(grid_n, dtype=float) / grid_n


def c0_distance_estimate(a: MapSpec, b: MapSpec, grid_n: int = DEFAULTS.c0_grid) -> float:
    """
    Estimate sup_x rho(a(x), b(x)) on the grid {i / grid_n}.

    Args:
        a: first map
        b: second map (same phase space)
        grid_n: number of grid points (>= 2)

    Returns:
        The grid sup-distance
    """
    x = _check(a, b, grid_n)
    return float(np.max(a.space.distance(a.evaluate(x), b.evaluate(x))))


def c0_distance_pair(a: MapSpec, b: MapSpec, grid_n: int = DEFAULTS.c0_grid) -> C0DistancePair:
    """Forward C0 distance plus the inverse C0 distance when both maps are invertible."""
    x = _check(a, b, grid_n)
    forward = float(np.max(a.space.distance(a.evaluate(x), b.evaluate(x))))
    inverse = None
    if a.inverse_available and b.inverse_available:
        inverse = float(np.max(a.space.distance(a.evaluate_inverse(x), b.evaluate_inverse(x))))
    logger.debug("C0 distances estimated", extra={"a": a.label, "b": b.label, "forward": forward, "inverse": inverse})
    return C0DistancePair(forward, inverse)
