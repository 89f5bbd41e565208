"""
Phase spaces: the unit interval and the circle, both realized on [0, 1).

The interval carries the metric |x - y|, the circle the arc metric
min(|x - y|, 1 - |x - y|).
"""

from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np

from src.errors import ConfigurationError

ArrayLike = Union[float, np.ndarray]

# Largest double below 1; clamped interval maps send overshoot here.
UPPER_POINT = float(np.nextafter(1.0, 0.0))


class SpaceKind(str, Enum):
    """Topology of the phase space."""

    INTERVAL = "interval"
    CIRCLE = "circle"


@dataclass(frozen=True)
class PhaseSpace:
    """Compact one-dimensional phase space with its metric."""

    kind: SpaceKind = SpaceKind.INTERVAL

    @classmethod
    def interval(cls) -> "PhaseSpace":
        return cls(SpaceKind.INTERVAL)

    @classmethod
    def circle(cls) -> "PhaseSpace":
        return cls(SpaceKind.CIRCLE)

    @classmethod
    def parse(cls, name: str) -> "PhaseSpace":
        """Build a phase space from its config name ('interval' or 'circle')."""
        try:
            return cls(SpaceKind(name.strip().lower()))
        except ValueError as e:
            raise ConfigurationError(f"Unknown phase space: {name!r}. Must be one of: interval, circle") from e

    @property
    def is_circle(self) -> bool:
        return self.kind is SpaceKind.CIRCLE

    @property
    def diameter(self) -> float:
        """Largest possible distance between two points."""
        return 0.5 if self.is_circle else 1.0

    def distance(self, x: ArrayLike, y: ArrayLike) -> ArrayLike:
        """Metric rho(x, y), vectorized over numpy arrays."""
        d = np.abs(np.asarray(x, dtype=float) - np.asarray(y, dtype=float))
        if self.is_circle:
            d = np.mod(d, 1.0)
            d = np.minimum(d, 1.0 - d)
        return d if isinstance(d, np.ndarray) and d.ndim else float(d)

    def normalize(self, x: ArrayLike) -> ArrayLike:
        """
        Bring raw map values back into [0, 1).

        Circle values are reduced mod 1; interval values are clamped to
        [0, UPPER_POINT] so the space stays invariant.
        """
        arr = np.asarray(x, dtype=float)
        if self.is_circle:
            out = np.mod(arr, 1.0)
            # np.mod(-1e-18, 1.0) rounds to 1.0
            out = np.where(out >= 1.0, 0.0, out)
        else:
            out = np.clip(arr, 0.0, UPPER_POINT)
        return out if out.ndim else float(out)

    def canonical_support(self, x: np.ndarray) -> np.ndarray:
        """
        Canonical atom positions for measures.

        Circle atoms are reduced mod 1; interval atoms may sit anywhere in the
        closed interval [0, 1] (the compact space K), so only out-of-range
        values are rejected.
        """
        arr = np.asarray(x, dtype=float)
        if self.is_circle:
            return np.asarray(self.normalize(arr), dtype=float).reshape(arr.shape)
        if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
            raise ConfigurationError("Interval support points must lie in [0, 1]")
        return arr

    def __str__(self) -> str:
        return self.kind.value
