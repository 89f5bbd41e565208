"""Visit frequencies of orbits to a set."""

from dataclasses import dataclass
from typing import Any, Callable, Dict, Union

import numpy as np

from src.birkhoff.batch import window_length
from src.config import DEFAULTS
from src.errors import ConfigurationError
from src.systems.orbits import OrbitSegment
from src.systems.phase_space import ArrayLike


@dataclass(frozen=True)
class VisitStats:
    """
    Fraction of orbit times spent in a set.

    Attributes:
        inside_count: orbit points in the set
        total_count: orbit length
        frequency: inside_count / total_count
        tail_lower_proxy: min running frequency over the trailing window (liminf stand-in)
        tail_upper_proxy: max running frequency over the trailing window
        window: trailing window fraction
    """

    inside_count: int
    total_count: int
    frequency: float
    tail_lower_proxy: float
    tail_upper_proxy: float
    window: float

    def row(self) -> Dict[str, Any]:
        return {
            "horizon": self.total_count,
            "frequency": self.frequency,
            "lower": self.tail_lower_proxy,
            "upper": self.tail_upper_proxy,
        }


def visit_frequency(
    orbit: Union[OrbitSegment, ArrayLike],
    membership: Callable[[np.ndarray], ArrayLike],
    w: float = DEFAULTS.window,
) -> VisitStats:
    """
    Visit statistics of an orbit to {x : membership(x)}.

    Args:
        orbit: orbit segment (or raw array of points)
        membership: vectorized predicate
        w: trailing window fraction in (0, 1/2]
    """
    points = orbit.points if isinstance(orbit, OrbitSegment) else np.atleast_1d(np.asarray(orbit, dtype=float))
    if points.size == 0:
        raise ConfigurationError("Visit frequency of an empty orbit is undefined")
    if not 0.0 < w <= 0.5:
        raise ConfigurationError(f"Window fraction must lie in (0, 1/2], got {w}")

    inside = np.asarray(membership(points), dtype=bool).reshape(points.shape)
    running = np.cumsum(inside) / np.arange(1, points.size + 1)
    tail = running[-window_length(points.size, w) :]
    count = int(inside.sum())
    return VisitStats(
        inside_count=count,
        total_count=int(points.size),
        frequency=count / points.size,
        tail_lower_proxy=float(tail.min()),
        tail_upper_proxy=float(tail.max()),
        window=w,
    )
