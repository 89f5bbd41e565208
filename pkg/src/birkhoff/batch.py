"""
Streaming Birkhoff statistics for many starting points at once.

Orbits are never stored: every step evaluates the observables on the current
vector of points and updates running sums, the running averages, and the
min/max of those averages over the trailing window. The candidate searches
run thousands of orbits of length 10^5 this way.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from src.config import DEFAULTS
from src.errors import ConfigurationError, UnsupportedOperationError
from src.systems.maps import MapSpec
from src.systems.orbits import iterate
from src.systems.phase_space import ArrayLike

logger = logging.getLogger(__name__)

Observable = Callable[[np.ndarray], ArrayLike]


@dataclass(frozen=True, eq=False)
class BatchStatistics:
    """
    Per-observable, per-start Cesaro statistics.

    Arrays are indexed [observable, start].

    Attributes:
        starts: starting points (normalized)
        final: running average at the horizon
        lower: min of the running averages over the trailing window
        upper: max of the running averages over the trailing window
        horizon: n
        window: trailing window fraction w
        two_sided: averages over k = -m..m instead of k = 0..m-1
        running: full running-average history, only when recorded
    """

    starts: np.ndarray
    final: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    horizon: int
    window: float
    two_sided: bool
    running: Optional[np.ndarray] = None

    @property
    def spread(self) -> np.ndarray:
        return self.upper - self.lower


def window_length(count: int, window: float) -> int:
    """Number of trailing running averages used by the proxies: ceil(w * count), at least 1."""
    return max(1, math.ceil(window * count))


def check_window(n: int, window: float, min_horizon: int = 1) -> None:
    if n < min_horizon:
        raise ConfigurationError(f"Horizon must be >= {min_horizon}, got {n}")
    if not 0.0 < window <= 0.5:
        raise ConfigurationError(f"Window fraction must lie in (0, 1/2], got {window}")


def _evaluate(observables: Sequence[Observable], x: np.ndarray) -> np.ndarray:
    return np.vstack([np.broadcast_to(np.asarray(f(x), dtype=float), x.shape) for f in observables])


def batch_orbit_statistics(
    spec: MapSpec,
    starts: ArrayLike,
    n: int,
    observables: Sequence[Observable],
    window: float = DEFAULTS.window,
    two_sided: bool = False,
    cycle_tol: Optional[float] = None,
    record: bool = False,
) -> BatchStatistics:
    """
    Cesaro statistics of several observables along the orbits of many points.

    One-sided averages use a_m = (1/m) sum_{k<m} f(T^k x), m = 1..n. Two-sided
    averages use a_m = (1/(2m+1)) sum_{|k|<=m} f(T^k x), m = 0..n, iterating
    T^{-1} backwards.

    Args:
        spec: the map
        starts: starting points
        n: horizon
        observables: functions evaluated on vectors of points
        window: trailing window fraction for the proxies
        two_sided: use two-sided averages (map must be invertible)
        cycle_tol: close periodic cycles within this distance (see `iterate`)
        record: keep the full running-average history (memory n * starts * observables)

    Raises:
        ConfigurationError: bad horizon, window or empty observable list
        UnsupportedOperationError: two-sided statistics of a non-invertible map
    """
    check_window(n, window)
    if not observables:
        raise ConfigurationError("At least one observable is required")
    if two_sided and not spec.inverse_available:
        raise UnsupportedOperationError(
            f"Two-sided averages need an invertible map; {spec.label} is not",
            {"map": spec.label},
        )

    x0 = np.atleast_1d(np.asarray(spec.space.normalize(np.asarray(starts, dtype=float)), dtype=float))
    shape = (len(observables), x0.size)
    count = n + 1 if two_sided else n
    tail_start = count - window_length(count, window)

    sums = np.zeros(shape)
    lower = np.full(shape, np.inf)
    upper = np.full(shape, -np.inf)
    history = np.empty((count,) + shape) if record else None
    averages = sums

    forward = iterate(spec, x0, count, cycle_tol)
    backward = iterate(spec, x0, count, cycle_tol, inverse=True) if two_sided else None

    for step, x in enumerate(forward):
        sums += _evaluate(observables, x)
        if backward is not None:
            y = next(backward)
            if step > 0:
                sums += _evaluate(observables, y)
            averages = sums / (2 * step + 1)
        else:
            averages = sums / (step + 1)

        if history is not None:
            history[step] = averages
        if step >= tail_start:
            np.minimum(lower, averages, out=lower)
            np.maximum(upper, averages, out=upper)

    logger.debug(
        "Batch orbit statistics",
        extra={"map": spec.label, "starts": int(x0.size), "horizon": n, "two_sided": two_sided},
    )
    return BatchStatistics(x0, averages.copy(), lower, upper, n, window, two_sided, history)
