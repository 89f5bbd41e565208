"""
Orbits, orbit samples and periodic points.

Orbits are generated for many starting points at once. Binary floating point
cannot follow a repelling periodic orbit for more than a few dozen steps, so
iteration can optionally close cycles: once T^k(p) is back within `cycle_tol`
of p (k <= MAX_CYCLE_PERIOD) the first k points are repeated.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from pathlib import Path
from typing import Iterator, Optional, Union

import numpy as np
from scipy.optimize import brentq

from src.errors import ConfigurationError, UnsupportedOperationError
from src.systems.maps import MapSpec
from src.systems.phase_space import ArrayLike, PhaseSpace

logger = logging.getLogger(__name__)

MAX_CYCLE_PERIOD = 64


class OrbitDirection(str, Enum):
    """Which iterates an orbit segment holds."""

    FORWARD = "forward"
    TWO_SIDED = "two_sided"


class OrbitClosure:
    """
    Finite stand-in for the closure of an orbit.

    Keeps the sorted distinct sample points and answers nearest-distance
    queries by binary search (wrapping around on the circle).
    """

    def __init__(self, points: ArrayLike, space: PhaseSpace):
        pts = np.unique(np.asarray(points, dtype=float).ravel())
        if pts.size == 0:
            raise ConfigurationError("Orbit sample must not be empty")
        self.points = pts
        self.space = space

    def __len__(self) -> int:
        return int(self.points.size)

    def distance(self, x: ArrayLike) -> ArrayLike:
        """rho(x, sample), vectorized."""
        x_arr = np.asarray(x, dtype=float)
        flat = x_arr.ravel()
        pts = self.points
        idx = np.searchsorted(pts, flat)
        left = pts[np.clip(idx - 1, 0, pts.size - 1)]
        right = pts[np.clip(idx, 0, pts.size - 1)]
        d = np.minimum(self.space.distance(flat, left), self.space.distance(flat, right))
        if self.space.is_circle:
            d = np.minimum(d, np.minimum(self.space.distance(flat, pts[0]), self.space.distance(flat, pts[-1])))
        d = np.asarray(d).reshape(x_arr.shape)
        return d if d.ndim else float(d)

    @property
    def covering_radius(self) -> float:
        """Half the largest gap between consecutive sample points (including the wrap gap on the circle)."""
        pts = self.points
        gaps = np.diff(pts)
        if self.space.is_circle:
            gaps = np.append(gaps, 1.0 - pts[-1] + pts[0])
        else:
            # End gaps count twice: nothing covers [0, pts[0]) from the left.
            gaps = np.concatenate([gaps, [2.0 * pts[0], 2.0 * (1.0 - pts[-1])]])
        return float(gaps.max() / 2.0) if gaps.size else 0.5


@dataclass(frozen=True, eq=False)
class OrbitSegment:
    """
    A finite piece of an orbit.

    Attributes:
        points: consecutive iterates; for two-sided segments T^-n(p), ..., p, ..., T^n(p)
        base_point: the starting point p
        direction: forward or two_sided
        spec_id: label of the generating map
        space: phase space of the generating map
        base_index: position of p inside `points`
    """

    points: np.ndarray
    base_point: float
    direction: OrbitDirection
    spec_id: str
    space: PhaseSpace
    base_index: int = 0

    def __len__(self) -> int:
        return int(self.points.size)

    @cached_property
    def closure(self) -> OrbitClosure:
        return OrbitClosure(self.points, self.space)

    def is_consistent_with(self, spec: MapSpec, checks: int = 10, tol: float = 1e-12, seed: int = 0) -> bool:
        """Spot-check that consecutive points are related by the map."""
        if len(self) < 2:
            return True
        rng = np.random.default_rng(seed)
        idx = rng.integers(0, len(self) - 1, size=min(checks, len(self) - 1))
        images = np.asarray(spec.evaluate(self.points[idx]))
        return bool(np.all(self.space.distance(images, self.points[idx + 1]) <= tol))

    def write_text(self, path: Union[str, Path]) -> None:
        """Plain-text dump, one point per line."""
        Path(path).write_text("".join(f"{x!r}\n" for x in self.points.tolist()))


def iterate(
    spec: MapSpec,
    starts: ArrayLike,
    n: int,
    cycle_tol: Optional[float] = None,
    inverse: bool = False,
) -> Iterator[np.ndarray]:
    """
    Yield x_0, x_1, ..., x_{n-1} for every starting point simultaneously.

    Args:
        spec: the map
        starts: starting points
        n: number of iterates to yield (x_0 included)
        cycle_tol: close cycles returning within this distance (None disables)
        inverse: iterate T^{-1} instead of T
    """
    step = spec.evaluate_inverse if inverse else spec.evaluate
    space = spec.space
    x0 = np.atleast_1d(np.asarray(space.normalize(np.asarray(starts, dtype=float)), dtype=float))
    columns = np.arange(x0.size)
    history = np.empty((min(n, MAX_CYCLE_PERIOD), x0.size))
    period = np.zeros(x0.size, dtype=int)

    x = x0.copy()
    if n <= 0:
        return
    history[0] = x
    yield x

    for k in range(1, n):
        closed = period > 0
        if closed.all():
            x = history[k % period, columns]
        else:
            x = np.atleast_1d(np.asarray(step(x), dtype=float))
            if closed.any():
                x[closed] = history[k % period[closed], columns[closed]]

        if cycle_tol is not None and k < MAX_CYCLE_PERIOD:
            history[k] = x
            hit = ~closed & (np.asarray(space.distance(x, x0)) <= cycle_tol)
            if hit.any():
                period[hit] = k
                x[hit] = x0[hit]
        yield x


def orbit(
    spec: MapSpec,
    p: float,
    n: int,
    direction: OrbitDirection = OrbitDirection.FORWARD,
    cycle_tol: Optional[float] = None,
) -> OrbitSegment:
    """
    Compute an orbit segment of p.

    Forward segments hold [p, T(p), ..., T^{n-1}(p)]; two-sided segments hold
    [T^{-n}(p), ..., p, ..., T^{n}(p)] (length 2n + 1).

    Raises:
        UnsupportedOperationError: two-sided orbit of a non-invertible map
        ConfigurationError: non-positive length
    """
    direction = OrbitDirection(direction)
    if direction is OrbitDirection.TWO_SIDED:
        if not spec.inverse_available:
            raise UnsupportedOperationError(
                f"Two-sided orbit requested for non-invertible map {spec.label}",
                {"map": spec.label},
            )
        if n < 0:
            raise ConfigurationError(f"Orbit half-length must be >= 0, got {n}")
        forward = _collect(spec, p, n + 1, cycle_tol, inverse=False)
        backward = _collect(spec, p, n + 1, cycle_tol, inverse=True)
        points = np.concatenate([backward[:0:-1], forward])
        return OrbitSegment(points, float(forward[0]), direction, spec.label, spec.space, base_index=n)

    if n < 1:
        raise ConfigurationError(f"Orbit length must be >= 1, got {n}")
    points = _collect(spec, p, n, cycle_tol, inverse=False)
    return OrbitSegment(points, float(points[0]), direction, spec.label, spec.space)


def _collect(spec: MapSpec, p: float, n: int, cycle_tol: Optional[float], inverse: bool) -> np.ndarray:
    out = np.empty(n)
    for k, x in enumerate(iterate(spec, [p], n, cycle_tol, inverse)):
        out[k] = x[0]
    return out


def periodic_points(
    spec: MapSpec,
    max_period: int = 4,
    grid_n: int = 2048,
    tol: float = 1e-9,
) -> np.ndarray:
    """
    Points of period <= max_period.

    Sign changes of the displacement T^k(x) - x (wrapped into [-1/2, 1/2) on
    the circle) are bracketed on a grid and refined with brentq; brackets that
    straddle a wrap jump instead of a root are discarded by the residual check.

    Returns:
        Sorted distinct periodic points in [0, 1)
    """
    if max_period < 1:
        raise ConfigurationError(f"max_period must be >= 1, got {max_period}")
    space = spec.space
    edges = np.linspace(0.0, 1.0, grid_n + 1)
    roots = []

    for k in range(1, max_period + 1):

        def displacement(x: ArrayLike, k: int = k) -> ArrayLike:
            y = np.asarray(x, dtype=float)
            for _ in range(k):
                y = np.asarray(spec.evaluate(y))
            d = y - np.asarray(x, dtype=float)
            if space.is_circle:
                d = np.mod(d + 0.5, 1.0) - 0.5
            return d

        values = np.asarray(displacement(edges))
        roots.extend(edges[np.abs(values) <= tol].tolist())
        brackets = np.flatnonzero(values[:-1] * values[1:] < 0)
        for i in brackets:
            root = brentq(lambda t: float(displacement(t)), edges[i], edges[i + 1], xtol=1e-15, rtol=4e-16)
            if abs(float(displacement(root))) <= tol:
                roots.append(root)

    if not roots:
        return np.empty(0)
    pts = np.sort(np.asarray(space.normalize(np.asarray(roots)), dtype=float))
    keep = np.concatenate([[True], np.diff(pts) > tol])
    pts = pts[keep]
    if space.is_circle and pts.size > 1 and space.distance(pts[0], pts[-1]) <= tol:
        pts = pts[:-1]
    logger.debug(f"Found {pts.size} periodic points of period <= {max_period} for {spec.label}")
    return pts
