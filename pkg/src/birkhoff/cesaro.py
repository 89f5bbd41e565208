"""Finite-horizon proxies for the lower and upper Cesaro limits of phi along an orbit."""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np

from src.birkhoff.batch import Observable, batch_orbit_statistics, check_window
from src.config import DEFAULTS
from src.systems.maps import MapSpec

logger = logging.getLogger(__name__)

MIN_HORIZON = 100


@dataclass(frozen=True, eq=False)
class CesaroStats:
    """
    Running averages of phi along one orbit and their trailing-window bounds.

    Attributes:
        running_averages: a_m for m = 1..n (one-sided) or m = 0..n (two-sided)
        lower_proxy: min of the running averages over the trailing window
        upper_proxy: max over the same window
        horizon: n
        window: trailing window fraction w
        two_sided: whether the sums ran over k = -m..m
    """

    running_averages: np.ndarray
    lower_proxy: float
    upper_proxy: float
    horizon: int
    window: float
    two_sided: bool = False

    @property
    def final(self) -> float:
        return float(self.running_averages[-1])

    @property
    def spread(self) -> float:
        """Window spread; small values indicate a settled average."""
        return self.upper_proxy - self.lower_proxy

    def row(self) -> Dict[str, Any]:
        return {
            "horizon": self.horizon,
            "lower": self.lower_proxy,
            "upper": self.upper_proxy,
            "final": self.final,
            "spread": self.spread,
        }


def cesaro_bounds(
    spec: MapSpec,
    p: float,
    phi: Observable,
    n: int = DEFAULTS.horizon,
    w: float = DEFAULTS.window,
    two_sided: bool = False,
    cycle_tol: Optional[float] = None,
) -> CesaroStats:
    """
    Cesaro statistics of phi along the orbit of p.

    Args:
        spec: the map
        p: base point
        phi: observable
        n: horizon (>= 100)
        w: trailing window fraction in (0, 1/2]
        two_sided: average over k = -n..n (invertible maps only)
        cycle_tol: close periodic cycles within this distance

    Returns:
        CesaroStats with proxies over the last ceil(w * count) running averages
    """
    check_window(n, w, MIN_HORIZON)
    stats = batch_orbit_statistics(spec, [p], n, [phi], w, two_sided, cycle_tol, record=True)
    return CesaroStats(
        running_averages=stats.running[:, 0, 0].copy(),
        lower_proxy=float(stats.lower[0, 0]),
        upper_proxy=float(stats.upper[0, 0]),
        horizon=n,
        window=w,
        two_sided=two_sided,
    )
