"""Ulam approximations of M(K, T) and distances between them."""

import logging
from typing import Optional

from src.errors import ConfigurationError
from src.measures.hausdorff import HausdorffResult, hausdorff_distance
from src.measures.sets import MeasureSet
from src.systems.maps import MapSpec
from src.ulam.decomposition import ergodic_decomposition
from src.ulam.grid import Grid
from src.ulam.transfer import UlamMethod, build_transfer_matrix

logger = logging.getLogger(__name__)


def invariant_measure_set(
    spec: MapSpec,
    grid: Grid,
    method: Optional[UlamMethod] = None,
    hull: bool = False,
    threads: int = 1,
) -> MeasureSet:
    """
    Approximate the invariant measures of `spec` by the stationary measures of its Ulam chain.

    Args:
        spec: the map
        grid: Ulam grid
        method: row construction (auto by default)
        hull: whether the returned set denotes the convex hull of its extremes
        threads: worker threads for matrix construction

    Returns:
        Nonempty MeasureSet, one extreme per recurrent class
    """
    transfer = build_transfer_matrix(spec, grid, method, threads)
    return ergodic_decomposition(transfer).measure_set(hull)


def measure_set_distance(
    a: MapSpec,
    b: MapSpec,
    grid: Grid,
    hull: bool = False,
    method: Optional[UlamMethod] = None,
    threads: int = 1,
) -> HausdorffResult:
    """Hausdorff distance (sum form) between the Ulam invariant-measure sets of two maps."""
    if a.space != b.space:
        raise ConfigurationError(f"Cannot compare maps on {a.space} and {b.space}")
    set_a = invariant_measure_set(a, grid, method, hull, threads)
    set_b = invariant_measure_set(b, grid, method, hull, threads)
    result = hausdorff_distance(set_a, set_b, hull=hull)
    logger.info(
        "Measure-set distance",
        extra={"a": a.label, "b": b.label, "n": grid.n, "hull": hull, "total": result.total},
    )
    return result
