"""
Hausdorff distance between sets of measures, in the sum-of-directed-terms form.

d_H(P, Q) = max_{p in P} W1(p, Q) + max_{q in Q} W1(q, P)

Both directed terms are reported as well: a small directed_qp with a large
directed_pq is what a failure of lower semicontinuity looks like.
"""

import logging
from dataclasses import dataclass
from typing import Iterator, Optional, Tuple

import numpy as np

from src.errors import MeasureError
from src.measures.sets import MeasureSet
from src.measures.wasserstein import ZERO_SNAP, w1_matrix, w1_point_to_set

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HausdorffResult:
    """Sum value with its two directed components; unpacks as (total, directed_pq, directed_qp)."""

    total: float
    directed_pq: float
    directed_qp: float

    def __iter__(self) -> Iterator[float]:
        return iter((self.total, self.directed_pq, self.directed_qp))

    def as_tuple(self) -> Tuple[float, float, float]:
        return self.total, self.directed_pq, self.directed_qp


def _resolve_mode(P: MeasureSet, Q: MeasureSet, hull: Optional[bool]) -> bool:
    if hull is not None:
        return hull
    if P.hull != Q.hull:
        raise MeasureError("Sets disagree on hull semantics; pass `hull` explicitly")
    return P.hull


def directed_distance(P: MeasureSet, Q: MeasureSet, hull: Optional[bool] = None) -> float:
    """
    sup_{p in P} W1(p, Q).

    In hull mode the sup over the hull of P is attained at an extreme point
    because mu -> W1(mu, hull Q) is convex.
    """
    use_hull = _resolve_mode(P, Q, hull)
    if use_hull:
        return max(w1_point_to_set(p, Q, hull=True) for p in P.extremes)
    distances = w1_matrix(P.extremes, Q.extremes)
    value = float(distances.min(axis=1).max())
    return 0.0 if value <= ZERO_SNAP else value


def hausdorff_distance(P: MeasureSet, Q: MeasureSet, hull: Optional[bool] = None) -> HausdorffResult:
    """
    Hausdorff distance in the sum form.

    Args:
        P: first nonempty set
        Q: second nonempty set
        hull: compare convex hulls (True) or the finite sets (False); None uses the sets' flags

    Returns:
        HausdorffResult(total, directed_pq, directed_qp); symmetric under swapping P and Q
    """
    if len(P) == 0 or len(Q) == 0:
        raise MeasureError("Hausdorff distance needs two nonempty sets")
    use_hull = _resolve_mode(P, Q, hull)

    if use_hull:
        d_pq = directed_distance(P, Q, hull=True)
        d_qp = directed_distance(Q, P, hull=True)
    else:
        # One matrix serves both directions (row minima and column minima).
        distances = w1_matrix(P.extremes, Q.extremes)
        d_pq = float(np.max(distances.min(axis=1)))
        d_qp = float(np.max(distances.min(axis=0)))
        d_pq = 0.0 if d_pq <= ZERO_SNAP else d_pq
        d_qp = 0.0 if d_qp <= ZERO_SNAP else d_qp

    logger.debug("Hausdorff distance", extra={"directed_pq": d_pq, "directed_qp": d_qp, "hull": use_hull})
    return HausdorffResult(d_pq + d_qp, d_pq, d_qp)
