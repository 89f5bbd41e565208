"""Finite sets of measures standing in for compact subsets of M(K)."""

import logging
from dataclasses import dataclass, replace
from typing import Iterable, Iterator, Tuple

from src.config import DEFAULTS
from src.errors import MeasureError
from src.measures.discrete import DiscreteMeasure, as_measures
from src.measures.wasserstein import w1_distance
from src.systems.phase_space import PhaseSpace

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class MeasureSet:
    """
    Nonempty finite family of measures.

    Attributes:
        extremes: the listed measures (ergodic extremes for Ulam-built sets)
        hull: when True the set denotes the convex hull of `extremes`
    """

    extremes: Tuple[DiscreteMeasure, ...]
    hull: bool = False

    def __post_init__(self) -> None:
        measures = as_measures(self.extremes)
        if not measures:
            raise MeasureError("A measure set must contain at least one measure")
        object.__setattr__(self, "extremes", tuple(measures))

    @classmethod
    def build(
        cls,
        measures: Iterable[DiscreteMeasure],
        hull: bool = False,
        dedup: bool = True,
        tol: float = DEFAULTS.dedup_tol,
    ) -> "MeasureSet":
        """Collect measures into a set, dropping near-duplicates unless `dedup` is False."""
        measure_set = cls(tuple(measures), hull)
        return measure_set.deduplicated(tol) if dedup else measure_set

    @property
    def space(self) -> PhaseSpace:
        return self.extremes[0].space

    def __len__(self) -> int:
        return len(self.extremes)

    def __iter__(self) -> Iterator[DiscreteMeasure]:
        return iter(self.extremes)

    def with_hull(self, hull: bool) -> "MeasureSet":
        return replace(self, hull=hull)

    def deduplicated(self, tol: float = DEFAULTS.dedup_tol) -> "MeasureSet":
        """Keep the first of every group of measures pairwise closer than `tol` in W1."""
        kept = []
        for mu in self.extremes:
            if all(w1_distance(mu, nu) >= tol for nu in kept):
                kept.append(mu)
        if len(kept) < len(self.extremes):
            logger.debug(f"Dropped {len(self.extremes) - len(kept)} duplicate measures")
        return MeasureSet(tuple(kept), self.hull)

    def matches(self, other: "MeasureSet", tol: float = DEFAULTS.dedup_tol) -> bool:
        """Set equality up to W1-matching within `tol` (both sides deduplicated)."""
        a, b = self.deduplicated(tol), other.deduplicated(tol)
        return all(any(w1_distance(mu, nu) < tol for nu in b) for mu in a) and all(
            any(w1_distance(mu, nu) < tol for mu in a) for nu in b
        )
