"""
Finitely supported probability measures.

Every Borel measure in the laboratory is approximated by a DiscreteMeasure:
sorted distinct atoms with nonnegative weights summing to one.
"""

import logging
from dataclasses import dataclass
from typing import Callable, Iterable, List, Sequence, Tuple

import numpy as np

from src.config import DEFAULTS
from src.errors import MeasureError
from src.systems.phase_space import ArrayLike, PhaseSpace

logger = logging.getLogger(__name__)

MASS_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class DiscreteMeasure:
    """
    Probability measure sum_i w_i delta_{x_i} on a phase space.

    Build instances with `from_atoms` (or the helpers below) so the
    canonical form holds: atoms sorted, pairwise farther apart than the
    merge tolerance, zero-weight atoms dropped, weights summing to one.

    Attributes:
        support: sorted atom positions
        weights: atom masses
        space: phase space the atoms live on
    """

    support: np.ndarray
    weights: np.ndarray
    space: PhaseSpace

    @classmethod
    def from_atoms(
        cls,
        support: ArrayLike,
        weights: ArrayLike,
        space: PhaseSpace,
        merge_tol: float = DEFAULTS.merge_tol,
        normalize: bool = False,
    ) -> "DiscreteMeasure":
        """
        Canonicalize a list of atoms into a measure.

        Args:
            support: atom positions
            weights: atom masses (nonnegative)
            space: phase space
            merge_tol: atoms closer than this are merged and their weights added
            normalize: rescale the weights to unit mass instead of checking it

        Raises:
            MeasureError: negative, non-finite or unnormalized weights; empty support
        """
        x = np.atleast_1d(np.asarray(support, dtype=float)).ravel()
        w = np.atleast_1d(np.asarray(weights, dtype=float)).ravel()
        if x.size != w.size:
            raise MeasureError(f"Support has {x.size} atoms but {w.size} weights were given")
        if x.size == 0:
            raise MeasureError("A probability measure needs at least one atom")
        if not np.all(np.isfinite(w)) or not np.all(np.isfinite(x)):
            raise MeasureError("Atoms and weights must be finite")
        if np.any(w < 0.0):
            raise MeasureError("Weights must be nonnegative", {"min_weight": float(w.min())})

        total = float(w.sum())
        if normalize:
            if total <= 0.0:
                raise MeasureError("Cannot normalize a measure of zero mass")
            w = w / total
        elif abs(total - 1.0) > MASS_TOL:
            raise MeasureError(f"Weights must sum to 1, got {total!r}", {"total": total})

        x = space.canonical_support(x)
        keep = w > 0.0
        x, w = x[keep], w[keep]
        order = np.argsort(x, kind="stable")
        x, w = x[order], w[order]

        group = np.concatenate([[0], np.cumsum(np.diff(x) > merge_tol)])
        if space.is_circle and group[-1] > 0 and space.distance(x[0], x[-1]) <= merge_tol:
            group[group == group[-1]] = 0
        starts = np.unique(group, return_index=True)[1]
        merged_x = x[starts]
        merged_w = np.bincount(group, weights=w)[np.unique(group)]
        merged_w = merged_w / merged_w.sum()

        return cls(merged_x, merged_w, space)

    @classmethod
    def dirac(cls, x: float, space: PhaseSpace) -> "DiscreteMeasure":
        return cls.from_atoms([x], [1.0], space)

    @classmethod
    def uniform(cls, points: Sequence[float], space: PhaseSpace) -> "DiscreteMeasure":
        """Equal weights on the given points (coincident points merge)."""
        points = np.asarray(points, dtype=float)
        return cls.from_atoms(points, np.full(points.size, 1.0 / max(points.size, 1)), space, normalize=True)

    @classmethod
    def grid_uniform(cls, n: int, space: PhaseSpace) -> "DiscreteMeasure":
        """Uniform measure on the n cell centers (i + 1/2)/n, the discrete stand-in for Lebesgue."""
        return cls.uniform((np.arange(n) + 0.5) / n, space)

    @classmethod
    def mixture(cls, measures: Sequence["DiscreteMeasure"], lambdas: Sequence[float]) -> "DiscreteMeasure":
        """Convex combination sum_i lambda_i nu_i."""
        if not measures:
            raise MeasureError("Mixture of zero measures")
        lam = np.asarray(lambdas, dtype=float)
        if lam.size != len(measures) or np.any(lam < 0.0) or abs(lam.sum() - 1.0) > MASS_TOL:
            raise MeasureError("Mixture weights must be a probability vector matching the measures")
        space = measures[0].space
        support = np.concatenate([m.support for m in measures])
        weights = np.concatenate([lam_i * m.weights for lam_i, m in zip(lam, measures)])
        return cls.from_atoms(support, weights, space, normalize=True)

    def __len__(self) -> int:
        return int(self.support.size)

    @property
    def atoms(self) -> List[Tuple[float, float]]:
        return list(zip(self.support.tolist(), self.weights.tolist()))

    def integrate(self, f: Callable[[np.ndarray], ArrayLike]) -> float:
        """Integral of f against the measure."""
        return float(np.dot(self.weights, np.asarray(f(self.support), dtype=float)))

    def __repr__(self) -> str:
        atoms = ", ".join(f"{w:.4g}@{x:.6g}" for x, w in self.atoms[:6])
        more = ", ..." if len(self) > 6 else ""
        return f"DiscreteMeasure([{atoms}{more}], space={self.space})"


def as_measures(items: Iterable[DiscreteMeasure]) -> List[DiscreteMeasure]:
    """Materialize an iterable of measures, checking they share one phase space."""
    measures = list(items)
    if measures and any(m.space != measures[0].space for m in measures):
        raise MeasureError("All measures must live on the same phase space")
    return measures
