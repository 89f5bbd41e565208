"""
Mass concentration near an orbit closure and the point search that follows from it.

If an invariant measure of S puts almost all of its psi-mass near the orbit
closure of p, then some S-orbit spends almost all of its time there; the point
search looks for such an orbit among finitely many candidates.
"""

import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional, Sequence, Union

import numpy as np

from src.birkhoff.batch import batch_orbit_statistics
from src.birkhoff.bumps import BumpSpec, psi, psi_function
from src.config import DEFAULTS
from src.errors import ConfigurationError
from src.measures.discrete import DiscreteMeasure
from src.systems.maps import MapSpec
from src.systems.orbits import OrbitClosure, OrbitSegment
from src.systems.phase_space import ArrayLike

logger = logging.getLogger(__name__)


def _check_eps(eps: float) -> None:
    if not 0.0 < eps < 1.0:
        raise ConfigurationError(f"eps must lie in (0, 1), got {eps}")


@dataclass(frozen=True)
class ConcentrationResult:
    value: float
    threshold: float

    @property
    def passed(self) -> bool:
        return self.value >= self.threshold

    def __iter__(self):
        return iter((self.value, self.passed))


def mass_concentration_check(
    mu_S: DiscreteMeasure,
    orbit_sample: Union[OrbitSegment, OrbitClosure],
    bump: BumpSpec,
    eps: float,
) -> ConcentrationResult:
    """
    Integral of psi against mu_S, compared with 1 - eps^2/8.

    Returns:
        ConcentrationResult; unpacks as (value, passed)
    """
    _check_eps(eps)
    value = float(np.dot(mu_S.weights, np.asarray(psi(mu_S.support, orbit_sample, bump), dtype=float)))
    return ConcentrationResult(value, 1.0 - eps**2 / 8.0)


@dataclass(frozen=True)
class PointSearchResult:
    """First candidate whose psi-average exceeds 1 - eps, or the best value seen."""

    point: Optional[float]
    value: float
    evaluated: int

    @property
    def found(self) -> bool:
        return self.point is not None

    def as_dict(self) -> Dict[str, Any]:
        return {"found": self.found, "point": "" if self.point is None else self.point, "value": self.value}


def point_search_in_set(
    S: MapSpec,
    A: Callable[[np.ndarray], ArrayLike],
    candidates: Sequence[float],
    orbit_sample: Union[OrbitSegment, OrbitClosure],
    bump: BumpSpec,
    eps: float,
    n: int = DEFAULTS.horizon,
    cycle_tol: Optional[float] = DEFAULTS.cycle_tol,
) -> PointSearchResult:
    """
    Search the candidates lying in A for one whose S-orbit psi-average exceeds 1 - eps.

    Args:
        S: perturbed map
        A: membership predicate
        candidates: nonempty list of points
        orbit_sample: sample of the T-orbit closure of p
        bump: alpha and sigma of psi
        eps: tolerance in (0, 1)
        n: horizon

    Returns:
        PointSearchResult; failure is a value with the best average found (nan when no candidate lies in A)
    """
    _check_eps(eps)
    points = np.atleast_1d(np.asarray(candidates, dtype=float))
    if points.size == 0:
        raise ConfigurationError("Point search needs at least one candidate")
    inside = points[np.asarray(A(points), dtype=bool).reshape(points.shape)]
    if inside.size == 0:
        logger.info("No candidate lies in A")
        return PointSearchResult(None, float("nan"), 0)

    stats = batch_orbit_statistics(S, inside, n, [psi_function(orbit_sample, bump)], cycle_tol=cycle_tol)
    averages = stats.final[0]
    hits = np.flatnonzero(averages > 1.0 - eps)
    if hits.size:
        return PointSearchResult(float(inside[hits[0]]), float(averages[hits[0]]), int(inside.size))
    return PointSearchResult(None, float(averages.max()), int(inside.size))
