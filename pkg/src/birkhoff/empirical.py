"""Empirical measures along orbits."""

from src.errors import ConfigurationError
from src.measures.discrete import DiscreteMeasure
from src.systems.orbits import OrbitSegment


def empirical_measure(orbit: OrbitSegment, burn_in: int = 0) -> DiscreteMeasure:
    """
    Equal-weight atoms at the orbit points after `burn_in` (coincident points merge).

    Raises:
        ConfigurationError: nothing left after the burn-in
    """
    if burn_in < 0 or burn_in >= len(orbit):
        raise ConfigurationError(f"burn_in must lie in [0, {len(orbit)}), got {burn_in}")
    return DiscreteMeasure.uniform(orbit.points[burn_in:], orbit.space)
