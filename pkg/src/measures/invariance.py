"""Push-forwards and invariance residuals: how far int phi dmu = int phi o T dmu is from holding."""

import numpy as np

from src.errors import ConfigurationError
from src.measures.discrete import DiscreteMeasure
from src.measures.lipschitz import LipschitzTestSet
from src.systems.maps import MapSpec


def push_forward(mu: DiscreteMeasure, spec: MapSpec) -> DiscreteMeasure:
    """Image measure T_* mu: atoms mapped through T, coincident images merged."""
    if mu.space != spec.space:
        raise ConfigurationError(f"Measure on {mu.space} cannot be pushed by a map on {spec.space}")
    images = np.asarray(spec.evaluate(mu.support), dtype=float)
    return DiscreteMeasure.from_atoms(images, mu.weights, mu.space, normalize=True)


def invariance_residual(mu: DiscreteMeasure, spec: MapSpec, tests: LipschitzTestSet) -> float:
    """
    max over tests of |int phi dmu - int phi o T dmu|.

    Args:
        mu: the measure
        spec: the map T
        tests: nonempty test class

    Returns:
        The residual; zero (up to rounding) for a measure invariant on its support
    """
    if len(tests) == 0:
        raise ConfigurationError("Invariance residual needs at least one test function")
    images = np.asarray(spec.evaluate(mu.support), dtype=float)
    diff = (tests.evaluate(mu.support) - tests.evaluate(images)) @ mu.weights
    return float(np.max(np.abs(diff)))
