"""Discrete measures, Wasserstein-1 and Hausdorff distances, Lipschitz tests and invariance residuals."""

from src.measures.discrete import DiscreteMeasure
from src.measures.hausdorff import HausdorffResult, directed_distance, hausdorff_distance
from src.measures.invariance import invariance_residual, push_forward
from src.measures.io import read_measure, read_measure_set, write_measure, write_measure_set
from src.measures.lipschitz import (
    LipschitzEstimate,
    LipschitzTestSet,
    TestFunction,
    check_lipschitz,
    dual_lower_bound,
    empirical_lipschitz,
)
from src.measures.sets import MeasureSet
from src.measures.wasserstein import (
    HullProjection,
    cost_matrix,
    transport_cost,
    w1_distance,
    w1_matrix,
    w1_point_to_hull,
    w1_point_to_set,
)

__all__ = [
    "DiscreteMeasure",
    "MeasureSet",
    "HausdorffResult",
    "HullProjection",
    "LipschitzEstimate",
    "LipschitzTestSet",
    "TestFunction",
    "check_lipschitz",
    "cost_matrix",
    "directed_distance",
    "dual_lower_bound",
    "empirical_lipschitz",
    "hausdorff_distance",
    "invariance_residual",
    "push_forward",
    "read_measure",
    "read_measure_set",
    "transport_cost",
    "w1_distance",
    "w1_matrix",
    "w1_point_to_hull",
    "w1_point_to_set",
    "write_measure",
    "write_measure_set",
]
