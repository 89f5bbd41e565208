"""Stability experiments: semicontinuity sweeps, continuity probes and Cesaro-stability searches."""

from src.stability.concentration import (
    ConcentrationResult,
    PointSearchResult,
    mass_concentration_check,
    point_search_in_set,
)
from src.stability.search import (
    CalibrationResult,
    CandidateReport,
    CesaroSearchResult,
    LipschitzUniformResult,
    VisitSearchResult,
    cesaro_stability_search,
    largest_successful_delta,
    lipschitz_uniform_experiment,
    search_candidates,
    visit_stability_experiment,
)
from src.stability.semicontinuity import (
    ContinuityClass,
    ContinuityVerdict,
    StabilityReport,
    StabilityRow,
    classify_continuity,
    continuity_probe,
    semicontinuity_experiment,
)

__all__ = [
    "ConcentrationResult",
    "PointSearchResult",
    "mass_concentration_check",
    "point_search_in_set",
    "CalibrationResult",
    "CandidateReport",
    "CesaroSearchResult",
    "LipschitzUniformResult",
    "VisitSearchResult",
    "cesaro_stability_search",
    "largest_successful_delta",
    "lipschitz_uniform_experiment",
    "search_candidates",
    "visit_stability_experiment",
    "ContinuityClass",
    "ContinuityVerdict",
    "StabilityReport",
    "StabilityRow",
    "classify_continuity",
    "continuity_probe",
    "semicontinuity_experiment",
]
