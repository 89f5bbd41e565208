"""Birkhoff averages, empirical measures, smooth cutoffs and visit frequencies."""

from src.birkhoff.batch import BatchStatistics, batch_orbit_statistics, window_length
from src.birkhoff.bumps import (
    BumpSpec,
    ChiFunctions,
    IntervalUnion,
    bump_eta,
    chi_functions,
    psi,
    psi_function,
)
from src.birkhoff.cesaro import CesaroStats, cesaro_bounds
from src.birkhoff.empirical import empirical_measure
from src.birkhoff.observables import parse_observable, parse_observables
from src.birkhoff.visits import VisitStats, visit_frequency
from src.systems.orbits import OrbitClosure

__all__ = [
    "BatchStatistics",
    "batch_orbit_statistics",
    "window_length",
    "BumpSpec",
    "ChiFunctions",
    "IntervalUnion",
    "bump_eta",
    "chi_functions",
    "psi",
    "psi_function",
    "CesaroStats",
    "cesaro_bounds",
    "empirical_measure",
    "parse_observable",
    "parse_observables",
    "OrbitClosure",
    "VisitStats",
    "visit_frequency",
]
