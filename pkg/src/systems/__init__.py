"""Phase spaces, map families, perturbations, orbits and C0 distances."""

from src.systems.distances import C0DistancePair, c0_distance_estimate, c0_distance_pair
from src.systems.maps import LinearPiece, MapFamily, MapSpec, eval_inverse, eval_map, perturb
from src.systems.orbits import OrbitClosure, OrbitDirection, OrbitSegment, iterate, orbit, periodic_points
from src.systems.perturbation import PerturbationKind, PerturbationSpec, smooth_bump_profile
from src.systems.phase_space import UPPER_POINT, PhaseSpace, SpaceKind

__all__ = [
    "PhaseSpace",
    "SpaceKind",
    "UPPER_POINT",
    "MapFamily",
    "MapSpec",
    "LinearPiece",
    "eval_map",
    "eval_inverse",
    "perturb",
    "PerturbationKind",
    "PerturbationSpec",
    "smooth_bump_profile",
    "OrbitDirection",
    "OrbitSegment",
    "OrbitClosure",
    "orbit",
    "iterate",
    "periodic_points",
    "C0DistancePair",
    "c0_distance_estimate",
    "c0_distance_pair",
]
