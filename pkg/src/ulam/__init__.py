"""Ulam discretization of transfer operators and ergodic decomposition of the resulting chains."""

from src.ulam.decomposition import ErgodicDecomposition, ergodic_decomposition
from src.ulam.grid import Grid
from src.ulam.measure_sets import invariant_measure_set, measure_set_distance
from src.ulam.transfer import TransferMatrix, UlamMethod, UlamMethodKind, build_transfer_matrix

__all__ = [
    "Grid",
    "UlamMethod",
    "UlamMethodKind",
    "TransferMatrix",
    "build_transfer_matrix",
    "ErgodicDecomposition",
    "ergodic_decomposition",
    "invariant_measure_set",
    "measure_set_distance",
]
