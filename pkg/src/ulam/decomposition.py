"""
Ergodic decomposition of a finite Markov chain.

Recurrent classes are the terminal strongly connected components of the
positive-transition digraph. Each carries exactly one stationary
distribution, computed by a direct sparse solve for small classes and by
lazy power iteration for large ones.
"""

import logging
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components
from scipy.sparse.linalg import spsolve

from src.config import DEFAULTS
from src.errors import ConvergenceError
from src.measures.discrete import DiscreteMeasure
from src.measures.sets import MeasureSet
from src.ulam.grid import Grid
from src.ulam.transfer import TransferMatrix

logger = logging.getLogger(__name__)

STATIONARY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ErgodicDecomposition:
    """
    Recurrent classes of an Ulam chain and their stationary measures.

    Attributes:
        classes: sorted cell-index arrays, ordered by smallest cell
        vectors: stationary probability vectors, one per class (indexed like the class)
        stationaries: the same vectors as measures with atoms at cell centers
        transient_cells: cells outside every recurrent class
        grid: the underlying grid
    """

    classes: Tuple[np.ndarray, ...]
    vectors: Tuple[np.ndarray, ...]
    stationaries: Tuple[DiscreteMeasure, ...]
    transient_cells: np.ndarray
    grid: Grid

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    def measure_set(self, hull: bool = False) -> MeasureSet:
        # Class supports are disjoint, so the stationaries are already distinct.
        return MeasureSet.build(self.stationaries, hull=hull, dedup=False)

    def residuals(self, matrix: TransferMatrix) -> List[float]:
        """||pi P - pi||_1 for each class, computed on the full chain."""
        out = []
        for cells, pi in zip(self.classes, self.vectors):
            full = np.zeros(matrix.n)
            full[cells] = pi
            out.append(float(np.abs(matrix.matrix.T @ full - full).sum()))
        return out

    def report(self) -> str:
        """Structured text: one block per class with its size and stationary support."""
        lines = [
            f"# ergodic decomposition: n={self.grid.n} space={self.grid.space}",
            f"classes = {self.n_classes}",
            f"transient_cells = {self.transient_cells.size}",
        ]
        for k, (cells, mu) in enumerate(zip(self.classes, self.stationaries)):
            lines.append(f"[class {k}]")
            lines.append(f"size = {cells.size}")
            lines.append(f"cells = {_ranges(cells)}")
            lines.append(f"support = {mu.support.min():.17g}..{mu.support.max():.17g}")
            lines.append(f"max_weight = {mu.weights.max():.17g}")
        return "\n".join(lines) + "\n"


def _ranges(cells: np.ndarray) -> str:
    """Compress sorted indices into 'a-b,c' runs."""
    if cells.size == 0:
        return ""
    breaks = np.flatnonzero(np.diff(cells) != 1)
    starts = np.concatenate([[cells[0]], cells[breaks + 1]])
    ends = np.concatenate([cells[breaks], [cells[-1]]])
    return ",".join(str(a) if a == b else f"{a}-{b}" for a, b in zip(starts, ends))


def _direct_stationary(q: sparse.csr_matrix) -> np.ndarray:
    size = q.shape[0]
    # pi (Q - I) = 0 with the first equation replaced by sum(pi) = 1
    system = (q - sparse.identity(size, format="csr")).T.tocsr()
    a = sparse.vstack([sparse.csr_matrix(np.ones((1, size))), system[1:, :]], format="csc")
    rhs = np.zeros(size)
    rhs[0] = 1.0
    return np.asarray(spsolve(a, rhs), dtype=float)


def _power_stationary(q: sparse.csr_matrix, max_iter: int, tol: float) -> np.ndarray:
    size = q.shape[0]
    # The lazy chain (I + Q)/2 has the same stationary vector and is aperiodic.
    lazy_t = (0.5 * (q + sparse.identity(size, format="csr"))).T.tocsr()
    pi = np.full(size, 1.0 / size)
    residual = np.inf
    for iteration in range(1, max_iter + 1):
        nxt = lazy_t @ pi
        nxt /= nxt.sum()
        residual = float(np.abs(nxt - pi).sum())
        pi = nxt
        if residual <= tol:
            logger.debug(f"Power iteration converged after {iteration} steps")
            return pi
    raise ConvergenceError(
        f"Power iteration did not converge in {max_iter} iterations (residual {residual:.3e})",
        residual=residual,
        iterations=max_iter,
    )


def ergodic_decomposition(
    transfer: TransferMatrix,
    edge_threshold: float = DEFAULTS.edge_threshold,
    direct_limit: int = DEFAULTS.direct_solve_limit,
    power_iterations: int = DEFAULTS.power_iterations,
    power_tolerance: float = DEFAULTS.power_tolerance,
) -> ErgodicDecomposition:
    """
    Split a row-stochastic matrix into recurrent classes with stationary vectors.

    Args:
        transfer: the Ulam matrix
        edge_threshold: transitions below this are treated as absent
        direct_limit: largest class solved directly
        power_iterations: iteration budget for larger classes
        power_tolerance: L1 residual at which power iteration stops

    Returns:
        ErgodicDecomposition with at least one class

    Raises:
        ConvergenceError: power iteration exhausted its budget
    """
    p = transfer.matrix.tocsr()
    graph = p.copy()
    graph.data[graph.data < edge_threshold] = 0.0
    graph.eliminate_zeros()

    n_components, labels = connected_components(graph, directed=True, connection="strong")
    coo = graph.tocoo()
    leaving = labels[coo.row] != labels[coo.col]
    open_components = set(np.unique(labels[coo.row[leaving]]).tolist())

    classes = []
    for component in range(n_components):
        if component not in open_components:
            classes.append(np.flatnonzero(labels == component))
    classes.sort(key=lambda cells: int(cells[0]))

    centers = transfer.grid.centers
    vectors, stationaries = [], []
    for cells in classes:
        if cells.size == 1:
            pi = np.ones(1)
        else:
            q = graph[cells][:, cells].tocsr()
            q = sparse.diags(1.0 / np.asarray(q.sum(axis=1)).ravel()) @ q
            if cells.size <= direct_limit:
                pi = _direct_stationary(q)
            else:
                pi = _power_stationary(q, power_iterations, power_tolerance)
            pi = np.clip(pi, 0.0, None)
            pi /= pi.sum()
            residual = float(np.abs(q.T @ pi - pi).sum())
            if residual > STATIONARY_TOL:
                logger.warning(
                    "Stationary vector residual above tolerance",
                    extra={"class_size": int(cells.size), "residual": residual},
                )
        vectors.append(pi)
        stationaries.append(DiscreteMeasure.from_atoms(centers[cells], pi, transfer.grid.space, normalize=True))

    in_class = np.zeros(transfer.n, dtype=bool)
    for cells in classes:
        in_class[cells] = True
    transient = np.flatnonzero(~in_class)

    logger.info(
        "Ergodic decomposition",
        extra={"n": transfer.n, "classes": len(classes), "transient": int(transient.size)},
    )
    return ErgodicDecomposition(tuple(classes), tuple(vectors), tuple(stationaries), transient, transfer.grid)
