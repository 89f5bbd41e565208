"""
Ulam transfer matrices.

P[i, j] approximates the fraction of cell i (Lebesgue measure) that T maps
into cell j. Piecewise-linear maps get their rows analytically from the images
of each affine branch; any other map is sampled with k stratified points per
cell.
"""

import csv
import logging
import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import sparse

from src.config import DEFAULTS
from src.errors import ConfigurationError
from src.systems.maps import LinearPiece, MapSpec
from src.systems.phase_space import PhaseSpace
from src.ulam.grid import Grid
from src.utils.formatting import format_float
from src.utils.parallel import parallel_map

logger = logging.getLogger(__name__)

SLIVER = 1e-15
_SAMPLED_PATTERN = re.compile(r"^sampled(?:\((\d+)\))?$")


class UlamMethodKind(str, Enum):
    EXACT_PWL = "exact_pwl"
    SAMPLED = "sampled"
    AUTO = "auto"


@dataclass(frozen=True)
class UlamMethod:
    """
    How transfer-matrix rows are computed.

    Attributes:
        kind: exact_pwl, sampled or auto (exact when the map is piecewise linear)
        samples: points per cell for sampled rows
        jitter: draw one uniform point per sub-cell instead of its midpoint
        seed: seed of the jitter generator
    """

    kind: UlamMethodKind = UlamMethodKind.AUTO
    samples: int = DEFAULTS.samples_per_cell
    jitter: bool = False
    seed: int = 0

    def __post_init__(self) -> None:
        if self.samples < 1:
            raise ConfigurationError(f"Sampled Ulam rows need at least one point per cell, got {self.samples}")

    @classmethod
    def exact_pwl(cls) -> "UlamMethod":
        return cls(UlamMethodKind.EXACT_PWL)

    @classmethod
    def sampled(cls, samples: int = DEFAULTS.samples_per_cell, jitter: bool = False, seed: int = 0) -> "UlamMethod":
        return cls(UlamMethodKind.SAMPLED, samples, jitter, seed)

    @classmethod
    def parse(cls, text: str, jitter: bool = False, seed: int = 0) -> "UlamMethod":
        """Parse 'exact_pwl', 'auto', 'sampled' or 'sampled(k)'."""
        value = text.strip().lower().replace(" ", "")
        if value == "exact_pwl":
            return cls.exact_pwl()
        if value == "auto":
            return cls(UlamMethodKind.AUTO, jitter=jitter, seed=seed)
        match = _SAMPLED_PATTERN.match(value)
        if match:
            return cls.sampled(int(match.group(1) or DEFAULTS.samples_per_cell), jitter, seed)
        raise ConfigurationError(f"Unknown Ulam method {text!r}. Must be one of: exact_pwl, sampled(k), auto")

    @property
    def label(self) -> str:
        if self.kind is UlamMethodKind.SAMPLED:
            return f"sampled({self.samples}{',jitter' if self.jitter else ''})"
        return self.kind.value

    def resolve(self, spec: MapSpec) -> "UlamMethod":
        """Concrete method for `spec`; auto picks exact_pwl whenever it applies."""
        if self.kind is UlamMethodKind.AUTO:
            if spec.linear_pieces() is not None:
                return UlamMethod.exact_pwl()
            return UlamMethod(UlamMethodKind.SAMPLED, self.samples, self.jitter, self.seed)
        if self.kind is UlamMethodKind.EXACT_PWL and spec.linear_pieces() is None:
            raise ConfigurationError(
                f"exact_pwl needs a piecewise-linear map; {spec.label} is not. Use sampled(k) or auto",
                {"map": spec.label},
            )
        return self


@dataclass(frozen=True, eq=False)
class TransferMatrix:
    """Sparse row-stochastic Ulam matrix with its provenance."""

    matrix: sparse.csr_matrix
    grid: Grid
    method: UlamMethod
    spec_id: str = "matrix"

    @classmethod
    def from_dense(cls, array: Sequence[Sequence[float]], grid: Optional[Grid] = None, spec_id: str = "matrix"):
        """Wrap an explicit row-stochastic matrix (rows must sum to one)."""
        dense = np.asarray(array, dtype=float)
        if dense.ndim != 2 or dense.shape[0] != dense.shape[1]:
            raise ConfigurationError(f"Transfer matrix must be square, got shape {dense.shape}")
        if np.any(dense < 0.0) or np.any(np.abs(dense.sum(axis=1) - 1.0) > 1e-12):
            raise ConfigurationError("Transfer matrix rows must be probability vectors")
        grid = grid or Grid(dense.shape[0], PhaseSpace.interval())
        return cls(sparse.csr_matrix(dense), grid, UlamMethod.exact_pwl(), spec_id)

    @property
    def n(self) -> int:
        return int(self.matrix.shape[0])

    def row_sums(self) -> np.ndarray:
        return np.asarray(self.matrix.sum(axis=1)).ravel()

    def is_row_stochastic(self, tol: float = 1e-12) -> bool:
        data = self.matrix.data
        return bool(np.all(data >= 0.0) and np.all(data <= 1.0) and np.all(np.abs(self.row_sums() - 1.0) <= tol))

    def triplets(self) -> Iterator[Tuple[int, int, float]]:
        """Nonzero entries as (row, col, prob), row-major."""
        coo = self.matrix.tocoo()
        order = np.lexsort((coo.col, coo.row))
        for k in order:
            yield int(coo.row[k]), int(coo.col[k]), float(coo.data[k])

    def write_csv(self, path: Union[str, Path]) -> None:
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(["row", "col", "prob"])
            for i, j, p in self.triplets():
                writer.writerow([i, j, format_float(p)])


# Exact rows


def _spread(lo: float, hi: float, mass: float, n: int, circle: bool, row: Dict[int, float]) -> None:
    """Spread `mass` uniformly over [lo, hi] (scaled units) into the cells it covers."""
    if hi - lo <= 0.0:
        j = int(np.floor(lo))
        j = j % n if circle else min(max(j, 0), n - 1)
        row[j] = row.get(j, 0.0) + mass
        return

    density = mass / (hi - lo)
    if not circle:
        # Clamped interval maps pile overshoot onto the boundary cells.
        if lo < 0.0:
            row[0] = row.get(0, 0.0) + density * (min(hi, 0.0) - lo)
        if hi > n:
            row[n - 1] = row.get(n - 1, 0.0) + density * (hi - max(lo, float(n)))
        lo, hi = max(lo, 0.0), min(hi, float(n))
        if hi <= lo:
            return

    for j in range(int(np.floor(lo)), int(np.ceil(hi))):
        overlap = min(hi, j + 1.0) - max(lo, float(j))
        if overlap > 0.0:
            cell = j % n if circle else j
            row[cell] = row.get(cell, 0.0) + density * overlap


def _exact_rows(pieces: List[LinearPiece], n: int, circle: bool, cells: Sequence[int]) -> List[Dict[int, float]]:
    rows = []
    for i in cells:
        row: Dict[int, float] = {}
        for piece in pieces:
            s, t = max(float(i), n * piece.x0), min(i + 1.0, n * piece.x1)
            if t <= s:
                continue
            # Image of u in [s, t] in scaled units: n*y0 + slope*(u - n*x0)
            v_s = n * piece.y0 + piece.slope * (s - n * piece.x0)
            v_t = n * piece.y0 + piece.slope * (t - n * piece.x0)
            _spread(min(v_s, v_t), max(v_s, v_t), t - s, n, circle, row)
        rows.append(row)
    return rows


def _exact_matrix(spec: MapSpec, grid: Grid, threads: int) -> sparse.csr_matrix:
    pieces = spec.linear_pieces()
    n, circle = grid.n, grid.space.is_circle
    blocks = np.array_split(np.arange(n), max(1, min(threads, n)))
    results = parallel_map(lambda cells: _exact_rows(pieces, n, circle, cells.tolist()), blocks, threads)

    rows, cols, data = [], [], []
    i = 0
    for block in results:
        for row in block:
            entries = {j: p for j, p in row.items() if p >= SLIVER}
            total = sum(entries.values())
            for j in sorted(entries):
                rows.append(i)
                cols.append(j)
                data.append(entries[j] / total)
            i += 1
    return sparse.csr_matrix((data, (rows, cols)), shape=(n, n))


def _sampled_matrix(spec: MapSpec, grid: Grid, method: UlamMethod) -> sparse.csr_matrix:
    n, k = grid.n, method.samples
    offsets = (np.arange(k) + 0.5) / k
    if method.jitter:
        rng = np.random.default_rng(method.seed)
        offsets = (np.arange(k)[None, :] + rng.random((n, k))) / k
    points = (np.arange(n)[:, None] + offsets) / n
    targets = grid.cell_of(spec.evaluate(points.ravel()))
    rows = np.repeat(np.arange(n), k)
    counts = sparse.csr_matrix((np.ones(rows.size), (rows, targets)), shape=(n, n))
    counts.sum_duplicates()
    return sparse.csr_matrix(counts.multiply(1.0 / k))


def build_transfer_matrix(
    spec: MapSpec,
    grid: Grid,
    method: Optional[UlamMethod] = None,
    threads: int = 1,
) -> TransferMatrix:
    """
    Ulam discretization of `spec` on `grid`.

    Args:
        spec: the map
        grid: partition of the phase space (same space as the map)
        method: exact_pwl, sampled(k) or auto (default)
        threads: worker threads for exact row construction

    Returns:
        Row-stochastic TransferMatrix

    Raises:
        ConfigurationError: exact_pwl for a non piecewise-linear map, or mismatched spaces
    """
    if grid.space != spec.space:
        raise ConfigurationError(f"Grid on {grid.space} cannot discretize a map on {spec.space}")
    resolved = (method or UlamMethod()).resolve(spec)

    if resolved.kind is UlamMethodKind.EXACT_PWL:
        matrix = _exact_matrix(spec, grid, threads)
    else:
        matrix = _sampled_matrix(spec, grid, resolved)

    logger.info(
        "Built transfer matrix",
        extra={"map": spec.label, "n": grid.n, "method": resolved.label, "nnz": int(matrix.nnz)},
    )
    return TransferMatrix(matrix, grid, resolved, spec.label)
