"""Uniform partitions of the phase space into n half-open cells."""

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from src.errors import ConfigurationError
from src.systems.phase_space import ArrayLike, PhaseSpace


@dataclass(frozen=True)
class Grid:
    """Cells [i/n, (i+1)/n), i = 0..n-1, of width h = 1/n."""

    n: int
    space: PhaseSpace

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 2:
            raise ConfigurationError(f"Grid needs an integer cell count >= 2, got {self.n}")

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @property
    def centers(self) -> np.ndarray:
        return (np.arange(self.n) + 0.5) / self.n

    @property
    def cells(self) -> List[Tuple[float, float]]:
        return [(i / self.n, (i + 1) / self.n) for i in range(self.n)]

    def cell_of(self, x: ArrayLike) -> np.ndarray:
        """Index of the cell containing each point of [0, 1)."""
        idx = np.floor(np.asarray(x, dtype=float) * self.n).astype(int)
        return np.clip(idx, 0, self.n - 1)
