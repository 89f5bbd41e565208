"""
Finite classes of Lipschitz test functions.

The canonical 1-Lipschitz class holds scaled Fourier modes
cos(2 pi k x)/(2 pi k), sin(2 pi k x)/(2 pi k) for k = 1..K and hinge
functions x -> rho(x, c) on a grid of centers. Integrals against the class
give invariance residuals and lower bounds on W1 (the dual side of
Kantorovich-Rubinstein).
"""

import logging
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence, Tuple

import numpy as np

from src.config import DEFAULTS
from src.errors import ConfigurationError, LipschitzViolationError
from src.measures.discrete import DiscreteMeasure
from src.systems.phase_space import ArrayLike, PhaseSpace

logger = logging.getLogger(__name__)

LIPSCHITZ_SLACK = 1e-6
DENSE_GRID = 10_000


@dataclass(frozen=True)
class TestFunction:
    """A named evaluable function with its declared Lipschitz constant."""

    __test__ = False  # keeps pytest from collecting the class

    name: str
    func: Callable[[np.ndarray], ArrayLike]
    lipschitz: float = 1.0

    def __call__(self, x: ArrayLike) -> np.ndarray:
        return np.asarray(self.func(np.asarray(x, dtype=float)), dtype=float)


@dataclass(frozen=True)
class LipschitzEstimate:
    """Largest difference quotient found and the pair of points realizing it."""

    ratio: float
    pair: Tuple[float, float]


def empirical_lipschitz(
    f: Callable[[np.ndarray], ArrayLike],
    space: PhaseSpace,
    grid_n: int = DENSE_GRID,
) -> LipschitzEstimate:
    """
    Largest |f(x) - f(y)| / rho(x, y) over consecutive points of a uniform grid.

    The interval grid includes both endpoints; the circle grid adds the
    wrap-around pair (last point, 0).
    """
    if grid_n < 2:
        raise ConfigurationError(f"Lipschitz grid needs at least 2 points, got {grid_n}")
    if space.is_circle:
        x = np.arange(grid_n + 1, dtype=float) / grid_n
        x[-1] = 0.0
    else:
        x = np.linspace(0.0, 1.0, grid_n + 1)
    values = np.asarray(f(x), dtype=float)
    gaps = np.asarray(space.distance(x[:-1], x[1:]))
    ratios = np.abs(np.diff(values)) / gaps
    i = int(np.argmax(ratios))
    return LipschitzEstimate(float(ratios[i]), (float(x[i]), float(x[i + 1])))


def check_lipschitz(
    f: Callable[[np.ndarray], ArrayLike],
    declared: float,
    space: PhaseSpace,
    grid_n: int = DENSE_GRID,
    name: str = "function",
) -> LipschitzEstimate:
    """
    Verify that f is `declared`-Lipschitz on a dense grid.

    Raises:
        LipschitzViolationError: with the violating pair and its difference quotient
    """
    estimate = empirical_lipschitz(f, space, grid_n)
    if estimate.ratio > declared * (1.0 + LIPSCHITZ_SLACK) + LIPSCHITZ_SLACK:
        raise LipschitzViolationError(
            f"{name} is not {declared:g}-Lipschitz: quotient {estimate.ratio:.6g} between "
            f"x={estimate.pair[0]:.6g} and y={estimate.pair[1]:.6g}",
            pair=estimate.pair,
            ratio=estimate.ratio,
            declared=declared,
        )
    return estimate


def _fourier(k: int, kind: str) -> TestFunction:
    scale = 2.0 * np.pi * k
    if kind == "cos":
        return TestFunction(f"cos{k}", lambda x: np.cos(scale * x) / scale)
    return TestFunction(f"sin{k}", lambda x: np.sin(scale * x) / scale)


def _hinge(center: float, space: PhaseSpace) -> TestFunction:
    return TestFunction(f"hinge({center:g})", lambda x: np.asarray(space.distance(x, center)))


@dataclass(frozen=True)
class LipschitzTestSet:
    """Finite family of test functions on one phase space."""

    __test__ = False

    functions: Tuple[TestFunction, ...]
    space: PhaseSpace

    def __post_init__(self) -> None:
        if not self.functions:
            raise ConfigurationError("A test set needs at least one function")

    @classmethod
    def canonical(
        cls,
        space: PhaseSpace,
        modes: int = DEFAULTS.trig_modes,
        hinges: int = DEFAULTS.hinge_centers,
    ) -> "LipschitzTestSet":
        """Scaled Fourier modes k = 1..modes plus hinges centered at i/hinges."""
        functions = [_fourier(k, kind) for k in range(1, modes + 1) for kind in ("cos", "sin")]
        functions += [_hinge(i / hinges, space) for i in range(hinges)]
        return cls(tuple(functions), space)

    @classmethod
    def from_functions(
        cls,
        functions: Sequence[Callable[[np.ndarray], ArrayLike]],
        space: PhaseSpace,
        lipschitz: float = 1.0,
    ) -> "LipschitzTestSet":
        wrapped = tuple(
            f if isinstance(f, TestFunction) else TestFunction(getattr(f, "__name__", f"f{i}"), f, lipschitz)
            for i, f in enumerate(functions)
        )
        return cls(wrapped, space)

    def __len__(self) -> int:
        return len(self.functions)

    def __iter__(self) -> Iterator[TestFunction]:
        return iter(self.functions)

    @property
    def lipschitz(self) -> float:
        """Largest declared constant in the class."""
        return max(f.lipschitz for f in self.functions)

    def evaluate(self, x: ArrayLike) -> np.ndarray:
        """Matrix of values, one row per test function."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        return np.vstack([np.broadcast_to(f(x), x.shape) for f in self.functions])

    def certify(self, grid_n: int = DENSE_GRID) -> float:
        """Check every member against its declared constant; returns the largest quotient seen."""
        worst = 0.0
        for f in self.functions:
            worst = max(worst, check_lipschitz(f, f.lipschitz, self.space, grid_n, f.name).ratio)
        return worst


def dual_lower_bound(mu: DiscreteMeasure, nu: DiscreteMeasure, tests: LipschitzTestSet) -> float:
    """max over the test class of |int phi dmu - int phi dnu|; a lower bound on W1 for 1-Lipschitz tests."""
    diff = tests.evaluate(mu.support) @ mu.weights - tests.evaluate(nu.support) @ nu.weights
    return float(np.max(np.abs(diff)))
