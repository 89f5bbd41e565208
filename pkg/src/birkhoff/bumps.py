"""
Smooth cutoffs and the Lipschitz functions built from them.

eta(t) equals 1 for t <= 1 - alpha, 0 for t >= 1, and decreases smoothly in
between with slope strictly inside (-2/alpha, 0). From eta we build
  psi(x)    = eta(rho(x, orbit closure) / sigma)        (Lipschitz 2/(alpha sigma))
  chi+(x)   = eta(rho(x, closure of V) / beta)
  chi-(x)   = 1 - eta(rho(x, complement of V) / beta)
which sandwich the indicator of an open set V: chi+ >= 1_V >= chi-.
"""

import logging
import re
from dataclasses import dataclass
from typing import Callable, List, NamedTuple, Sequence, Tuple, Union

import numpy as np

from src.config import DEFAULTS
from src.errors import ConfigurationError
from src.systems.orbits import OrbitClosure, OrbitSegment
from src.systems.phase_space import ArrayLike, PhaseSpace

logger = logging.getLogger(__name__)

# exp(-c/u) transition; c = 1/2 keeps the peak slope near 1.54/alpha.
TRANSITION_SHARPNESS = 0.5
_INTERVAL_PATTERN = re.compile(r"\(\s*([^,()]+?)\s*,\s*([^,()]+?)\s*\)")


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 0.5:
        raise ConfigurationError(f"alpha must lie in (0, 1/2), got {alpha}")


def _edge(u: np.ndarray) -> np.ndarray:
    out = np.zeros_like(u)
    positive = u > 0.0
    out[positive] = np.exp(-TRANSITION_SHARPNESS / u[positive])
    return out


def bump_eta(t: ArrayLike, alpha: float = DEFAULTS.alpha) -> ArrayLike:
    """
    Smooth step from 1 (t <= 1 - alpha) down to 0 (t >= 1).

    Args:
        t: argument, scalar or array
        alpha: transition width in (0, 1/2)

    Raises:
        ConfigurationError: alpha outside (0, 1/2)
    """
    _check_alpha(alpha)
    t_arr = np.asarray(t, dtype=float)
    s = np.clip((1.0 - t_arr) / alpha, 0.0, 1.0)
    rising, falling = _edge(s), _edge(1.0 - s)
    out = np.where(s >= 1.0, 1.0, np.where(s <= 0.0, 0.0, rising / np.where(s > 0, rising + falling, 1.0)))
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class BumpSpec:
    """
    Shape parameter alpha and neighborhood radius sigma of psi.

    Attributes:
        alpha: transition width in (0, 1/2)
        sigma: neighborhood radius (> 0)
    """

    alpha: float = DEFAULTS.alpha
    sigma: float = 0.05

    def __post_init__(self) -> None:
        _check_alpha(self.alpha)
        if not self.sigma > 0.0:
            raise ConfigurationError(f"sigma must be positive, got {self.sigma}")

    @property
    def lipschitz_bound(self) -> float:
        """L0 = 2 / (alpha sigma)."""
        return 2.0 / (self.alpha * self.sigma)

    def eta(self, t: ArrayLike) -> ArrayLike:
        return bump_eta(t, self.alpha)


def _closure(orbit_sample: Union[OrbitSegment, OrbitClosure]) -> OrbitClosure:
    return orbit_sample if isinstance(orbit_sample, OrbitClosure) else orbit_sample.closure


def psi(x: ArrayLike, orbit_sample: Union[OrbitSegment, OrbitClosure], bump: BumpSpec) -> ArrayLike:
    """eta(rho(x, sample) / sigma): 1 within (1 - alpha) sigma of the sample, 0 beyond sigma."""
    distance = _closure(orbit_sample).distance(x)
    return bump.eta(np.asarray(distance) / bump.sigma)


def psi_function(orbit_sample: Union[OrbitSegment, OrbitClosure], bump: BumpSpec) -> Callable[[ArrayLike], ArrayLike]:
    closure = _closure(orbit_sample)
    return lambda x: psi(x, closure, bump)


@dataclass(frozen=True)
class IntervalUnion:
    """
    Finite union of open intervals of the phase space.

    Intervals are stored as merged (start, length) pairs. On the circle they
    may wrap through 0; on the interval, parts outside [0, 1] are ignored
    (an interval starting below 0 is relatively open and contains 0).
    """

    intervals: Tuple[Tuple[float, float], ...]
    space: PhaseSpace

    @classmethod
    def from_bounds(cls, bounds: Sequence[Tuple[float, float]], space: PhaseSpace) -> "IntervalUnion":
        """
        Build the union of the open intervals (a, b).

        Raises:
            ConfigurationError: empty union, degenerate intervals, or a union covering the whole space
        """
        pieces: List[Tuple[float, float]] = []
        for a, b in bounds:
            a, b = float(a), float(b)
            if not b > a:
                raise ConfigurationError(f"Interval ({a}, {b}) is empty")
            if space.is_circle:
                if b - a >= 1.0:
                    raise ConfigurationError("V must be a proper subset of the circle")
                start = a % 1.0
                pieces.append((start, start + (b - a)))
            else:
                lo, hi = max(a, -1.0), min(b, 2.0)
                if hi <= 0.0 or lo >= 1.0:
                    continue
                pieces.append((lo, hi))
        if not pieces:
            raise ConfigurationError("V must be a nonempty open set")

        pieces.sort()
        merged = [list(pieces[0])]
        for lo, hi in pieces[1:]:
            if lo < merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], hi)
            else:
                merged.append([lo, hi])
        if space.is_circle and len(merged) > 1 and merged[-1][1] - 1.0 > merged[0][0]:
            first = merged.pop(0)
            merged[-1][1] = max(merged[-1][1], first[1] + 1.0)

        for lo, hi in merged:
            full = hi - lo >= 1.0 if space.is_circle else (lo < 0.0 and hi > 1.0)
            if full:
                raise ConfigurationError("V must be a proper subset of the phase space")
        return cls(tuple((lo, hi - lo) for lo, hi in merged), space)

    @classmethod
    def parse(cls, text: str, space: PhaseSpace) -> "IntervalUnion":
        """Parse '(a, b)' groups, e.g. '(-0.1, 0.1)' or '(0.1, 0.2) (0.5, 0.6)'."""
        matches = _INTERVAL_PATTERN.findall(text)
        if not matches:
            raise ConfigurationError(f"Cannot parse open set {text!r}; expected groups like '(0.1, 0.2)'")
        try:
            bounds = [(float(a), float(b)) for a, b in matches]
        except ValueError as e:
            raise ConfigurationError(f"Invalid interval bound in {text!r}") from e
        return cls.from_bounds(bounds, space)

    def _offsets(self, x: ArrayLike) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        starts = np.array([a for a, _ in self.intervals])
        lengths = np.array([length for _, length in self.intervals])
        offsets = x[:, None] - starts[None, :]
        if self.space.is_circle:
            offsets = np.mod(offsets, 1.0)
        return offsets, starts, lengths

    def contains(self, x: ArrayLike) -> ArrayLike:
        """Membership in V, vectorized."""
        shape = np.shape(x)
        offsets, _, lengths = self._offsets(x)
        inside = np.any((offsets > 0.0) & (offsets < lengths[None, :]), axis=1)
        return inside.reshape(shape) if shape else bool(inside[0])

    def indicator(self, x: ArrayLike) -> ArrayLike:
        out = np.asarray(self.contains(x), dtype=float)
        return out if out.ndim else float(out)

    def distance_to_closure(self, x: ArrayLike) -> ArrayLike:
        """rho(x, closure of V)."""
        shape = np.shape(x)
        offsets, starts, lengths = self._offsets(x)
        xs = np.atleast_1d(np.asarray(x, dtype=float))[:, None]
        if self.space.is_circle:
            to_ends = np.minimum(offsets, 1.0 - offsets)
            to_ends = np.minimum(to_ends, np.asarray(self.space.distance(xs, starts + lengths)))
        else:
            lo, hi = np.maximum(starts, 0.0), np.minimum(starts + lengths, 1.0)
            to_ends = np.minimum(np.abs(xs - lo), np.abs(xs - hi))
        inside = (offsets >= 0.0) & (offsets <= lengths[None, :])
        d = np.where(inside, 0.0, to_ends).min(axis=1)
        return d.reshape(shape) if shape else float(d[0])

    def distance_to_complement(self, x: ArrayLike) -> ArrayLike:
        """rho(x, K minus V); zero outside V."""
        shape = np.shape(x)
        offsets, starts, lengths = self._offsets(x)
        inside = (offsets > 0.0) & (offsets < lengths[None, :])
        if self.space.is_circle:
            depth = np.minimum(offsets, lengths[None, :] - offsets)
        else:
            # Ends outside [0, 1] are not boundary points of V inside K.
            left = np.where(starts[None, :] >= 0.0, offsets, np.inf)
            right = np.where(starts[None, :] + lengths[None, :] <= 1.0, lengths[None, :] - offsets, np.inf)
            depth = np.minimum(left, right)
        d = np.where(inside, depth, 0.0).max(axis=1)
        return d.reshape(shape) if shape else float(d[0])


class ChiFunctions(NamedTuple):
    """Lipschitz envelopes of the indicator of V: plus >= indicator >= minus."""

    plus: Callable[[ArrayLike], ArrayLike]
    minus: Callable[[ArrayLike], ArrayLike]
    indicator: Callable[[ArrayLike], ArrayLike]


def chi_functions(V: IntervalUnion, beta: float, alpha: float = DEFAULTS.alpha) -> ChiFunctions:
    """
    Build chi+ (1 on the closure of V, 0 beyond distance beta) and chi- (1 deeper than beta inside V, 0 outside V).

    Raises:
        ConfigurationError: beta <= 0 or alpha out of range
    """
    if not beta > 0.0:
        raise ConfigurationError(f"beta must be positive, got {beta}")
    _check_alpha(alpha)

    def plus(x: ArrayLike) -> ArrayLike:
        return bump_eta(np.asarray(V.distance_to_closure(x)) / beta, alpha)

    def minus(x: ArrayLike) -> ArrayLike:
        out = 1.0 - np.asarray(bump_eta(np.asarray(V.distance_to_complement(x)) / beta, alpha))
        return out if out.ndim else float(out)

    return ChiFunctions(plus, minus, V.indicator)
