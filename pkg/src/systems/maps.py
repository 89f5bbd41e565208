"""
Concrete map families on the interval and the circle.

A MapSpec is an immutable description of T: a family with its parameters, the
phase space it acts on, and a stack of perturbations. Specs are safe to share
between threads; evaluation is vectorized over numpy arrays.
"""

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, List, Mapping, Optional, Tuple

import numpy as np

from src.config import DEFAULTS
from src.errors import ConfigurationError, UnsupportedOperationError
from src.systems.perturbation import PerturbationSpec
from src.systems.phase_space import ArrayLike, PhaseSpace

logger = logging.getLogger(__name__)


class MapFamily(str, Enum):
    """Supported map families."""

    ROTATION = "rotation"
    DOUBLING = "doubling"
    TENT = "tent"
    LOGISTIC = "logistic"
    PIECEWISE_LINEAR = "piecewise_linear"
    IDENTITY = "identity"

    @classmethod
    def parse(cls, name: str) -> "MapFamily":
        try:
            return cls(name.strip().lower())
        except ValueError as e:
            known = ", ".join(member.value for member in cls)
            raise ConfigurationError(f"Unknown map family: {name!r}. Must be one of: {known}") from e


_PARAM_COUNT = {
    MapFamily.ROTATION: 1,
    MapFamily.DOUBLING: 0,
    MapFamily.TENT: 1,
    MapFamily.LOGISTIC: 1,
    MapFamily.IDENTITY: 0,
}

_DEFAULT_SPACE = {
    MapFamily.ROTATION: PhaseSpace.circle(),
    MapFamily.DOUBLING: PhaseSpace.circle(),
    MapFamily.TENT: PhaseSpace.interval(),
    MapFamily.LOGISTIC: PhaseSpace.interval(),
    MapFamily.PIECEWISE_LINEAR: PhaseSpace.interval(),
    MapFamily.IDENTITY: PhaseSpace.interval(),
}


@dataclass(frozen=True)
class LinearPiece:
    """Affine branch y = y0 + slope * (x - x0) on [x0, x1), before reduction into [0, 1)."""

    x0: float
    x1: float
    y0: float
    slope: float

    def at(self, x: float) -> float:
        return self.y0 + self.slope * (x - self.x0)


@dataclass(frozen=True)
class MapSpec:
    """
    Immutable description of a dynamical system T on a one-dimensional phase space.

    Attributes:
        family: map family
        params: real parameters (alpha for rotation, slope for tent, r for logistic)
        space: interval or circle
        breakpoints: node abscissae of a piecewise-linear map
        values: node ordinates of a piecewise-linear map
        perturbations: displacements added to the base map, in order of application
    """

    family: MapFamily
    params: Tuple[float, ...] = ()
    space: PhaseSpace = field(default_factory=PhaseSpace.interval)
    breakpoints: Tuple[float, ...] = ()
    values: Tuple[float, ...] = ()
    perturbations: Tuple[PerturbationSpec, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        object.__setattr__(self, "breakpoints", tuple(float(b) for b in self.breakpoints))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        self._validate()

    def _validate(self) -> None:
        family = self.family
        if family is MapFamily.PIECEWISE_LINEAR:
            xs, ys = np.asarray(self.breakpoints), np.asarray(self.values)
            if len(xs) < 2 or len(xs) != len(ys):
                raise ConfigurationError("Piecewise-linear maps need at least two (breakpoint, value) nodes")
            if xs[0] != 0.0 or xs[-1] != 1.0 or np.any(np.diff(xs) <= 0):
                raise ConfigurationError("Breakpoints must increase strictly from 0 to 1")
            if ys.min() < 0.0 or ys.max() > 1.0:
                raise ConfigurationError("Piecewise-linear values must lie in [0, 1]")
            return

        expected = _PARAM_COUNT[family]
        if len(self.params) != expected:
            raise ConfigurationError(
                f"{family.value} takes {expected} parameter(s), got {len(self.params)}",
                {"family": family.value, "params": self.params},
            )
        if family is MapFamily.TENT and not 0.0 < self.params[0] <= 2.0:
            raise ConfigurationError(f"Tent slope must lie in (0, 2] to keep [0, 1] invariant, got {self.params[0]}")
        if family is MapFamily.LOGISTIC and not 0.0 <= self.params[0] <= 4.0:
            raise ConfigurationError(f"Logistic parameter must lie in [0, 4] to keep [0, 1] invariant, got {self.params[0]}")
        if family is MapFamily.ROTATION and not np.isfinite(self.params[0]):
            raise ConfigurationError("Rotation angle must be finite")

    # Constructors

    @classmethod
    def rotation(cls, alpha: float, space: Optional[PhaseSpace] = None) -> "MapSpec":
        return cls(MapFamily.ROTATION, (alpha,), space or PhaseSpace.circle())

    @classmethod
    def doubling(cls, space: Optional[PhaseSpace] = None) -> "MapSpec":
        return cls(MapFamily.DOUBLING, (), space or PhaseSpace.circle())

    @classmethod
    def tent(cls, slope: float = 2.0, space: Optional[PhaseSpace] = None) -> "MapSpec":
        return cls(MapFamily.TENT, (slope,), space or PhaseSpace.interval())

    @classmethod
    def logistic(cls, r: float = 4.0, space: Optional[PhaseSpace] = None) -> "MapSpec":
        return cls(MapFamily.LOGISTIC, (r,), space or PhaseSpace.interval())

    @classmethod
    def identity(cls, space: Optional[PhaseSpace] = None) -> "MapSpec":
        return cls(MapFamily.IDENTITY, (), space or PhaseSpace.interval())

    @classmethod
    def piecewise_linear(
        cls,
        breakpoints: List[float],
        values: List[float],
        space: Optional[PhaseSpace] = None,
    ) -> "MapSpec":
        return cls(
            MapFamily.PIECEWISE_LINEAR,
            (),
            space or PhaseSpace.interval(),
            breakpoints=tuple(breakpoints),
            values=tuple(values),
        )

    # Properties

    @property
    def label(self) -> str:
        """Stable provenance string, e.g. 'doubling+additive_constant(0.01)@circle'."""
        if self.family is MapFamily.PIECEWISE_LINEAR:
            nodes = ",".join(f"{x:g}:{y:g}" for x, y in zip(self.breakpoints, self.values))
            base = f"{self.family.value}({nodes})"
        elif self.params:
            base = f"{self.family.value}({','.join(f'{p:.12g}' for p in self.params)})"
        else:
            base = self.family.value
        suffix = "".join(f"+{p.label}" for p in self.perturbations)
        return f"{base}{suffix}@{self.space}"

    @property
    def total_shift(self) -> float:
        """Sum of additive-constant perturbations."""
        return float(sum(p.delta for p in self.perturbations if p.is_constant))

    @property
    def _base_invertible(self) -> bool:
        if self.family in (MapFamily.ROTATION, MapFamily.IDENTITY):
            return True
        if self.family is MapFamily.PIECEWISE_LINEAR:
            ys = np.asarray(self.values)
            return bool(ys[0] == 0.0 and ys[-1] == 1.0 and np.all(np.diff(ys) > 0))
        return False

    @property
    def inverse_available(self) -> bool:
        """True when eval_inverse is defined (rotations, identity, increasing PWL homeomorphisms)."""
        if not self._base_invertible:
            return False
        if any(not p.is_constant for p in self.perturbations):
            return False
        # A nonzero shift is a homeomorphism only on the circle; on the interval it is clamped.
        return self.space.is_circle or self.total_shift == 0.0

    @property
    def is_piecewise_linear(self) -> bool:
        if self.family is MapFamily.LOGISTIC:
            return False
        return all(p.is_constant for p in self.perturbations)

    # Evaluation

    def _base(self, x: np.ndarray) -> np.ndarray:
        family = self.family
        if family is MapFamily.ROTATION:
            return x + self.params[0]
        if family is MapFamily.DOUBLING:
            return 2.0 * x
        if family is MapFamily.TENT:
            return self.params[0] * np.minimum(x, 1.0 - x)
        if family is MapFamily.LOGISTIC:
            return self.params[0] * x * (1.0 - x)
        if family is MapFamily.PIECEWISE_LINEAR:
            return np.interp(x, self.breakpoints, self.values)
        if family is MapFamily.IDENTITY:
            return x.copy()
        raise ConfigurationError(f"Unknown map family: {family}")

    def raw(self, x: ArrayLike) -> np.ndarray:
        """base(x) + displacements, before reduction into [0, 1)."""
        x = np.asarray(x, dtype=float)
        y = self._base(x)
        for pert in self.perturbations:
            y = y + pert.displacement(x, self.space)
        return y

    def evaluate(self, x: ArrayLike) -> ArrayLike:
        """T(x) in [0, 1)."""
        return self.space.normalize(self.raw(x))

    def evaluate_inverse(self, y: ArrayLike) -> ArrayLike:
        """T^{-1}(y); raises UnsupportedOperationError for non-invertible specs."""
        if not self.inverse_available:
            raise UnsupportedOperationError(
                f"{self.label} is not invertible; two-sided statistics fall back to one-sided ones",
                {"map": self.label},
            )
        z = np.asarray(y, dtype=float) - self.total_shift
        if self.family is MapFamily.ROTATION:
            z = z - self.params[0]
        elif self.family is MapFamily.PIECEWISE_LINEAR:
            z = np.interp(np.asarray(self.space.normalize(z)), self.values, self.breakpoints)
        return self.space.normalize(z)

    def linear_pieces(self) -> Optional[List[LinearPiece]]:
        """
        Affine branches of the (unreduced) map, or None when the map is not piecewise linear.

        Additive-constant perturbations shift every branch; reduction mod 1 or
        clamping is left to the caller.
        """
        if not self.is_piecewise_linear:
            return None

        shift = self.total_shift
        family = self.family
        if family is MapFamily.ROTATION:
            pieces = [LinearPiece(0.0, 1.0, self.params[0], 1.0)]
        elif family is MapFamily.DOUBLING:
            pieces = [LinearPiece(0.0, 1.0, 0.0, 2.0)]
        elif family is MapFamily.IDENTITY:
            pieces = [LinearPiece(0.0, 1.0, 0.0, 1.0)]
        elif family is MapFamily.TENT:
            s = self.params[0]
            pieces = [LinearPiece(0.0, 0.5, 0.0, s), LinearPiece(0.5, 1.0, 0.5 * s, -s)]
        else:
            xs, ys = self.breakpoints, self.values
            pieces = [
                LinearPiece(xs[i], xs[i + 1], ys[i], (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]))
                for i in range(len(xs) - 1)
            ]
        return [replace(piece, y0=piece.y0 + shift) for piece in pieces]

    # Serialization

    def to_config(self) -> Dict[str, str]:
        """Flat key = value mapping (keys: family, params, space, perturbation.*)."""
        if self.family is MapFamily.PIECEWISE_LINEAR:
            params = ", ".join(f"{x!r}:{y!r}" for x, y in zip(self.breakpoints, self.values))
        else:
            params = ", ".join(repr(p) for p in self.params)
        config = {"family": self.family.value, "params": params, "space": str(self.space)}
        if len(self.perturbations) > 1:
            raise ConfigurationError("Only a single perturbation can be written to a config")
        if self.perturbations:
            config.update(self.perturbations[0].to_config())
        return config

    @classmethod
    def from_config(cls, config: Mapping[str, Any]) -> "MapSpec":
        """Build a spec (and apply its perturbation, if any) from a flat mapping."""
        if "family" not in config:
            raise ConfigurationError("Missing required key 'family'")
        family = MapFamily.parse(str(config["family"]))
        space = PhaseSpace.parse(str(config["space"])) if config.get("space") else _DEFAULT_SPACE[family]
        raw_params = str(config.get("params", "") or "").strip()
        tokens = [tok.strip() for tok in raw_params.replace(";", ",").split(",") if tok.strip()]

        try:
            if family is MapFamily.PIECEWISE_LINEAR:
                nodes = [tok.split(":") for tok in tokens]
                if any(len(node) != 2 for node in nodes):
                    raise ConfigurationError("piecewise_linear params must be 'x:y' pairs")
                spec = cls.piecewise_linear(
                    [float(x) for x, _ in nodes], [float(y) for _, y in nodes], space
                )
            else:
                spec = cls(family, tuple(float(tok) for tok in tokens), space)
        except ValueError as e:
            if isinstance(e, ConfigurationError):
                raise
            raise ConfigurationError(f"Invalid params for {family.value}: {raw_params!r}") from e

        if any(key.startswith("perturbation.") for key in config):
            spec = perturb(spec, PerturbationSpec.from_config(config))
        return spec


def eval_map(spec: MapSpec, x: ArrayLike) -> ArrayLike:
    """Evaluate T(x); always returns points in [0, 1)."""
    return spec.evaluate(x)


def eval_inverse(spec: MapSpec, x: ArrayLike) -> ArrayLike:
    """Evaluate T^{-1}(x) for invertible specs."""
    return spec.evaluate_inverse(x)


def perturb(spec: MapSpec, pert: PerturbationSpec) -> MapSpec:
    """
    Construct S = T + displacement.

    Rotations absorb additive constants into the angle. On the interval an
    unclamped perturbation whose raw image leaves the closed interval [0, 1]
    is rejected; a raw value of exactly 1 is accepted and `evaluate` stores it
    as UPPER_POINT, one ulp below 1, like every other interval image.

    Args:
        spec: base map T
        pert: displacement to add

    Returns:
        The perturbed spec (the input itself when the amplitude is zero)

    Raises:
        ConfigurationError: unclamped perturbation leaving the interval
    """
    if pert.amplitude == 0.0:
        return spec

    if spec.family is MapFamily.ROTATION and pert.is_constant:
        return replace(spec, params=(spec.params[0] + pert.delta,))

    candidate = replace(spec, perturbations=spec.perturbations + (pert,))
    if not spec.space.is_circle and not pert.clamp:
        grid = np.linspace(0.0, 1.0, DEFAULTS.c0_grid + 1)
        raw = candidate.raw(grid)
        if raw.min() < 0.0 or raw.max() > 1.0:
            raise ConfigurationError(
                f"Perturbation {pert.label} moves {spec.label} out of [0, 1]; enable clamping or reduce the amplitude",
                {"min": float(raw.min()), "max": float(raw.max())},
            )

    logger.debug(f"Perturbed {spec.label} by {pert.label}")
    return candidate
