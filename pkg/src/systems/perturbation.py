"""
Perturbation operators: displacements added to a base map.

A perturbed map evaluates as x -> base(x) + displacement(x), reduced mod 1 on
the circle and clamped on the interval. The sup-norm of the displacement is
the declared amplitude.
"""

from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Dict, Mapping

import numpy as np

from src.errors import ConfigurationError
from src.systems.phase_space import ArrayLike, PhaseSpace


class PerturbationKind(str, Enum):
    """Shape of the displacement."""

    ADDITIVE_CONSTANT = "additive_constant"
    SMOOTH_BUMP = "smooth_bump"


def smooth_bump_profile(t: ArrayLike) -> ArrayLike:
    """C-infinity bump exp(1 - 1/(1 - t^2)) on |t| < 1, zero elsewhere; equals 1 at t = 0."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    inside = np.abs(t) < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - t[inside] ** 2))
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class PerturbationSpec:
    """
    Displacement added to a base map.

    Attributes:
        kind: additive_constant or smooth_bump
        delta: signed amplitude; |delta| is the sup-norm of the displacement
        center: bump center (smooth_bump only)
        width: bump half-width (smooth_bump only)
        clamp: on the interval, clamp images into [0, 1); when False a
            perturbation that leaves the interval is rejected
    """

    kind: PerturbationKind = PerturbationKind.ADDITIVE_CONSTANT
    delta: float = 0.0
    center: float = 0.5
    width: float = 0.1
    clamp: bool = True

    def __post_init__(self) -> None:
        if not np.isfinite(self.delta):
            raise ConfigurationError(f"Perturbation amplitude must be finite, got {self.delta}")
        if self.kind is PerturbationKind.SMOOTH_BUMP:
            if not 0.0 < self.width <= 0.5:
                raise ConfigurationError(f"Bump width must lie in (0, 1/2], got {self.width}")
            if not 0.0 <= self.center <= 1.0:
                raise ConfigurationError(f"Bump center must lie in [0, 1], got {self.center}")

    @classmethod
    def additive(cls, delta: float, clamp: bool = True) -> "PerturbationSpec":
        return cls(PerturbationKind.ADDITIVE_CONSTANT, delta=delta, clamp=clamp)

    @classmethod
    def bump(cls, center: float, width: float, delta: float, clamp: bool = True) -> "PerturbationSpec":
        return cls(PerturbationKind.SMOOTH_BUMP, delta=delta, center=center, width=width, clamp=clamp)

    @property
    def amplitude(self) -> float:
        """Declared sup-norm of the displacement."""
        return abs(self.delta)

    @property
    def is_constant(self) -> bool:
        return self.kind is PerturbationKind.ADDITIVE_CONSTANT

    def with_amplitude(self, delta: float) -> "PerturbationSpec":
        """Same shape, different amplitude (used by delta sweeps)."""
        return replace(self, delta=delta)

    def displacement(self, x: ArrayLike, space: PhaseSpace) -> ArrayLike:
        """Displacement added to the base map at x."""
        x = np.asarray(x, dtype=float)
        if self.is_constant:
            out = np.full_like(x, self.delta)
        else:
            t = np.asarray(space.distance(x, self.center)) / self.width
            out = self.delta * np.asarray(smooth_bump_profile(t))
        return out if out.ndim else float(out)

    @property
    def label(self) -> str:
        if self.is_constant:
            return f"{self.kind.value}({self.delta:g})"
        return f"{self.kind.value}({self.center:g},{self.width:g},{self.delta:g})"

    def to_config(self) -> Dict[str, str]:
        """Flat config mapping under the `perturbation.` prefix."""
        config = {
            "perturbation.kind": self.kind.value,
            "perturbation.amplitude": repr(self.delta),
            "perturbation.clamp": "true" if self.clamp else "false",
        }
        if not self.is_constant:
            config["perturbation.center"] = repr(self.center)
            config["perturbation.width"] = repr(self.width)
        return config

    @classmethod
    def from_config(cls, config: Mapping[str, Any]) -> "PerturbationSpec":
        """Inverse of `to_config`; missing shape keys take their defaults."""
        try:
            kind = PerturbationKind(str(config.get("perturbation.kind", "additive_constant")).strip())
        except ValueError as e:
            raise ConfigurationError(
                f"Unknown perturbation kind: {config.get('perturbation.kind')!r}. "
                "Must be one of: additive_constant, smooth_bump"
            ) from e
        try:
            return cls(
                kind=kind,
                delta=float(config.get("perturbation.amplitude", 0.0)),
                center=float(config.get("perturbation.center", 0.5)),
                width=float(config.get("perturbation.width", 0.1)),
                clamp=str(config.get("perturbation.clamp", "true")).strip().lower() in ("true", "1", "yes"),
            )
        except (TypeError, ValueError) as e:
            if isinstance(e, ConfigurationError):
                raise
            raise ConfigurationError(f"Invalid perturbation parameters: {e}") from e
