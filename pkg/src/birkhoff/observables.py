"""
Named observables for experiment configs.

Text of the form `[scale*]name[(arg)]`, e.g. `cos(1)`, `0.159*sin(1)`,
`dist(0)`, `const(0.3)` or `x`, becomes a TestFunction carrying its Lipschitz
constant. Several observables are separated by `;`.
"""

import math
import re
from typing import List

import numpy as np

from src.errors import ConfigurationError
from src.measures.lipschitz import TestFunction
from src.systems.phase_space import PhaseSpace

_OBSERVABLE_PATTERN = re.compile(
    r"^\s*(?:(?P<scale>[-+]?[0-9.eE+-]+)\s*\*\s*)?(?P<name>[a-z_]+)\s*(?:\(\s*(?P<arg>[^()]*?)\s*\))?\s*$"
)
KNOWN_OBSERVABLES = ("cos", "sin", "dist", "const", "x")


def _base(name: str, arg: float, space: PhaseSpace) -> TestFunction:
    if name in ("cos", "sin"):
        if arg != int(arg) or arg < 1:
            raise ConfigurationError(f"{name}(k) needs a positive integer frequency, got {arg:g}")
        omega = 2.0 * math.pi * int(arg)
        trig = np.cos if name == "cos" else np.sin
        return TestFunction(f"{name}({int(arg)})", lambda x: trig(omega * x), omega)
    if name == "dist":
        return TestFunction(f"dist({arg:g})", lambda x: np.asarray(space.distance(x, arg)), 1.0)
    if name == "const":
        return TestFunction(f"const({arg:g})", lambda x: np.full(np.shape(x), arg), 0.0)
    if space.is_circle:
        raise ConfigurationError("The coordinate observable x is discontinuous on the circle")
    return TestFunction("x", lambda x: np.asarray(x, dtype=float), 1.0)


def parse_observable(text: str, space: PhaseSpace) -> TestFunction:
    """
    Parse one observable.

    Raises:
        ConfigurationError: unknown name or malformed argument
    """
    match = _OBSERVABLE_PATTERN.match(text)
    if not match or match.group("name") not in KNOWN_OBSERVABLES:
        raise ConfigurationError(
            f"Cannot parse observable {text!r}; expected [scale*]name(arg) with name in {', '.join(KNOWN_OBSERVABLES)}"
        )
    name, raw_arg, raw_scale = match.group("name"), match.group("arg"), match.group("scale")
    if (name == "x") != (raw_arg is None):
        raise ConfigurationError(f"Observable {name} {'takes no' if name == 'x' else 'needs an'} argument")
    try:
        arg = float(raw_arg) if raw_arg is not None else 0.0
        scale = float(raw_scale) if raw_scale is not None else 1.0
    except ValueError as e:
        raise ConfigurationError(f"Invalid number in observable {text!r}") from e

    base = _base(name, arg, space)
    if raw_scale is None:
        return base
    return TestFunction(f"{scale!r}*{base.name}", lambda x: scale * base(x), abs(scale) * base.lipschitz)


def parse_observables(text: str, space: PhaseSpace) -> List[TestFunction]:
    """Parse a `;`-separated list of observables."""
    parts = [part for part in text.split(";") if part.strip()]
    if not parts:
        raise ConfigurationError("Expected at least one observable")
    return [parse_observable(part, space) for part in parts]
