"""
Experiment config files.

A config is a flat `key = value` file (the dotenv grammar, parsed with
python-dotenv's stream parser) whose keys may be grouped under `[section]`
headers:

    experiment = cesaro_search
    seed = 0

    [map]
    family = doubling

    [perturbation]
    kind = additive_constant
    amplitude = 0.01

    [search]
    p = 0
    phi = cos(1)
    eps = 0.1
    sigma = 0.05

Parsing collects every problem as a line-referenced Diagnostic instead of
stopping at the first one; `validate_config` returns them and
`parse_config` raises ConfigValidationError when there are any. Both run the
same checks, including building the maps, measures and observables, so a
config that validates cleanly is accepted by the runner.
"""

import hashlib
import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from io import StringIO
from typing import Any, Callable, Dict, List, Optional, Tuple

from dotenv.parser import Original, parse_stream

from src.birkhoff.bumps import IntervalUnion
from src.birkhoff.observables import parse_observable, parse_observables
from src.errors import ConfigurationError, LabError
from src.measures.discrete import DiscreteMeasure
from src.measures.lipschitz import TestFunction, check_lipschitz
from src.systems.maps import MapSpec, perturb
from src.systems.perturbation import PerturbationSpec
from src.systems.phase_space import PhaseSpace
from src.ulam.grid import Grid
from src.ulam.transfer import UlamMethod

logger = logging.getLogger(__name__)

_SECTION_PATTERN = re.compile(r"^\[\s*([A-Za-z_][A-Za-z0-9_]*)\s*\]$")
_TRUE = ("true", "1", "yes")
_FALSE = ("false", "0", "no")

# Keys that do not change results and are left out of the config digest.
_UNHASHED = frozenset({"seed", "threads", "output.name"})


class ExperimentKind(str, Enum):
    ULAM = "ulam"
    WASSERSTEIN = "wasserstein"
    HAUSDORFF = "hausdorff"
    BIRKHOFF = "birkhoff"
    SEMICONTINUITY = "semicontinuity"
    CONTINUITY_PROBE = "continuity_probe"
    CESARO_SEARCH = "cesaro_search"
    VISIT_SEARCH = "visit_search"
    LIPSCHITZ_SWEEP = "lipschitz_sweep"


@dataclass(frozen=True)
class Diagnostic:
    """One problem found in a config, pointing at the offending line when there is one."""

    source: str
    line: Optional[int]
    key: str
    message: str

    def __str__(self) -> str:
        where = f"{self.source}:{self.line}" if self.line is not None else self.source
        return f"{where}: {self.key}: {self.message}" if self.key else f"{where}: {self.message}"


class ConfigValidationError(ConfigurationError):
    """Raised by parse_config; carries every diagnostic found."""

    def __init__(self, diagnostics: List[Diagnostic]):
        super().__init__(
            f"{len(diagnostics)} problem(s) in experiment config",
            {"diagnostics": [str(d) for d in diagnostics]},
        )
        self.diagnostics = diagnostics


@dataclass(frozen=True)
class KeySpec:
    """Type and admissible range of one config key."""

    key: str
    kind: str = "float"  # str, text (may be empty), int, float, bool, floats
    check: Optional[Callable[[Any], bool]] = None
    expects: str = ""


def _spec(key: str, kind: str = "float", check: Optional[Callable[[Any], bool]] = None, expects: str = "") -> KeySpec:
    return KeySpec(key, kind, check, expects)


_COMMON = [
    _spec("experiment", "str"),
    _spec("seed", "int", lambda v: v >= 0, "an integer >= 0"),
    _spec("threads", "int", lambda v: v >= 1, "an integer >= 1"),
    _spec("output.name", "str", lambda v: re.fullmatch(r"[A-Za-z0-9_.-]+", v) is not None, "a plain file stem"),
]
_MAP = [
    _spec("map.family", "str"),
    _spec("map.params", "text"),
    _spec("map.space", "str"),
    _spec("perturbation.kind", "str"),
    _spec("perturbation.amplitude", "float"),
    _spec("perturbation.center", "float", lambda v: 0.0 <= v <= 1.0, "a value in [0, 1]"),
    _spec("perturbation.width", "float", lambda v: 0.0 < v <= 0.5, "a value in (0, 1/2]"),
    _spec("perturbation.clamp", "bool"),
]
_GRID = [
    _spec("grid.n", "int", lambda v: v >= 2, "an integer >= 2"),
    _spec("grid.method", "str"),
    _spec("grid.jitter", "bool"),
    _spec("grid.hull", "bool"),
]
_SWEEP = [
    _spec("sweep.deltas", "floats", lambda v: all(d >= 0.0 for d in v), "nonnegative amplitudes"),
]
_PROBE = [
    _spec("probe.floor", "float", lambda v: v >= 0.0, "a value >= 0"),
]
_MEASURES = [
    _spec("measures.space", "str"),
    _spec("measures.mu", "str"),
    _spec("measures.nu", "str"),
]
_ORBIT = [
    _spec("orbit.p", "float", lambda v: 0.0 <= v <= 1.0, "a point in [0, 1]"),
    _spec("orbit.phi", "str"),
    _spec("orbit.horizon", "int", lambda v: v >= 100, "an integer >= 100"),
    _spec("orbit.window", "float", lambda v: 0.0 < v <= 0.5, "a fraction in (0, 1/2]"),
    _spec("orbit.two_sided", "bool"),
    _spec("orbit.cycle_tol", "float", lambda v: v >= 0.0, "a value >= 0"),
]
_SEARCH = [
    _spec("search.p", "float", lambda v: 0.0 <= v <= 1.0, "a point in [0, 1]"),
    _spec("search.phi", "str"),
    _spec("search.eps", "float", lambda v: 0.0 < v < 1.0, "a value in (0, 1)"),
    _spec("search.sigma", "float", lambda v: v > 0.0, "a value > 0"),
    _spec("search.horizon", "int", lambda v: v >= 1000, "an integer >= 1000"),
    _spec("search.window", "float", lambda v: 0.0 < v <= 0.5, "a fraction in (0, 1/2]"),
    _spec("search.candidates", "int", lambda v: v >= 1, "an integer >= 1"),
    _spec("search.max_period", "int", lambda v: 0 <= v <= 8, "an integer in [0, 8]"),
    _spec("search.ulam_grid", "int", lambda v: v >= 2, "an integer >= 2"),
    _spec("search.cycle_tol", "float", lambda v: v >= 0.0, "a value >= 0"),
    _spec("search.deltas", "floats", lambda v: all(d >= 0.0 for d in v), "nonnegative amplitudes"),
]
_VISIT = [
    _spec("visit.set", "str"),
    _spec("visit.beta", "float", lambda v: v > 0.0, "a value > 0"),
    _spec("bump.alpha", "float", lambda v: 0.0 < v < 0.5, "a value in (0, 1/2)"),
]
_LIPSCHITZ = [
    _spec("lipschitz.L", "float", lambda v: v > 0.0, "a value > 0"),
    _spec("lipschitz.family", "str"),
]

_SCHEMA: Dict[ExperimentKind, Tuple[List[KeySpec], Tuple[str, ...]]] = {
    ExperimentKind.ULAM: (_MAP + _GRID, ("map.family", "grid.n")),
    ExperimentKind.WASSERSTEIN: (_MEASURES, ("measures.mu", "measures.nu")),
    ExperimentKind.HAUSDORFF: (_MAP + _GRID, ("map.family", "grid.n")),
    ExperimentKind.BIRKHOFF: (_MAP + _ORBIT, ("map.family", "orbit.p", "orbit.phi")),
    ExperimentKind.SEMICONTINUITY: (_MAP + _GRID + _SWEEP, ("map.family", "grid.n", "sweep.deltas")),
    ExperimentKind.CONTINUITY_PROBE: (_MAP + _GRID + _SWEEP + _PROBE, ("map.family", "grid.n", "sweep.deltas")),
    ExperimentKind.CESARO_SEARCH: (
        _MAP + _SEARCH,
        ("map.family", "search.p", "search.phi", "search.eps", "search.sigma"),
    ),
    ExperimentKind.VISIT_SEARCH: (
        _MAP + _SEARCH + _VISIT,
        ("map.family", "search.p", "search.eps", "search.sigma", "visit.set", "visit.beta"),
    ),
    ExperimentKind.LIPSCHITZ_SWEEP: (
        _MAP + _SEARCH + _LIPSCHITZ,
        ("map.family", "search.p", "search.eps", "search.sigma", "lipschitz.L", "lipschitz.family"),
    ),
}


@dataclass
class ExperimentConfig:
    """
    A validated experiment config.

    Attributes:
        experiment: which driver to run
        source: file name used in diagnostics
        raw: normalized string values by full key
        values: typed values by full key
        lines: line of every key
        map_spec: T (without perturbation), for map-based experiments
        perturbation: the perturbation shape, if one was given
        measures: mu and nu of a wasserstein config
        observables: phi (or the family) of search and birkhoff configs
        open_set: V of a visit search
    """

    experiment: ExperimentKind
    source: str = "<config>"
    raw: Dict[str, str] = field(default_factory=dict)
    values: Dict[str, Any] = field(default_factory=dict)
    lines: Dict[str, int] = field(default_factory=dict)
    map_spec: Optional[MapSpec] = None
    perturbation: Optional[PerturbationSpec] = None
    measures: Tuple[DiscreteMeasure, ...] = ()
    observables: Tuple[TestFunction, ...] = ()
    open_set: Optional[IntervalUnion] = None

    def get(self, key: str, default: Any = None) -> Any:
        return self.values.get(key, default)

    @property
    def seed(self) -> int:
        return int(self.values.get("seed", 0))

    @property
    def name(self) -> str:
        return str(self.values.get("output.name", self.experiment.value))

    @property
    def perturbed_map(self) -> MapSpec:
        """S = T + perturbation (T itself when no perturbation was given)."""
        if self.map_spec is None:
            raise ConfigurationError(f"{self.experiment.value} configs have no map")
        return perturb(self.map_spec, self.perturbation) if self.perturbation else self.map_spec

    @property
    def grid(self) -> Grid:
        return Grid(int(self.values["grid.n"]), self.map_spec.space)

    def ulam_method(self, seed: Optional[int] = None) -> UlamMethod:
        return UlamMethod.parse(
            str(self.values.get("grid.method", "auto")),
            jitter=bool(self.values.get("grid.jitter", False)),
            seed=self.seed if seed is None else seed,
        )

    def normalized(self) -> str:
        """Canonical text of the result-relevant keys: sorted `key = value` lines."""
        return "".join(f"{key} = {self.raw[key]}\n" for key in sorted(self.raw) if key not in _UNHASHED)

    def digest(self) -> str:
        return hashlib.sha256(self.normalized().encode("utf-8")).hexdigest()


def _binding_line(original: Original) -> int:
    """Line of the key itself; the parser's mark sits before any leading blank lines."""
    text = original.string
    return original.line + text[: len(text) - len(text.lstrip())].count("\n")


_KIND_NAMES = {"int": "an integer", "float": "a number", "floats": "a comma-separated list of numbers"}


def _convert(spec: KeySpec, raw: str) -> Any:
    """Typed value of a raw string; ValueError messages are user-facing."""
    value: Any
    if spec.kind in ("str", "text"):
        if spec.kind == "str" and not raw:
            raise ValueError("must not be empty")
        value = raw
    elif spec.kind == "bool":
        lowered = raw.lower()
        if lowered not in _TRUE + _FALSE:
            raise ValueError(f"must be true or false, got {raw!r}")
        value = lowered in _TRUE
    else:
        try:
            if spec.kind == "int":
                value = int(raw)
            elif spec.kind == "float":
                value = float(raw)
            else:
                value = [float(part.strip()) for part in raw.split(",") if part.strip()]
                if not value:
                    raise ValueError(raw)
        except ValueError:
            raise ValueError(f"expected {_KIND_NAMES[spec.kind]}, got {raw!r}") from None
    if spec.check is not None and not spec.check(value):
        raise ValueError(f"must be {spec.expects}, got {raw}")
    return value


def _parse_atoms(text: str, space: PhaseSpace) -> DiscreteMeasure:
    """'x1:w1, x2:w2, ...' into a measure."""
    try:
        atoms = [tuple(float(part) for part in token.split(":")) for token in text.split(",") if token.strip()]
    except ValueError as e:
        raise ConfigurationError(f"Atoms must be 'point:weight' pairs, got {text!r}") from e
    if not atoms or any(len(atom) != 2 for atom in atoms):
        raise ConfigurationError(f"Atoms must be 'point:weight' pairs, got {text!r}")
    return DiscreteMeasure.from_atoms([x for x, _ in atoms], [w for _, w in atoms], space)


class _Collector:
    def __init__(self, source: str):
        self.source = source
        self.diagnostics: List[Diagnostic] = []

    def add(self, line: Optional[int], key: str, message: str) -> None:
        self.diagnostics.append(Diagnostic(self.source, line, key, message))


def _read_entries(text: str, collector: _Collector) -> Tuple[Dict[str, str], Dict[str, int]]:
    raw: Dict[str, str] = {}
    lines: Dict[str, int] = {}
    section = ""
    for binding in parse_stream(StringIO(text)):
        line = _binding_line(binding.original)
        if binding.error:
            collector.add(line, "", f"cannot parse {binding.original.string.strip()!r}")
            continue
        if binding.key is None:
            continue
        key = binding.key.strip()
        if binding.value is None:
            match = _SECTION_PATTERN.match(key)
            if match:
                section = match.group(1)
            else:
                collector.add(line, key, "expected 'key = value'")
            continue
        full = f"{section}.{key}" if section else key
        if full in raw:
            collector.add(line, full, f"duplicate key (first set on line {lines[full]})")
            continue
        raw[full] = binding.value.strip()
        lines[full] = line
    return raw, lines


def _build(config: ExperimentConfig, collector: _Collector) -> None:
    """Construct the domain objects the runner needs; every failure becomes a diagnostic."""
    kind = config.experiment
    values, lines = config.values, config.lines

    def fail(key: str, error: Exception) -> None:
        message = error.message if isinstance(error, LabError) else str(error)
        collector.add(lines.get(key), key, message)

    if kind is ExperimentKind.WASSERSTEIN:
        try:
            space = PhaseSpace.parse(values.get("measures.space", "interval"))
        except ConfigurationError as e:
            fail("measures.space", e)
            return
        measures = []
        for key in ("measures.mu", "measures.nu"):
            try:
                measures.append(_parse_atoms(values[key], space))
            except LabError as e:
                fail(key, e)
        config.measures = tuple(measures)
        return

    map_keys = {key.split(".", 1)[1]: value for key, value in config.raw.items() if key.startswith("map.")}
    try:
        config.map_spec = MapSpec.from_config(map_keys)
    except LabError as e:
        fail("map.params" if "params" in map_keys else "map.family", e)
        return
    T = config.map_spec

    pert_keys = {key: value for key, value in config.raw.items() if key.startswith("perturbation.")}
    if pert_keys:
        try:
            config.perturbation = PerturbationSpec.from_config(pert_keys)
        except LabError as e:
            fail("perturbation.kind", e)
            return

    # Largest amplitude any S of this run will have.
    amplitudes = list(values.get("sweep.deltas", [])) + list(values.get("search.deltas", []))
    if config.perturbation is not None:
        amplitudes.append(config.perturbation.delta)
    probe = config.perturbation or PerturbationSpec.additive(0.0)
    try:
        for amplitude in set(amplitudes):
            perturb(T, probe.with_amplitude(amplitude))
    except LabError as e:
        fail("perturbation.amplitude", e)
        return

    if "grid.n" in values:
        try:
            method = config.ulam_method()
            method.resolve(T)
            for amplitude in set(amplitudes):
                method.resolve(perturb(T, probe.with_amplitude(amplitude)))
        except LabError as e:
            fail("grid.method", e)

    if kind is ExperimentKind.CONTINUITY_PROBE and len(values["sweep.deltas"]) < 3:
        collector.add(lines.get("sweep.deltas"), "sweep.deltas", "a continuity probe needs at least 3 deltas")
    for key in ("sweep.deltas", "search.deltas"):
        deltas = values.get(key)
        if deltas and any(b > a for a, b in zip(deltas, deltas[1:])):
            collector.add(lines.get(key), key, "deltas must be listed in decreasing order")

    if kind is ExperimentKind.BIRKHOFF and values.get("orbit.two_sided") and not T.inverse_available:
        collector.add(lines.get("orbit.two_sided"), "orbit.two_sided", f"{T.label} is not invertible")

    phi_key = {ExperimentKind.BIRKHOFF: "orbit.phi", ExperimentKind.CESARO_SEARCH: "search.phi"}.get(kind)
    if phi_key:
        try:
            config.observables = (parse_observable(values[phi_key], T.space),)
        except LabError as e:
            fail(phi_key, e)

    if kind is ExperimentKind.VISIT_SEARCH:
        try:
            config.open_set = IntervalUnion.parse(values["visit.set"], T.space)
        except LabError as e:
            fail("visit.set", e)

    if kind is ExperimentKind.LIPSCHITZ_SWEEP:
        try:
            family = parse_observables(values["lipschitz.family"], T.space)
            for phi in family:
                check_lipschitz(phi, values["lipschitz.L"], T.space, name=phi.name)
            config.observables = tuple(family)
        except LabError as e:
            fail("lipschitz.family", e)


def _experiments_using(key: str) -> List[str]:
    return [kind.value for kind, (specs, _) in _SCHEMA.items() if any(spec.key == key for spec in specs)]


def _parse(text: str, source: str) -> Tuple[Optional[ExperimentConfig], List[Diagnostic]]:
    collector = _Collector(source)
    raw, lines = _read_entries(text, collector)

    if "experiment" not in raw:
        collector.add(None, "experiment", "required key is missing")
        return None, collector.diagnostics
    try:
        kind = ExperimentKind(raw["experiment"].strip().lower())
    except ValueError:
        known = ", ".join(member.value for member in ExperimentKind)
        collector.add(lines["experiment"], "experiment", f"unknown experiment {raw['experiment']!r}; expected one of: {known}")
        return None, collector.diagnostics

    specs, required = _SCHEMA[kind]
    by_key = {spec.key: spec for spec in _COMMON + specs}
    values: Dict[str, Any] = {}
    for key, value in raw.items():
        spec = by_key.get(key)
        if spec is None:
            owners = ", ".join(_experiments_using(key))
            message = f"unknown key for a {kind.value} experiment"
            collector.add(lines[key], key, f"{message} (used by {owners})" if owners else message)
            continue
        try:
            values[key] = _convert(spec, value)
        except ValueError as e:
            collector.add(lines[key], key, str(e))
    for key in required:
        if key not in raw:
            collector.add(None, key, "required key is missing")

    config = ExperimentConfig(kind, source, raw, values, lines)
    if not collector.diagnostics:
        _build(config, collector)
    return config, collector.diagnostics


def validate_config(text: str, source: str = "<config>") -> List[Diagnostic]:
    """All problems in a config; an empty list means `parse_config` (and the runner) accept it."""
    return _parse(text, source)[1]


def parse_config(text: str, source: str = "<config>") -> ExperimentConfig:
    """
    Parse and validate a config.

    Raises:
        ConfigValidationError: with every diagnostic found
    """
    config, diagnostics = _parse(text, source)
    if diagnostics or config is None:
        raise ConfigValidationError(diagnostics)
    logger.debug("Parsed experiment config", extra={"experiment": config.experiment.value, "source": source})
    return config
