"""
Semicontinuity sweeps of T -> M(K, T) and continuity probes.

For every amplitude delta of a perturbation schedule the perturbed map S is
built, both invariant-measure sets are approximated with Ulam's method, and
the report records the C0 distances, both directed W1-Hausdorff terms and the
largest invariance residual of an S-invariant measure under T.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

from src.errors import ConfigurationError
from src.measures.hausdorff import hausdorff_distance
from src.measures.invariance import invariance_residual
from src.measures.lipschitz import LipschitzTestSet
from src.systems.distances import c0_distance_pair
from src.systems.maps import MapSpec, perturb
from src.systems.perturbation import PerturbationSpec
from src.ulam.grid import Grid
from src.ulam.measure_sets import invariant_measure_set
from src.ulam.transfer import UlamMethod
from src.utils.parallel import parallel_map

logger = logging.getLogger(__name__)

SOLVER_SLACK = 1e-6
MONOTONE_SLACK = 1e-9


@dataclass(frozen=True)
class StabilityRow:
    """Measurements for one perturbation amplitude."""

    delta: float
    c0_forward: float
    c0_inverse: Optional[float]
    directed_ts: float
    directed_st: float
    total: float
    max_residual: float
    residual_bound: float
    extremes_t: int
    extremes_s: int

    @property
    def within_bound(self) -> bool:
        return self.max_residual <= self.residual_bound

    def as_dict(self) -> Dict[str, Any]:
        return {
            "delta": self.delta,
            "c0_forward": self.c0_forward,
            "c0_inverse": "" if self.c0_inverse is None else self.c0_inverse,
            "directed_ts": self.directed_ts,
            "directed_st": self.directed_st,
            "sum_dh": self.total,
            "max_residual": self.max_residual,
            "residual_bound": self.residual_bound,
            "extremes_t": self.extremes_t,
            "extremes_s": self.extremes_s,
        }


@dataclass(frozen=True)
class StabilityReport:
    """
    Table of a delta sweep.

    Attributes:
        map_label: provenance of T
        perturbation: perturbation shape (its amplitude is replaced by each delta)
        grid_n: Ulam cell count
        hull: whether set distances compare convex hulls
        lipschitz: Lipschitz constant of the test class used for residuals
        entries: one row per delta, in schedule order
    """

    map_label: str
    perturbation: PerturbationSpec
    grid_n: int
    hull: bool
    lipschitz: float
    entries: Tuple[StabilityRow, ...]

    @property
    def delta_schedule(self) -> List[float]:
        return [row.delta for row in self.entries]

    @property
    def residuals_within_bound(self) -> bool:
        return all(row.within_bound for row in self.entries)

    def rows(self) -> List[Dict[str, Any]]:
        return [row.as_dict() for row in self.entries]

    def summary(self) -> str:
        lines = [
            f"map = {self.map_label}",
            f"perturbation = {self.perturbation.kind.value}",
            f"grid_n = {self.grid_n}",
            f"mode = {'hull' if self.hull else 'finite'}",
            f"deltas = {len(self.entries)}",
            f"residuals_within_bound = {str(self.residuals_within_bound).lower()}",
            f"max_directed_ts = {max(row.directed_ts for row in self.entries)!r}",
            f"max_directed_st = {max(row.directed_st for row in self.entries)!r}",
        ]
        return "\n".join(lines) + "\n"


def _check_schedule(deltas: Sequence[float]) -> List[float]:
    schedule = [float(d) for d in deltas]
    if not schedule:
        raise ConfigurationError("The delta schedule is empty")
    if any(d < 0.0 for d in schedule):
        raise ConfigurationError("Perturbation amplitudes must be nonnegative")
    if any(b > a for a, b in zip(schedule, schedule[1:])):
        raise ConfigurationError("The delta schedule must be decreasing", {"deltas": schedule})
    return schedule


def semicontinuity_experiment(
    T: MapSpec,
    perturbation: PerturbationSpec,
    deltas: Sequence[float],
    grid: Grid,
    tests: Optional[LipschitzTestSet] = None,
    hull: bool = False,
    method: Optional[UlamMethod] = None,
    threads: int = 1,
) -> StabilityReport:
    """
    Sweep a perturbation schedule and measure how M(K, S) sits relative to M(K, T).

    The residual column is bounded by Lip * (delta + 2h) + 1e-6: an invariant
    measure of S on the grid is within h of S-invariance and S is delta away
    from T.

    Args:
        T: unperturbed map
        perturbation: perturbation shape; its amplitude is set to each delta
        deltas: decreasing nonnegative amplitudes
        grid: Ulam grid
        tests: test class for residuals (canonical 1-Lipschitz class by default)
        hull: compare convex hulls instead of the finite extreme sets
        method: Ulam row construction
        threads: deltas processed concurrently

    Returns:
        StabilityReport with one row per delta
    """
    schedule = _check_schedule(deltas)
    tests = tests or LipschitzTestSet.canonical(T.space)
    lipschitz = tests.lipschitz
    set_t = invariant_measure_set(T, grid, method, hull)

    def measure(delta: float) -> StabilityRow:
        S = perturb(T, perturbation.with_amplitude(delta))
        set_s = invariant_measure_set(S, grid, method, hull)
        distances = hausdorff_distance(set_t, set_s, hull=hull)
        c0 = c0_distance_pair(T, S)
        residual = max(invariance_residual(mu, T, tests) for mu in set_s)
        row = StabilityRow(
            delta=delta,
            c0_forward=c0.forward,
            c0_inverse=c0.inverse,
            directed_ts=distances.directed_pq,
            directed_st=distances.directed_qp,
            total=distances.total,
            max_residual=residual,
            residual_bound=lipschitz * (delta + 2.0 * grid.h) + SOLVER_SLACK,
            extremes_t=len(set_t),
            extremes_s=len(set_s),
        )
        logger.info(
            "Semicontinuity row",
            extra={"delta": delta, "directed_ts": row.directed_ts, "directed_st": row.directed_st, "residual": residual},
        )
        return row

    entries = parallel_map(measure, schedule, threads)
    return StabilityReport(T.label, perturbation, grid.n, hull, lipschitz, tuple(entries))


class ContinuityClass(str, Enum):
    CONTINUITY_CONSISTENT = "continuity_consistent"
    DISCONTINUITY_EVIDENCE = "discontinuity_evidence"


@dataclass(frozen=True)
class ContinuityVerdict:
    """Classification of a continuity probe with the floor it used and the full table."""

    classification: ContinuityClass
    floor: float
    report: StabilityReport

    def rows(self) -> List[Dict[str, Any]]:
        return self.report.rows()

    def summary(self) -> str:
        return f"classification = {self.classification.value}\nfloor = {self.floor!r}\n" + self.report.summary()


def classify_continuity(rows: Sequence[StabilityRow], floor: float, h: float) -> ContinuityClass:
    """
    Classify a probe table.

    Discontinuity evidence needs all three: directed_ts above the floor for
    every delta, directed_st non-increasing along the schedule, and
    directed_st within delta + 2h for every delta. A table that breaks the
    last bound is classified continuity_consistent whatever directed_ts does.
    """
    gap_persists = all(row.directed_ts > floor for row in rows)
    st_shrinks = all(b.directed_st <= a.directed_st + MONOTONE_SLACK for a, b in zip(rows, rows[1:]))
    st_small = all(row.directed_st <= row.delta + 2.0 * h + SOLVER_SLACK for row in rows)
    if gap_persists and st_shrinks and st_small:
        return ContinuityClass.DISCONTINUITY_EVIDENCE
    return ContinuityClass.CONTINUITY_CONSISTENT


def continuity_probe(
    T: MapSpec,
    deltas: Sequence[float],
    grid: Grid,
    perturbation: Optional[PerturbationSpec] = None,
    hull: bool = True,
    floor: Optional[float] = None,
    method: Optional[UlamMethod] = None,
    threads: int = 1,
) -> ContinuityVerdict:
    """
    Look for a persistent gap in the directed distance from M(K, T) to M(K, S).

    Discontinuity evidence means directed_ts stays above the floor for every
    delta while directed_st keeps shrinking and stays within delta + 2h.

    Args:
        T: map under test
        deltas: at least three decreasing amplitudes
        grid: Ulam grid
        perturbation: perturbation shape (additive constant by default)
        hull: compare convex hulls (default) or finite extreme sets
        floor: gap threshold; defaults to 2 * (max delta + 2h)
        method: Ulam row construction
        threads: deltas processed concurrently
    """
    schedule = _check_schedule(deltas)
    if len(schedule) < 3:
        raise ConfigurationError(f"A continuity probe needs at least 3 deltas, got {len(schedule)}")
    perturbation = perturbation or PerturbationSpec.additive(0.0)
    report = semicontinuity_experiment(T, perturbation, schedule, grid, hull=hull, method=method, threads=threads)

    floor = 2.0 * (max(schedule) + 2.0 * grid.h) if floor is None else floor
    classification = classify_continuity(report.entries, floor, grid.h)
    logger.info("Continuity probe", extra={"map": T.label, "classification": classification.value, "floor": floor})
    return ContinuityVerdict(classification, floor, report)
