"""
Cesaro-stability searches.

Given T, a base point p and a perturbation S, look for points q+ and q- whose
S-orbits stay sigma-close to the T-orbit closure of p (visit frequency at
least 1 - eps) and whose Cesaro averages of phi reach phi_p^- - eps from above
and phi_p^+ + eps from below. The search is over a documented candidate set:
a uniform grid, the periodic points of S and the atoms of small Ulam classes of S.
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.birkhoff.batch import BatchStatistics, Observable, batch_orbit_statistics
from src.birkhoff.bumps import IntervalUnion, chi_functions
from src.config import DEFAULTS
from src.errors import ConfigurationError, LabError
from src.measures.lipschitz import check_lipschitz
from src.systems.distances import C0DistancePair, c0_distance_pair
from src.systems.maps import MapSpec, perturb
from src.systems.orbits import OrbitClosure, OrbitDirection, orbit, periodic_points
from src.systems.perturbation import PerturbationSpec
from src.ulam.decomposition import ergodic_decomposition
from src.ulam.grid import Grid
from src.ulam.transfer import build_transfer_matrix
from src.utils.parallel import parallel_map

logger = logging.getLogger(__name__)

MIN_SEARCH_HORIZON = 1000
SAME_POINT = 1e-12
SMALL_CLASS = 8


def search_candidates(
    S: MapSpec,
    grid_points: int = DEFAULTS.candidates,
    max_period: int = DEFAULTS.max_period,
    ulam_grid: Optional[int] = None,
) -> np.ndarray:
    """
    Candidate starting points for the searches.

    Args:
        S: the map whose orbits are searched
        grid_points: uniform grid i / grid_points
        max_period: include periodic points of S up to this period (0 disables)
        ulam_grid: include the atoms of Ulam classes with at most 8 cells on this grid

    Returns:
        Sorted distinct points in [0, 1)
    """
    parts = [np.arange(grid_points, dtype=float) / grid_points]
    if max_period > 0:
        parts.append(periodic_points(S, max_period))
    if ulam_grid:
        decomposition = ergodic_decomposition(build_transfer_matrix(S, Grid(ulam_grid, S.space)))
        parts.extend(mu.support for cells, mu in zip(decomposition.classes, decomposition.stationaries)
                     if cells.size <= SMALL_CLASS)
    points = np.unique(np.asarray(S.space.normalize(np.concatenate(parts)), dtype=float))
    logger.debug(f"{points.size} search candidates for {S.label}")
    return points


@dataclass(frozen=True)
class CandidateReport:
    """Statistics of one chosen candidate under S."""

    point: float
    average: float
    lower: float
    upper: float
    visit_lower: float
    visit_final: float
    extras: Dict[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class CesaroSearchResult:
    """
    Outcome of one search; success flags are recomputed from the stored values.

    Attributes:
        label: name of the observable
        base_point: p
        phi_lower: lower Cesaro proxy of phi along the T-orbit of p
        phi_upper: upper proxy
        eps: tolerance
        sigma: neighborhood radius around the orbit closure of p
        horizon: n
        two_sided: whether two-sided averages were used
        candidates: number of candidates examined
        survivors: candidates passing the visit filter
        q_plus: candidate maximizing the average (None without survivors)
        q_minus: candidate minimizing the average
    """

    label: str
    base_point: float
    phi_lower: float
    phi_upper: float
    eps: float
    sigma: float
    horizon: int
    two_sided: bool
    candidates: int
    survivors: int
    q_plus: Optional[CandidateReport] = None
    q_minus: Optional[CandidateReport] = None

    @property
    def target_lower(self) -> float:
        return self.phi_lower - self.eps

    @property
    def target_upper(self) -> float:
        return self.phi_upper + self.eps

    @property
    def success_plus(self) -> bool:
        return self.q_plus is not None and self.q_plus.lower >= self.target_lower

    @property
    def success_minus(self) -> bool:
        return self.q_minus is not None and self.q_minus.upper <= self.target_upper

    @property
    def success(self) -> bool:
        return self.survivors > 0 and self.success_plus and self.success_minus

    def rows(self) -> List[Dict[str, Any]]:
        out = []
        for side, q, ok in (("plus", self.q_plus, self.success_plus), ("minus", self.q_minus, self.success_minus)):
            row: Dict[str, Any] = {
                "observable": self.label,
                "side": side,
                "point": "" if q is None else q.point,
                "average": "" if q is None else q.average,
                "lower": "" if q is None else q.lower,
                "upper": "" if q is None else q.upper,
                "visit_lower": "" if q is None else q.visit_lower,
                "target": self.target_lower if side == "plus" else self.target_upper,
                "success": ok,
            }
            out.append(row)
        return out

    def summary(self) -> str:
        return (
            f"observable = {self.label}\n"
            f"phi_lower = {self.phi_lower!r}\n"
            f"phi_upper = {self.phi_upper!r}\n"
            f"candidates = {self.candidates}\n"
            f"survivors = {self.survivors}\n"
            f"success = {str(self.success).lower()}\n"
        )


def _batched(
    spec: MapSpec,
    starts: np.ndarray,
    n: int,
    observables: Sequence[Observable],
    window: float,
    two_sided: bool,
    cycle_tol: Optional[float],
    threads: int,
) -> BatchStatistics:
    """batch_orbit_statistics split over threads by starting point."""
    chunks = [chunk for chunk in np.array_split(starts, max(1, min(threads, starts.size))) if chunk.size]
    parts = parallel_map(
        lambda chunk: batch_orbit_statistics(spec, chunk, n, observables, window, two_sided, cycle_tol),
        chunks,
        threads,
    )
    return BatchStatistics(
        starts=np.concatenate([part.starts for part in parts]),
        final=np.concatenate([part.final for part in parts], axis=1),
        lower=np.concatenate([part.lower for part in parts], axis=1),
        upper=np.concatenate([part.upper for part in parts], axis=1),
        horizon=n,
        window=window,
        two_sided=two_sided,
    )


def _run_search(
    T: MapSpec,
    S: MapSpec,
    p: float,
    targets: Sequence[Tuple[str, Observable]],
    extras: Sequence[Tuple[str, Observable]],
    eps: float,
    sigma: float,
    candidates: Sequence[float],
    n: int,
    window: float,
    two_sided: Optional[bool],
    cycle_tol: Optional[float],
    threads: int,
) -> List[CesaroSearchResult]:
    if not 0.0 < eps < 1.0:
        raise ConfigurationError(f"eps must lie in (0, 1), got {eps}")
    if not sigma > 0.0:
        raise ConfigurationError(f"sigma must be positive, got {sigma}")
    if n < MIN_SEARCH_HORIZON:
        raise ConfigurationError(f"Search horizon must be >= {MIN_SEARCH_HORIZON}, got {n}")
    if T.space != S.space:
        raise ConfigurationError(f"T and S act on different spaces ({T.space} vs {S.space})")
    points = np.atleast_1d(np.asarray(S.space.normalize(np.asarray(candidates, dtype=float)), dtype=float))
    if points.size == 0:
        raise ConfigurationError("The candidate list is empty")

    if two_sided is None:
        two_sided = T.inverse_available and S.inverse_available
    p = float(T.space.normalize(p))
    direction = OrbitDirection.TWO_SIDED if two_sided else OrbitDirection.FORWARD
    closure = OrbitClosure(orbit(T, p, n, direction, cycle_tol).points, T.space)

    def near_orbit(x: np.ndarray) -> np.ndarray:
        return (np.asarray(closure.distance(x)) < sigma).astype(float)

    observables = [f for _, f in targets] + [near_orbit] + [f for _, f in extras]
    visit_row = len(targets)

    if S == T:
        # p rides along in the same batch so its statistics are reproduced exactly.
        stats = _batched(S, np.concatenate([[p], points]), n, observables, window, two_sided, cycle_tol, threads)
        base_lower, base_upper = stats.lower[: len(targets), 0], stats.upper[: len(targets), 0]
        final, lower, upper = stats.final[:, 1:], stats.lower[:, 1:], stats.upper[:, 1:]
    else:
        base = batch_orbit_statistics(T, [p], n, [f for _, f in targets], window, two_sided, cycle_tol)
        base_lower, base_upper = base.lower[:, 0], base.upper[:, 0]
        stats = _batched(S, points, n, observables, window, two_sided, cycle_tol, threads)
        final, lower, upper = stats.final, stats.lower, stats.upper

    survivors = np.flatnonzero(lower[visit_row] >= 1.0 - eps)
    at_p = np.flatnonzero(np.asarray(S.space.distance(points, p)) <= SAME_POINT)

    def report(i: int) -> CandidateReport:
        extra_values = {name: float(final[visit_row + 1 + k, i]) for k, (name, _) in enumerate(extras)}
        return CandidateReport(
            point=float(points[i]),
            average=float(final[j, i]),
            lower=float(lower[j, i]),
            upper=float(upper[j, i]),
            visit_lower=float(lower[visit_row, i]),
            visit_final=float(final[visit_row, i]),
            extras=extra_values,
        )

    results = []
    for j, (name, _) in enumerate(targets):
        phi_lower, phi_upper = float(base_lower[j]), float(base_upper[j])
        q_plus = q_minus = None
        if survivors.size:
            preferred = [
                i
                for i in at_p
                if i in survivors and lower[j, i] >= phi_lower - eps and upper[j, i] <= phi_upper + eps
            ]
            if preferred:
                q_plus = q_minus = report(preferred[0])
            else:
                q_plus = report(int(survivors[np.argmax(final[j, survivors])]))
                q_minus = report(int(survivors[np.argmin(final[j, survivors])]))
        result = CesaroSearchResult(
            label=name,
            base_point=p,
            phi_lower=phi_lower,
            phi_upper=phi_upper,
            eps=eps,
            sigma=sigma,
            horizon=n,
            two_sided=two_sided,
            candidates=int(points.size),
            survivors=int(survivors.size),
            q_plus=q_plus,
            q_minus=q_minus,
        )
        results.append(result)
        logger.info(
            "Cesaro search",
            extra={"observable": name, "survivors": result.survivors, "success": result.success, "map": S.label},
        )
    return results


def cesaro_stability_search(
    T: MapSpec,
    S: MapSpec,
    p: float,
    phi: Observable,
    eps: float,
    sigma: float,
    candidates: Sequence[float],
    n: int = DEFAULTS.horizon,
    window: float = DEFAULTS.window,
    two_sided: Optional[bool] = None,
    cycle_tol: Optional[float] = DEFAULTS.cycle_tol,
    threads: int = 1,
    label: str = "phi",
) -> CesaroSearchResult:
    """
    Find q+ and q- for one observable.

    Args:
        T: unperturbed map
        S: perturbed map
        p: base point
        phi: observable
        eps: tolerance in (0, 1)
        sigma: neighborhood radius around the T-orbit closure of p
        candidates: nonempty list of starting points
        n: horizon (>= 1000)
        window: trailing window fraction of the proxies
        two_sided: two-sided averages; None uses them when both maps are invertible
        cycle_tol: close periodic cycles within this distance
        threads: worker threads over candidates
        label: name recorded in the result

    Returns:
        CesaroSearchResult; no survivors gives success=False, never an exception
    """
    return _run_search(
        T, S, p, [(label, phi)], [], eps, sigma, candidates, n, window, two_sided, cycle_tol, threads
    )[0]


@dataclass(frozen=True)
class LipschitzUniformResult:
    """Searches for a whole Lipschitz family against one perturbed map."""

    lipschitz: float
    c0: C0DistancePair
    results: Tuple[CesaroSearchResult, ...]

    @property
    def success(self) -> bool:
        return all(result.success for result in self.results)

    def rows(self) -> List[Dict[str, Any]]:
        return [dict(row, c0_forward=self.c0.forward) for result in self.results for row in result.rows()]

    def summary(self) -> str:
        lines = [
            f"lipschitz = {self.lipschitz!r}",
            f"c0_forward = {self.c0.forward!r}",
            f"functions = {len(self.results)}",
            f"succeeded = {sum(result.success for result in self.results)}",
            f"success = {str(self.success).lower()}",
        ]
        return "\n".join(lines) + "\n"


def lipschitz_uniform_experiment(
    T: MapSpec,
    S: MapSpec,
    p: float,
    L: float,
    phi_family: Sequence[Callable[[np.ndarray], Any]],
    eps: float,
    sigma: float,
    candidates: Sequence[float],
    n: int = DEFAULTS.horizon,
    names: Optional[Sequence[str]] = None,
    window: float = DEFAULTS.window,
    cycle_tol: Optional[float] = DEFAULTS.cycle_tol,
    threads: int = 1,
) -> LipschitzUniformResult:
    """
    Run the search for every member of an L-Lipschitz family with one common S.

    Raises:
        LipschitzViolationError: a member is not L-Lipschitz on a dense grid
    """
    if not phi_family:
        raise ConfigurationError("The function family is empty")
    names = list(names) if names else [f"phi{i}" for i in range(len(phi_family))]
    for name, phi in zip(names, phi_family):
        check_lipschitz(phi, L, T.space, name=name)

    results = _run_search(
        T, S, p, list(zip(names, phi_family)), [], eps, sigma, candidates, n, window, None, cycle_tol, threads
    )
    return LipschitzUniformResult(L, c0_distance_pair(T, S), tuple(results))


@dataclass(frozen=True)
class VisitSearchResult:
    """Visit-frequency search for an open set V, with the chi envelopes of the chosen points."""

    search: CesaroSearchResult
    open_set: IntervalUnion
    beta: float

    @property
    def q_plus(self) -> Optional[CandidateReport]:
        return self.search.q_plus

    @property
    def q_minus(self) -> Optional[CandidateReport]:
        return self.search.q_minus

    @property
    def success(self) -> bool:
        return self.search.success

    def sandwich_holds(self, tol: float = 1e-12) -> bool:
        """chi- average <= V-frequency <= chi+ average for both chosen points."""
        for q in (self.q_plus, self.q_minus):
            if q is None:
                continue
            if not q.extras["chi_minus"] - tol <= q.average <= q.extras["chi_plus"] + tol:
                return False
        return True

    def rows(self) -> List[Dict[str, Any]]:
        out = []
        for row, q in zip(self.search.rows(), (self.q_plus, self.q_minus)):
            row["chi_plus"] = "" if q is None else q.extras["chi_plus"]
            row["chi_minus"] = "" if q is None else q.extras["chi_minus"]
            out.append(row)
        return out

    def summary(self) -> str:
        return self.search.summary() + f"beta = {self.beta!r}\nsandwich = {str(self.sandwich_holds()).lower()}\n"


def visit_stability_experiment(
    T: MapSpec,
    S: MapSpec,
    p: float,
    V: IntervalUnion,
    beta: float,
    eps: float,
    sigma: float,
    candidates: Sequence[float],
    n: int = DEFAULTS.horizon,
    alpha: float = DEFAULTS.alpha,
    window: float = DEFAULTS.window,
    cycle_tol: Optional[float] = DEFAULTS.cycle_tol,
    threads: int = 1,
) -> VisitSearchResult:
    """
    Match the frequency of visits to V along S-orbits with that of the T-orbit of p.

    q_V+ maximizes and q_V- minimizes the V-frequency among sigma-feasible
    candidates; success requires freq(q_V+) >= chi_p^- - eps and
    freq(q_V-) <= chi_p^+ + eps.
    """
    if V.space != T.space:
        raise ConfigurationError("V and T live on different phase spaces")
    chi = chi_functions(V, beta, alpha)
    search = _run_search(
        T,
        S,
        p,
        [("visits", chi.indicator)],
        [("chi_plus", chi.plus), ("chi_minus", chi.minus)],
        eps,
        sigma,
        candidates,
        n,
        window,
        None,
        cycle_tol,
        threads,
    )[0]
    return VisitSearchResult(search, V, beta)


@dataclass(frozen=True)
class CalibrationResult:
    """Outcome of a downward delta sweep."""

    attempts: Tuple[Tuple[float, CesaroSearchResult], ...]

    @property
    def delta(self) -> Optional[float]:
        """Largest delta whose search succeeded."""
        for delta, result in self.attempts:
            if result.success:
                return delta
        return None

    def rows(self) -> List[Dict[str, Any]]:
        return [
            {"delta": delta, "survivors": result.survivors, "success": result.success}
            for delta, result in self.attempts
        ]

    def summary(self) -> str:
        found = "none" if self.delta is None else repr(self.delta)
        return f"attempts = {len(self.attempts)}\nlargest_successful_delta = {found}\n"


def largest_successful_delta(
    T: MapSpec,
    perturbation: PerturbationSpec,
    deltas: Sequence[float],
    p: float,
    phi: Observable,
    eps: float,
    sigma: float,
    n: int = DEFAULTS.horizon,
    grid_points: int = DEFAULTS.candidates,
    max_period: int = DEFAULTS.max_period,
    threads: int = 1,
) -> CalibrationResult:
    """
    Sweep delta downward and stop at the first (largest) amplitude whose search succeeds.

    Candidates are rebuilt for every S with `search_candidates`.
    """
    attempts = []
    for delta in sorted({float(d) for d in deltas}, reverse=True):
        try:
            S = perturb(T, perturbation.with_amplitude(delta))
        except LabError as e:
            logger.warning(f"Skipping delta={delta}: {e.message}")
            continue
        candidates = search_candidates(S, grid_points, max_period)
        result = cesaro_stability_search(T, S, p, phi, eps, sigma, candidates, n, threads=threads)
        attempts.append((delta, result))
        logger.info("Calibration step", extra={"delta": delta, "success": result.success})
        if result.success:
            break
    return CalibrationResult(tuple(attempts))
