"""
Experiment dispatch and result files.

Every run writes `<name>.csv` (the table) and `<name>.summary.txt` (the
structured summary) into the output directory. Both start with `# ` header
lines naming the experiment, the SHA-256 digest of the normalized config, the
seed and the package version. A UTC timestamp is added only on request, so the
files are byte-identical across reruns by default.
"""

import csv
import io
import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Union

from src import __version__
from src.birkhoff.bumps import BumpSpec
from src.birkhoff.cesaro import cesaro_bounds
from src.cli.experiment_config import ExperimentConfig, ExperimentKind
from src.config import DEFAULTS
from src.measures.lipschitz import LipschitzTestSet, dual_lower_bound
from src.measures.wasserstein import transport_cost, w1_distance
from src.stability.search import (
    cesaro_stability_search,
    largest_successful_delta,
    lipschitz_uniform_experiment,
    search_candidates,
    visit_stability_experiment,
)
from src.stability.semicontinuity import continuity_probe, semicontinuity_experiment
from src.systems.distances import c0_distance_pair
from src.systems.perturbation import PerturbationSpec
from src.ulam.decomposition import ergodic_decomposition
from src.ulam.measure_sets import measure_set_distance
from src.ulam.transfer import build_transfer_matrix
from src.utils.formatting import format_float

logger = logging.getLogger(__name__)


@dataclass
class ExperimentOutput:
    """Table rows and summary text of one experiment."""

    rows: List[Dict[str, Any]]
    summary: str
    columns: Optional[List[str]] = None


@dataclass
class RunResult:
    config: ExperimentConfig
    output: ExperimentOutput
    csv_path: Path
    summary_path: Path
    headers: List[str] = field(default_factory=list)


@dataclass(frozen=True)
class RunContext:
    """Per-run knobs that do not belong to the config."""

    seed: int = 0
    threads: int = 1


def _run_ulam(config: ExperimentConfig, ctx: RunContext) -> ExperimentOutput:
    spec = config.perturbed_map
    transfer = build_transfer_matrix(spec, config.grid, config.ulam_method(ctx.seed), ctx.threads)
    decomposition = ergodic_decomposition(transfer)
    centers = config.grid.centers
    rows = [
        {"class": k, "cell": int(cell), "support": float(centers[cell]), "weight": float(weight)}
        for k, (cells, pi) in enumerate(zip(decomposition.classes, decomposition.vectors))
        for cell, weight in zip(cells, pi)
    ]
    residual = max(decomposition.residuals(transfer))
    summary = (
        f"map = {spec.label}\nmethod = {transfer.method.label}\n"
        f"max_stationary_residual = {format_float(residual)}\n" + decomposition.report()
    )
    return ExperimentOutput(rows, summary, ["class", "cell", "support", "weight"])


def _run_wasserstein(config: ExperimentConfig, ctx: RunContext) -> ExperimentOutput:
    mu, nu = config.measures
    tests = LipschitzTestSet.canonical(mu.space)
    row = {
        "w1": w1_distance(mu, nu),
        "transport_cost": transport_cost(mu, nu),
        "dual_lower_bound": dual_lower_bound(mu, nu, tests),
    }
    summary = f"space = {mu.space}\natoms_mu = {len(mu)}\natoms_nu = {len(nu)}\nw1 = {format_float(row['w1'])}\n"
    return ExperimentOutput([row], summary)


def _run_hausdorff(config: ExperimentConfig, ctx: RunContext) -> ExperimentOutput:
    T, S = config.map_spec, config.perturbed_map
    hull = bool(config.get("grid.hull", False))
    result = measure_set_distance(T, S, config.grid, hull, config.ulam_method(ctx.seed), ctx.threads)
    c0 = c0_distance_pair(T, S)
    row = {
        "c0_forward": c0.forward,
        "c0_inverse": "" if c0.inverse is None else c0.inverse,
        "directed_ts": result.directed_pq,
        "directed_st": result.directed_qp,
        "sum_dh": result.total,
    }
    summary = (
        f"map = {T.label}\nperturbed = {S.label}\nmode = {'hull' if hull else 'finite'}\n"
        f"sum_dh = {format_float(result.total)}\n"
    )
    return ExperimentOutput([row], summary)


def _run_birkhoff(config: ExperimentConfig, ctx: RunContext) -> ExperimentOutput:
    S = config.perturbed_map
    phi = config.observables[0]
    stats = cesaro_bounds(
        S,
        config.get("orbit.p"),
        phi,
        n=config.get("orbit.horizon", DEFAULTS.horizon),
        w=config.get("orbit.window", DEFAULTS.window),
        two_sided=config.get("orbit.two_sided", False),
        cycle_tol=config.get("orbit.cycle_tol", DEFAULTS.cycle_tol),
    )
    offset = 0 if stats.two_sided else 1
    rows = [{"m": m + offset, "average": float(a)} for m, a in enumerate(stats.running_averages)]
    summary = f"map = {S.label}\nobservable = {phi.name}\n" + "".join(
        f"{key} = {format_float(value)}\n" for key, value in stats.row().items()
    )
    return ExperimentOutput(rows, summary, ["m", "average"])


def _sweep_perturbation(config: ExperimentConfig) -> PerturbationSpec:
    return config.perturbation or PerturbationSpec.additive(0.0)


def _run_semicontinuity(config: ExperimentConfig, ctx: RunContext) -> ExperimentOutput:
    report = semicontinuity_experiment(
        config.map_spec,
        _sweep_perturbation(config),
        config.get("sweep.deltas"),
        config.grid,
        hull=bool(config.get("grid.hull", False)),
        method=config.ulam_method(ctx.seed),
        threads=ctx.threads,
    )
    return ExperimentOutput(report.rows(), report.summary())


def _run_continuity_probe(config: ExperimentConfig, ctx: RunContext) -> ExperimentOutput:
    verdict = continuity_probe(
        config.map_spec,
        config.get("sweep.deltas"),
        config.grid,
        perturbation=_sweep_perturbation(config),
        hull=bool(config.get("grid.hull", True)),
        floor=config.get("probe.floor"),
        method=config.ulam_method(ctx.seed),
        threads=ctx.threads,
    )
    return ExperimentOutput(verdict.rows(), verdict.summary())


def _search_arguments(config: ExperimentConfig) -> Dict[str, Any]:
    return {
        "eps": config.get("search.eps"),
        "sigma": config.get("search.sigma"),
        "n": config.get("search.horizon", DEFAULTS.horizon),
        "window": config.get("search.window", DEFAULTS.window),
        "cycle_tol": config.get("search.cycle_tol", DEFAULTS.cycle_tol),
    }


def _candidates(config: ExperimentConfig):
    return search_candidates(
        config.perturbed_map,
        config.get("search.candidates", DEFAULTS.candidates),
        config.get("search.max_period", DEFAULTS.max_period),
        config.get("search.ulam_grid"),
    )


def _run_cesaro_search(config: ExperimentConfig, ctx: RunContext) -> ExperimentOutput:
    T, phi, p = config.map_spec, config.observables[0], config.get("search.p")
    if config.get("search.deltas"):
        calibration = largest_successful_delta(
            T,
            _sweep_perturbation(config),
            config.get("search.deltas"),
            p,
            phi,
            config.get("search.eps"),
            config.get("search.sigma"),
            n=config.get("search.horizon", DEFAULTS.horizon),
            grid_points=config.get("search.candidates", DEFAULTS.candidates),
            max_period=config.get("search.max_period", DEFAULTS.max_period),
            threads=ctx.threads,
        )
        return ExperimentOutput(calibration.rows(), calibration.summary(), ["delta", "survivors", "success"])

    result = cesaro_stability_search(
        T, config.perturbed_map, p, phi, candidates=_candidates(config), threads=ctx.threads, label=phi.name,
        **_search_arguments(config),
    )
    return ExperimentOutput(result.rows(), result.summary())


def _run_visit_search(config: ExperimentConfig, ctx: RunContext) -> ExperimentOutput:
    arguments = _search_arguments(config)
    result = visit_stability_experiment(
        config.map_spec,
        config.perturbed_map,
        config.get("search.p"),
        config.open_set,
        config.get("visit.beta"),
        candidates=_candidates(config),
        alpha=config.get("bump.alpha", BumpSpec().alpha),
        threads=ctx.threads,
        **arguments,
    )
    return ExperimentOutput(result.rows(), result.summary())


def _run_lipschitz_sweep(config: ExperimentConfig, ctx: RunContext) -> ExperimentOutput:
    result = lipschitz_uniform_experiment(
        config.map_spec,
        config.perturbed_map,
        config.get("search.p"),
        config.get("lipschitz.L"),
        list(config.observables),
        candidates=_candidates(config),
        names=[phi.name for phi in config.observables],
        threads=ctx.threads,
        **_search_arguments(config),
    )
    return ExperimentOutput(result.rows(), result.summary())


_HANDLERS: Dict[ExperimentKind, Callable[[ExperimentConfig, RunContext], ExperimentOutput]] = {
    ExperimentKind.ULAM: _run_ulam,
    ExperimentKind.WASSERSTEIN: _run_wasserstein,
    ExperimentKind.HAUSDORFF: _run_hausdorff,
    ExperimentKind.BIRKHOFF: _run_birkhoff,
    ExperimentKind.SEMICONTINUITY: _run_semicontinuity,
    ExperimentKind.CONTINUITY_PROBE: _run_continuity_probe,
    ExperimentKind.CESARO_SEARCH: _run_cesaro_search,
    ExperimentKind.VISIT_SEARCH: _run_visit_search,
    ExperimentKind.LIPSCHITZ_SWEEP: _run_lipschitz_sweep,
}


def render_csv(output: ExperimentOutput) -> str:
    """CSV body with floats at 17 significant digits."""
    columns = list(output.columns or [])
    for row in output.rows:
        columns.extend(key for key in row if key not in columns)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in output.rows:
        writer.writerow([format_float(row[key]) if key in row else "" for key in columns])
    return buffer.getvalue()


def header_lines(config: ExperimentConfig, seed: int, timestamps: bool = False) -> List[str]:
    headers = [
        f"# experiment: {config.experiment.value}",
        f"# config_sha256: {config.digest()}",
        f"# seed: {seed}",
        f"# version: {__version__}",
    ]
    if timestamps:
        headers.append(f"# timestamp: {datetime.now(timezone.utc).isoformat()}")
    return headers


def run_experiment(
    config: ExperimentConfig,
    out_dir: Union[str, Path],
    seed: Optional[int] = None,
    threads: int = 1,
    timestamps: bool = False,
    name: Optional[str] = None,
) -> RunResult:
    """
    Run one experiment and write its CSV table and summary.

    Args:
        config: validated config
        out_dir: directory for the result files (created if missing)
        seed: overrides the config seed
        threads: worker threads for the experiment's parallel axis
        timestamps: add a UTC timestamp header line
        name: file stem (defaults to the config output name)

    Returns:
        RunResult with the output and the written paths

    Raises:
        LabError: numerical failures of the drivers (search failures are recorded, not raised)
    """
    ctx = RunContext(seed=config.seed if seed is None else seed, threads=threads)
    logger.info(
        "Running experiment",
        extra={"experiment": config.experiment.value, "seed": ctx.seed, "threads": ctx.threads},
    )
    output = _HANDLERS[config.experiment](config, ctx)

    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    headers = header_lines(config, ctx.seed, timestamps)
    head = "".join(f"{line}\n" for line in headers)

    stem = name or config.name
    csv_path = directory / f"{stem}.csv"
    summary_path = directory / f"{stem}.summary.txt"
    csv_path.write_text(head + render_csv(output))
    summary_path.write_text(head + output.summary)
    logger.info("Wrote results", extra={"csv": str(csv_path), "summary": str(summary_path)})
    return RunResult(config, output, csv_path, summary_path, headers)
