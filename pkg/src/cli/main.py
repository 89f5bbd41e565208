"""
Command-line entry point.

    measure-lab run CONFIG [--seed N] [--out-dir DIR] [--threads N] [--timestamps]
    measure-lab validate CONFIG
    measure-lab demo NAME [...]
    measure-lab demo --list

Logs go to stderr; stdout only carries result summaries and diagnostics.
"""

import logging
import sys
from pathlib import Path
from typing import Optional

import click

from src import __version__
from src.cli.demos import demo_config, demo_names
from src.cli.experiment_config import ConfigValidationError, parse_config, validate_config
from src.cli.runner import RunResult, run_experiment
from src.config import get_settings
from src.errors import ConfigurationError, LabError
from src.utils.logging_config import setup_logging

logger = logging.getLogger(__name__)

EXIT_INVALID_CONFIG = 2
EXIT_FAILURE = 1


def _run_text(
    text: str,
    source: str,
    seed: Optional[int],
    out_dir: Optional[str],
    threads: Optional[int],
    timestamps: bool,
    name: Optional[str] = None,
) -> RunResult:
    settings = get_settings()
    config = parse_config(text, source)
    threads = threads or int(config.get("threads", settings.threads))
    if seed is None and "seed" not in config.values:
        seed = settings.seed
    result = run_experiment(
        config,
        out_dir or settings.out_dir,
        seed=seed,
        threads=threads,
        timestamps=timestamps or settings.timestamps,
        name=name,
    )
    click.echo(result.output.summary, nl=False)
    click.echo(f"csv = {result.csv_path}")
    click.echo(f"summary = {result.summary_path}")
    return result


def _handle(func, *args) -> None:
    """Map expected errors onto exit codes."""
    try:
        func(*args)
    except ConfigValidationError as e:
        for diagnostic in e.diagnostics:
            click.echo(str(diagnostic))
        sys.exit(EXIT_INVALID_CONFIG)
    except ConfigurationError as e:
        click.echo(f"error: {e.message}")
        sys.exit(EXIT_INVALID_CONFIG)
    except LabError as e:
        logger.error(f"Experiment failed: {e.message}", extra=e.details, exc_info=True)
        sys.exit(EXIT_FAILURE)


@click.group()
@click.version_option(__version__, prog_name="measure-lab")
def cli() -> None:
    """Numerical experiments on invariant measures and Cesaro averages."""
    settings = get_settings()
    setup_logging(level=settings.log_level, format_type=settings.log_format, log_file=settings.log_file)


_seed_option = click.option("--seed", type=click.INT, default=None, help="Override the config seed.")
_out_option = click.option("--out-dir", type=click.Path(file_okay=False), default=None, help="Directory for results.")
_threads_option = click.option("--threads", type=click.IntRange(min=1), default=None, help="Worker threads.")
_timestamps_option = click.option("--timestamps", is_flag=True, help="Add a UTC timestamp header line.")


@cli.command()
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False))
@_seed_option
@_out_option
@_threads_option
@_timestamps_option
def run(config_path: str, seed: Optional[int], out_dir: Optional[str], threads: Optional[int], timestamps: bool) -> None:
    """Run the experiment described by CONFIG_PATH."""
    text = Path(config_path).read_text()
    _handle(_run_text, text, config_path, seed, out_dir, threads, timestamps)


@cli.command()
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False))
def validate(config_path: str) -> None:
    """
    Check CONFIG_PATH and print one diagnostic per problem.

    Keys are checked against the experiment the config names: a key that only
    another experiment accepts (bump.alpha outside visit_search, say) is
    reported as unknown, with the experiments that do accept it.
    """
    diagnostics = validate_config(Path(config_path).read_text(), config_path)
    for diagnostic in diagnostics:
        click.echo(str(diagnostic))
    if diagnostics:
        sys.exit(EXIT_INVALID_CONFIG)
    click.echo(f"{config_path}: ok")


@cli.command()
@click.argument("names", nargs=-1)
@click.option("--list", "list_only", is_flag=True, help="Print the built-in demo names.")
@_seed_option
@_out_option
@_threads_option
@_timestamps_option
def demo(
    names: tuple,
    list_only: bool,
    seed: Optional[int],
    out_dir: Optional[str],
    threads: Optional[int],
    timestamps: bool,
) -> None:
    """Run built-in demo configs (all of them when no NAME is given)."""
    if list_only:
        for name in demo_names():
            click.echo(name)
        return

    def run_demos() -> None:
        for name in names or demo_names():
            _run_text(demo_config(name), f"demo:{name}", seed, out_dir, threads, timestamps, name)

    _handle(run_demos)


def main() -> None:
    """Console-script entry point."""
    try:
        cli()
    except KeyboardInterrupt:
        logger.info("Interrupted")
        sys.exit(130)


if __name__ == "__main__":
    main()
