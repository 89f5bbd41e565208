"""
Tests for experiment configs, the runner and the measure-lab command line.
"""

import hashlib

import pytest
from click.testing import CliRunner

from src.cli.demos import demo_config, demo_names
from src.cli.experiment_config import (
    ConfigValidationError,
    ExperimentKind,
    parse_config,
    validate_config,
)
from src.cli.main import cli
from src.cli.runner import header_lines, render_csv, run_experiment
from src.errors import ConfigurationError

VISIT_CONFIG = """\
experiment = visit_search

[map]
family = doubling

[search]
p = 0
eps = 0.1
sigma = 0.05

[visit]
set = (-0.1, 0.1)
beta = 0.02

[bump]
alpha = 0.7
"""

ULAM_CONFIG = """\
# identity on four cells
experiment = ulam
seed = 7

[map]
family = identity
space = interval

[grid]
n = 4
method = exact_pwl
"""

FAST_DEMOS = ["w1_pair", "ulam_doubling", "ulam_identity", "continuity_rotation", "hausdorff_rotation"]


@pytest.fixture
def runner(monkeypatch, mocker):
    """CLI runner with a quiet, .env-free environment."""
    mocker.patch("src.config.load_dotenv")
    monkeypatch.setenv("LAB_LOG_LEVEL", "ERROR")
    return CliRunner()


@pytest.fixture
def write_config(tmp_path):
    def write(text, name="experiment.ini"):
        path = tmp_path / name
        path.write_text(text)
        return path

    return write


class TestParseConfig:
    """Test the config grammar and its diagnostics."""

    def test_sections_and_types(self):
        """Test that sections prefix keys and values are converted."""
        config = parse_config(ULAM_CONFIG, "ulam.ini")

        assert config.experiment is ExperimentKind.ULAM
        assert config.get("grid.n") == 4
        assert config.seed == 7
        assert config.lines["grid.n"] == 10
        assert config.grid.h == 0.25
        assert config.name == "ulam"

    def test_out_of_range_value_points_at_line(self):
        """Test that a bad bump width is reported with its line and accepted range."""
        diagnostics = validate_config(VISIT_CONFIG, "cfg.ini")

        assert [str(d) for d in diagnostics] == ["cfg.ini:16: bump.alpha: must be a value in (0, 1/2), got 0.7"]

    def test_missing_required_key(self):
        """Test that a missing grid size is reported without a line number."""
        text = ULAM_CONFIG.replace("n = 4\n", "")

        diagnostics = validate_config(text, "cfg.ini")

        assert [str(d) for d in diagnostics] == ["cfg.ini: grid.n: required key is missing"]

    def test_missing_experiment(self):
        """Test that a config must name its experiment."""
        assert [str(d) for d in validate_config("[map]\nfamily = doubling\n", "cfg.ini")] == [
            "cfg.ini: experiment: required key is missing"
        ]

    def test_unknown_experiment(self):
        """Test that the accepted experiment names are listed."""
        (diagnostic,) = validate_config("experiment = chaos\n", "cfg.ini")

        assert diagnostic.line == 1
        assert "unknown experiment 'chaos'; expected one of: ulam, wasserstein" in diagnostic.message

    def test_duplicate_key(self):
        """Test that a repeated key points back at its first line."""
        text = ULAM_CONFIG + "n = 8\n"

        (diagnostic,) = validate_config(text, "cfg.ini")

        assert diagnostic.key == "grid.n"
        assert diagnostic.message == "duplicate key (first set on line 10)"

    def test_unknown_key(self):
        """Test that keys of other experiments are rejected."""
        (diagnostic,) = validate_config(ULAM_CONFIG + "\n[visit]\nbeta = 0.1\n", "cfg.ini")

        assert str(diagnostic) == "cfg.ini:14: visit.beta: unknown key for a ulam experiment (used by visit_search)"

    def test_bump_width_outside_visit_search(self):
        """Test that a bump width under another experiment names the experiment that accepts it."""
        text = demo_config("birkhoff_golden") + "\n[bump]\nalpha = 0.2\n"

        (diagnostic,) = validate_config(text, "cfg.ini")

        assert diagnostic.key == "bump.alpha"
        assert diagnostic.message == "unknown key for a birkhoff experiment (used by visit_search)"

    def test_key_no_experiment_uses(self):
        """Test that a key no experiment accepts gets the plain diagnostic."""
        (diagnostic,) = validate_config(ULAM_CONFIG + "colour = red\n", "cfg.ini")

        assert diagnostic.message == "unknown key for a ulam experiment"

    def test_all_problems_in_one_pass(self):
        """Test that independent problems are all reported together."""
        text = ULAM_CONFIG.replace("n = 4", "n = 1").replace("seed = 7", "seed = x")

        keys = [d.key for d in validate_config(text, "cfg.ini")]

        assert keys == ["seed", "grid.n"]

    def test_continuity_probe_needs_three_deltas(self):
        """Test the minimum sweep length of a continuity probe."""
        text = demo_config("continuity_rotation").replace("0.001, 0.0005, 0.00025", "0.001, 0.0005")

        (diagnostic,) = validate_config(text, "cfg.ini")

        assert diagnostic.message == "a continuity probe needs at least 3 deltas"

    def test_deltas_must_decrease(self):
        """Test that sweeps are listed from the largest amplitude down."""
        text = demo_config("continuity_rotation").replace("0.001, 0.0005, 0.00025", "0.00025, 0.0005, 0.001")

        (diagnostic,) = validate_config(text, "cfg.ini")

        assert diagnostic.message == "deltas must be listed in decreasing order"

    def test_non_invertible_two_sided(self):
        """Test that two-sided averages need an invertible map."""
        text = demo_config("birkhoff_golden").replace("family = rotation", "family = doubling")
        text = text.replace("params = 0.6180339887498949\n", "") + "two_sided = true\n"

        (diagnostic,) = validate_config(text, "cfg.ini")

        assert diagnostic.key == "orbit.two_sided"
        assert "not invertible" in diagnostic.message

    def test_parse_raises_with_diagnostics(self):
        """Test that parse_config carries every diagnostic in its error."""
        with pytest.raises(ConfigValidationError) as exc_info:
            parse_config(VISIT_CONFIG, "cfg.ini")

        assert len(exc_info.value.diagnostics) == 1
        assert isinstance(exc_info.value, ConfigurationError)

    def test_digest_ignores_run_settings(self):
        """Test that seed, threads and output name do not change the config hash."""
        base = parse_config(ULAM_CONFIG)
        reseeded = parse_config(ULAM_CONFIG.replace("seed = 7", "seed = 8\nthreads = 4\noutput.name = other"))
        resized = parse_config(ULAM_CONFIG.replace("n = 4", "n = 8"))

        assert base.digest() == reseeded.digest()
        assert base.digest() != resized.digest()
        assert base.digest() == hashlib.sha256(base.normalized().encode("utf-8")).hexdigest()

    @pytest.mark.parametrize("name", demo_names())
    def test_demos_are_valid(self, name):
        """Test that every built-in demo passes validation."""
        assert validate_config(demo_config(name), f"demo:{name}") == []

    def test_unknown_demo(self):
        """Test that unknown demo names are rejected."""
        with pytest.raises(ConfigurationError, match="Unknown demo 'nope'"):
            demo_config("nope")


class TestRunner:
    """Test result files."""

    def test_headers(self):
        """Test the provenance header lines."""
        config = parse_config(ULAM_CONFIG)

        headers = header_lines(config, seed=3)

        assert headers[0] == "# experiment: ulam"
        assert headers[1] == f"# config_sha256: {config.digest()}"
        assert headers[2] == "# seed: 3"
        assert headers[3].startswith("# version: ")
        assert header_lines(config, seed=3, timestamps=True)[4].startswith("# timestamp: ")

    def test_run_writes_csv_and_summary(self, tmp_path):
        """Test that a run writes both files under the config name."""
        result = run_experiment(parse_config(ULAM_CONFIG), tmp_path)

        assert result.csv_path == tmp_path / "ulam.csv"
        csv_lines = result.csv_path.read_text().splitlines()
        assert csv_lines[2] == "# seed: 7"
        assert csv_lines[4] == "class,cell,support,weight"
        assert len(csv_lines) == 5 + 4
        summary = result.summary_path.read_text()
        assert "map = identity" in summary
        assert "classes = 4" in summary

    def test_seed_override(self, tmp_path):
        """Test that an explicit seed replaces the config seed in the headers."""
        result = run_experiment(parse_config(ULAM_CONFIG), tmp_path, seed=11, name="custom")

        assert result.csv_path.name == "custom.csv"
        assert "# seed: 11" in result.headers

    def test_wasserstein_row(self, tmp_path):
        """Test the W1 demo value and the column order of its row."""
        result = run_experiment(parse_config(demo_config("w1_pair")), tmp_path)

        row = result.output.rows[0]
        assert row["w1"] == pytest.approx(0.1)
        assert row["transport_cost"] == pytest.approx(0.1, abs=1e-9)
        assert row["dual_lower_bound"] <= row["w1"] + 1e-12
        assert render_csv(result.output).startswith("w1,transport_cost,dual_lower_bound\n")


class TestCommandLine:
    """Test the measure-lab commands and their exit codes."""

    def test_validate_ok(self, runner, write_config):
        """Test that a valid config is acknowledged."""
        path = write_config(ULAM_CONFIG)

        result = runner.invoke(cli, ["validate", str(path)])

        assert result.exit_code == 0
        assert f"{path}: ok" in result.output

    def test_validate_reports_line(self, runner, write_config):
        """Test that validation failures exit 2 with a line-numbered diagnostic."""
        path = write_config(VISIT_CONFIG)

        result = runner.invoke(cli, ["validate", str(path)])

        assert result.exit_code == 2
        assert f"{path}:16: bump.alpha: must be a value in (0, 1/2), got 0.7" in result.output

    def test_validate_help_mentions_experiment_keys(self, runner):
        """Test that validate documents per-experiment keys."""
        result = runner.invoke(cli, ["validate", "--help"])

        assert result.exit_code == 0
        assert "bump.alpha outside visit_search" in " ".join(result.output.split())

    def test_run_invalid_config(self, runner, write_config, tmp_path):
        """Test that run refuses an invalid config without writing results."""
        path = write_config(ULAM_CONFIG.replace("n = 4\n", ""))
        out_dir = tmp_path / "out"

        result = runner.invoke(cli, ["run", str(path), "--out-dir", str(out_dir)])

        assert result.exit_code == 2
        assert f"{path}: grid.n: required key is missing" in result.output
        assert not out_dir.exists()

    def test_run_writes_results(self, runner, write_config, tmp_path):
        """Test that run prints the summary and the written paths."""
        path = write_config(ULAM_CONFIG)
        out_dir = tmp_path / "out"

        result = runner.invoke(cli, ["run", str(path), "--out-dir", str(out_dir), "--seed", "5"])

        assert result.exit_code == 0
        assert f"csv = {out_dir / 'ulam.csv'}" in result.output
        assert "# seed: 5" in (out_dir / "ulam.csv").read_text()

    def test_run_uses_env_out_dir(self, runner, write_config, tmp_path, monkeypatch):
        """Test that LAB_OUT_DIR is the default output directory."""
        monkeypatch.setenv("LAB_OUT_DIR", str(tmp_path / "env-out"))

        result = runner.invoke(cli, ["run", str(write_config(ULAM_CONFIG))])

        assert result.exit_code == 0
        assert (tmp_path / "env-out" / "ulam.summary.txt").exists()

    def test_demo_list(self, runner):
        """Test that --list prints every demo name."""
        result = runner.invoke(cli, ["demo", "--list"])

        assert result.exit_code == 0
        assert result.output.split() == demo_names()

    def test_unknown_demo(self, runner, tmp_path):
        """Test that an unknown demo exits 2."""
        result = runner.invoke(cli, ["demo", "nope", "--out-dir", str(tmp_path)])

        assert result.exit_code == 2
        assert "error: Unknown demo 'nope'" in result.output

    def test_demo_files_named_after_demo(self, runner, tmp_path):
        """Test that demo results are written under the demo name."""
        result = runner.invoke(cli, ["demo", "ulam_identity", "--out-dir", str(tmp_path)])

        assert result.exit_code == 0
        assert (tmp_path / "ulam_identity.csv").exists()
        assert (tmp_path / "ulam_identity.summary.txt").exists()

    def test_version(self, runner):
        """Test the version option."""
        result = runner.invoke(cli, ["--version"])

        assert result.exit_code == 0
        assert "measure-lab" in result.output


class TestDeterminism:
    """Test that reruns with the same seed reproduce results byte for byte."""

    def _run_twice(self, runner, tmp_path, names):
        outputs = []
        for attempt in ("first", "second"):
            out_dir = tmp_path / attempt
            result = runner.invoke(cli, ["demo", *names, "--seed", "42", "--out-dir", str(out_dir)])
            assert result.exit_code == 0, result.output
            outputs.append({path.name: path.read_bytes() for path in sorted(out_dir.iterdir())})
        return outputs

    def test_fast_demos(self, runner, tmp_path):
        """Test byte-identical results of the quick demos."""
        first, second = self._run_twice(runner, tmp_path, FAST_DEMOS)

        assert len(first) == 2 * len(FAST_DEMOS)
        assert first == second

    def test_threads_do_not_change_results(self, runner, tmp_path):
        """Test that the continuity sweep gives the same files on one and four threads."""
        outputs = []
        for threads in ("1", "4"):
            out_dir = tmp_path / threads
            result = runner.invoke(
                cli, ["demo", "continuity_rotation", "--threads", threads, "--out-dir", str(out_dir)]
            )
            assert result.exit_code == 0, result.output
            outputs.append((out_dir / "continuity_rotation.csv").read_bytes())

        assert outputs[0] == outputs[1]

    @pytest.mark.slow
    def test_all_demos(self, runner, tmp_path):
        """Test byte-identical results of every demo."""
        first, second = self._run_twice(runner, tmp_path, demo_names())

        assert first == second
