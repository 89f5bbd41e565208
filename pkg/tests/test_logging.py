"""
Tests for logging configuration.
"""

import json
import logging
import sys

import pytest

from src.utils.logging_config import JSONFormatter, KeyValueFormatter, setup_logging


def make_record(message="Solved chain", **extra):
    record = logging.LogRecord("src.ulam.stationary", logging.INFO, __file__, 12, message, None, None)
    for key, value in extra.items():
        setattr(record, key, value)
    return record


@pytest.fixture(autouse=True)
def restore_root_logger():
    root = logging.getLogger()
    handlers, level = root.handlers[:], root.level
    yield
    for handler in root.handlers:
        if handler not in handlers:
            handler.close()
    root.handlers[:] = handlers
    root.setLevel(level)


class TestJSONFormatter:
    """Test JSON log records."""

    def test_extra_fields_are_top_level(self):
        """Test that structured fields appear next to the message."""
        payload = json.loads(JSONFormatter().format(make_record(classes=3, n=64)))

        assert payload["message"] == "Solved chain"
        assert payload["level"] == "INFO"
        assert payload["logger"] == "src.ulam.stationary"
        assert payload["classes"] == 3
        assert payload["n"] == 64

    def test_non_json_values(self):
        """Test that values without a JSON form are stringified."""
        payload = json.loads(JSONFormatter().format(make_record(space=object())))

        assert payload["space"].startswith("<object object")

    def test_exception(self):
        """Test that exception text is included."""
        try:
            raise ValueError("singular block")
        except ValueError:
            record = logging.LogRecord("x", logging.ERROR, __file__, 1, "failed", None, sys.exc_info())

        payload = json.loads(JSONFormatter().format(record))

        assert "singular block" in payload["exception"]


class TestKeyValueFormatter:
    """Test human-readable log records."""

    def test_extras_appended(self):
        """Test that structured fields follow the message as key=value pairs."""
        text = KeyValueFormatter().format(make_record(delta=0.01, survivors=2))

        assert "[INFO] src.ulam.stationary - Solved chain" in text
        assert text.endswith(" | delta=0.01 survivors=2")

    def test_no_extras(self):
        """Test that plain records get no separator."""
        assert " | " not in KeyValueFormatter().format(make_record())

    def test_colored_level(self):
        """Test that colored output wraps only the level name."""
        text = KeyValueFormatter(colored=True).format(make_record())

        assert "[\033[32mINFO\033[0m]" in text


class TestSetupLogging:
    """Test handler installation."""

    def test_logs_go_to_stderr(self, capsys):
        """Test that log records reach stderr and never stdout."""
        setup_logging(level="INFO", format_type="json")

        logging.getLogger("src.test").info("Running experiment", extra={"experiment": "ulam"})

        captured = capsys.readouterr()
        assert captured.out == ""
        assert json.loads(captured.err.strip().splitlines()[-1])["experiment"] == "ulam"

    def test_level_filters(self, capsys):
        """Test that records below the configured level are dropped."""
        setup_logging(level="WARNING")

        logging.getLogger("src.test").info("hidden")

        assert capsys.readouterr().err == ""

    def test_replaces_handlers(self):
        """Test that repeated setup does not stack handlers."""
        setup_logging()
        setup_logging()

        assert len(logging.getLogger().handlers) == 1

    def test_log_file(self, tmp_path):
        """Test that a log file receives JSON records."""
        path = tmp_path / "logs" / "lab.log"
        setup_logging(level="INFO", log_file=str(path))

        logging.getLogger("src.test").info("Wrote results", extra={"csv": "a.csv"})
        for handler in logging.getLogger().handlers:
            handler.flush()

        record = json.loads(path.read_text().strip().splitlines()[-1])
        assert record["csv"] == "a.csv"
