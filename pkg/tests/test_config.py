"""
Tests for configuration module.
"""

import pytest

from src.config import DEFAULTS, LabSettings, get_settings, reload_settings
from src.errors import ConfigurationError


class TestExperimentDefaults:
    """Test the documented numeric defaults."""

    def test_documented_values(self):
        """Test the defaults the drivers rely on."""
        assert DEFAULTS.alpha == 0.25
        assert DEFAULTS.window == 0.25
        assert DEFAULTS.horizon == 100_000
        assert DEFAULTS.candidates == 512
        assert DEFAULTS.samples_per_cell == 64
        assert DEFAULTS.trig_modes == 8
        assert DEFAULTS.hinge_centers == 16

    def test_frozen(self):
        """Test that defaults cannot be changed at runtime."""
        with pytest.raises(AttributeError):
            DEFAULTS.alpha = 0.3  # type: ignore[misc]


class TestLabSettings:
    """Test runtime settings."""

    def test_default_values(self):
        """Test default configuration values."""
        settings = LabSettings()

        assert settings.log_level == "INFO"
        assert settings.log_format == "text"
        assert settings.log_file is None
        assert settings.out_dir == "results"
        assert settings.timestamps is False
        assert settings.seed == 0
        assert settings.threads == 1

    def test_from_env(self, monkeypatch, mocker):
        """Test loading settings from LAB_* variables."""
        mocker.patch("src.config.load_dotenv")
        monkeypatch.setenv("LAB_LOG_LEVEL", "DEBUG")
        monkeypatch.setenv("LAB_LOG_FORMAT", "json")
        monkeypatch.setenv("LAB_OUT_DIR", "/tmp/out")
        monkeypatch.setenv("LAB_SEED", "7")
        monkeypatch.setenv("LAB_THREADS", "4")
        monkeypatch.setenv("LAB_TIMESTAMPS", "yes")

        settings = LabSettings.from_env()

        assert settings.log_level == "DEBUG"
        assert settings.log_format == "json"
        assert settings.out_dir == "/tmp/out"
        assert settings.seed == 7
        assert settings.threads == 4
        assert settings.timestamps is True

    def test_timestamps_flag_parsing(self, monkeypatch, mocker):
        """Test that only true/1/yes enable timestamps."""
        mocker.patch("src.config.load_dotenv")
        monkeypatch.setenv("LAB_TIMESTAMPS", "off")
        assert LabSettings.from_env().timestamps is False

        monkeypatch.setenv("LAB_TIMESTAMPS", "TRUE")
        assert LabSettings.from_env().timestamps is True

    def test_non_integer_seed(self, monkeypatch, mocker):
        """Test that a malformed seed raises ConfigurationError."""
        mocker.patch("src.config.load_dotenv")
        monkeypatch.setenv("LAB_SEED", "abc")

        with pytest.raises(ConfigurationError, match="must be integers"):
            LabSettings.from_env()

    def test_validate_invalid_threads(self):
        """Test validation of thread count."""
        with pytest.raises(ConfigurationError, match="Invalid thread count"):
            LabSettings(threads=0).validate()

    def test_validate_invalid_seed(self):
        """Test validation of seed."""
        with pytest.raises(ConfigurationError, match="Invalid seed"):
            LabSettings(seed=-1).validate()

    def test_validate_invalid_log_format(self):
        """Test validation of log format."""
        with pytest.raises(ConfigurationError, match="Invalid log format"):
            LabSettings(log_format="xml").validate()

    def test_configuration_error_is_value_error(self):
        """Test that configuration errors can be caught as ValueError."""
        with pytest.raises(ValueError):
            LabSettings(threads=0).validate()

    def test_validate_success(self):
        """Test successful validation."""
        LabSettings(threads=8, seed=3, log_format="json").validate()


class TestSettingsCache:
    """Test the module-level settings instance."""

    def test_get_settings_is_cached(self, mocker):
        """Test that get_settings returns the same instance."""
        mocker.patch("src.config.load_dotenv")
        assert get_settings() is get_settings()

    def test_reload_settings(self, monkeypatch, mocker):
        """Test that reload_settings picks up environment changes."""
        mocker.patch("src.config.load_dotenv")
        first = get_settings()
        monkeypatch.setenv("LAB_THREADS", "3")

        second = reload_settings()

        assert second is not first
        assert second.threads == 3

    def test_get_settings_validates(self, monkeypatch, mocker):
        """Test that invalid environment settings are rejected."""
        mocker.patch("src.config.load_dotenv")
        monkeypatch.setenv("LAB_THREADS", "0")

        with pytest.raises(ConfigurationError, match="Invalid thread count"):
            get_settings()
