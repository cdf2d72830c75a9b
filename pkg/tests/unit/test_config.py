"""Tests for toolkit configuration with pydantic-settings."""

from __future__ import annotations

import logging
from pathlib import Path

import pytest
from pydantic import ValidationError

from hsp_cli.config import HspSettings, settings, warn_if_loose_tolerance

pytestmark = pytest.mark.unit


@pytest.fixture
def clean_env(monkeypatch):
    """Provide a clean environment without HSP env vars."""
    for name in (
        "HSP_OUTPUT_DIR",
        "HSP_DEFAULT_TRIALS",
        "HSP_NORM_TOLERANCE",
        "HSP_MAX_DENSE_ORDER",
        "HSP_MAX_EHK_TERMS",
    ):
        monkeypatch.delenv(name, raising=False)


class TestHspSettings:
    """Test HspSettings pydantic model."""

    def test_default_values(self, clean_env):
        """Test default configuration values."""
        config = HspSettings(_env_file=None)
        assert config.output_dir == Path("reports")
        assert config.default_trials == 100_000
        assert config.norm_tolerance == 1e-9
        assert config.unitary_tolerance == 1e-12
        assert config.max_dense_order == 4096
        assert config.max_diagnostic_amplitudes == 2**24
        assert config.max_ehk_terms == 2**16
        assert config.max_brute_force_vertices == 9
        assert config.max_perm_oracle_vertices == 6

    def test_env_var_loading(self, monkeypatch):
        """Test loading from environment variables."""
        monkeypatch.setenv("HSP_DEFAULT_TRIALS", "5000")
        monkeypatch.setenv("HSP_MAX_DENSE_ORDER", "1024")
        monkeypatch.setenv("HSP_OUTPUT_DIR", "/tmp/hsp-reports")

        config = HspSettings(_env_file=None)
        assert config.default_trials == 5000
        assert config.max_dense_order == 1024
        assert config.output_dir == Path("/tmp/hsp-reports")

    def test_case_insensitive_env_vars(self, monkeypatch):
        """Test that env vars are case-insensitive."""
        monkeypatch.setenv("hsp_max_ehk_terms", "128")
        assert HspSettings(_env_file=None).max_ehk_terms == 128

    def test_env_file(self, tmp_path, clean_env):
        """Test values read from a .env file."""
        env_file = tmp_path / ".env"
        env_file.write_text("HSP_MAX_EHK_TERMS=256\n", encoding="utf-8")
        assert HspSettings(_env_file=env_file).max_ehk_terms == 256

    def test_extra_env_vars_ignored(self, monkeypatch):
        """Test that unknown env vars don't cause errors."""
        monkeypatch.setenv("HSP_UNKNOWN", "ignored")
        config = HspSettings(_env_file=None)
        assert not hasattr(config, "unknown")

    @pytest.mark.parametrize("field", ["default_trials", "max_dense_order", "max_ehk_terms"])
    def test_rejects_non_positive(self, field):
        """Test counts and caps must be positive."""
        with pytest.raises(ValidationError):
            HspSettings(_env_file=None, **{field: 0})

    def test_global_instance(self):
        """Test the module-level settings object."""
        assert isinstance(settings, HspSettings)


class TestValidators:
    """Test the warning validators."""

    def test_few_trials_warns(self, caplog):
        """Test a small trial count logs a warning."""
        with caplog.at_level(logging.WARNING, logger="hsp_cli.config"):
            config = HspSettings(_env_file=None, default_trials=100)
        assert config.default_trials == 100
        assert "below 1000" in caplog.text

    def test_enough_trials_silent(self, caplog):
        """Test the default trial count does not warn."""
        with caplog.at_level(logging.WARNING, logger="hsp_cli.config"):
            HspSettings(_env_file=None, default_trials=5000)
        assert "below" not in caplog.text

    def test_loose_tolerance_warns(self, caplog):
        """Test a loose tolerance logs a warning."""
        with caplog.at_level(logging.WARNING, logger="hsp_cli.config"):
            assert warn_if_loose_tolerance(1e-3) == 1e-3
        assert "loose" in caplog.text

    def test_tight_tolerance_silent(self, caplog):
        """Test a tight tolerance passes quietly."""
        with caplog.at_level(logging.WARNING, logger="hsp_cli.config"):
            assert warn_if_loose_tolerance(1e-12) == 1e-12
        assert caplog.text == ""

    @pytest.mark.parametrize("value", [0.0, -1e-9])
    def test_non_positive_tolerance(self, value):
        """Test tolerances must be positive."""
        with pytest.raises(ValidationError):
            HspSettings(_env_file=None, norm_tolerance=value)
