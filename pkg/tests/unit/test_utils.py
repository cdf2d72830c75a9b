"""Tests for utility functions."""

from __future__ import annotations

import json
import logging
from io import StringIO
from pathlib import Path
from unittest.mock import patch

import click
import numpy as np
import pytest
import typer
from rich.console import Console

from hsp_cli.services.hsp_errors import BoundViolationError, CapabilityError, DomainError
from hsp_cli.utils import (
    EXIT_BOUND_VIOLATION,
    EXIT_USAGE,
    cli_errors,
    debug_enabled,
    default_report_path,
    handle_cli_error,
    show_progress,
    summary_table,
    validate_epsilon,
    validate_epsilon_callback,
    validate_positive_int,
    validate_trials_callback,
    write_report,
)

pytestmark = pytest.mark.unit


class TestCliErrors:
    """Test the error-to-exit-code decorator."""

    def test_passes_through(self):
        """Test return values are kept."""
        assert cli_errors(lambda: 42)() == 42

    def test_bound_violation_exits_two(self):
        """Test BoundViolationError maps to exit 2."""

        @cli_errors
        def command():
            raise BoundViolationError("gcd", 0.1, 0.5)

        with pytest.raises(typer.Exit) as excinfo:
            command()
        assert excinfo.value.exit_code == EXIT_BOUND_VIOLATION == 2

    @pytest.mark.parametrize(
        "error", [DomainError("bad input"), CapabilityError("Dense matrix order", 8192, 4096), ValueError("bad flag")]
    )
    def test_usage_errors_exit_one(self, error):
        """Test toolkit errors and ValueError map to exit 1."""

        @cli_errors
        def command():
            raise error

        with pytest.raises(typer.Exit) as excinfo:
            command()
        assert excinfo.value.exit_code == EXIT_USAGE == 1

    def test_keyboard_interrupt(self):
        """Test Ctrl-C exits cleanly."""

        @cli_errors
        def command():
            raise KeyboardInterrupt

        with pytest.raises(typer.Exit) as excinfo:
            command()
        assert excinfo.value.exit_code == 0

    def test_debug_reraises(self):
        """Test --debug on the root context keeps the traceback."""

        @cli_errors
        def command():
            raise DomainError("boom")

        with click.Context(click.Command("hsp"), obj={"debug": True}), pytest.raises(DomainError, match="boom"):
            command()

    def test_debug_off_without_context(self, monkeypatch):
        """Test the process argv alone does not switch on debug mode."""
        monkeypatch.setattr("sys.argv", ["hsp", "--debug"])
        assert debug_enabled() is False
        with click.Context(click.Command("hsp"), obj={"debug": False}):
            assert debug_enabled() is False

    def test_unrelated_errors_propagate(self):
        """Test programming errors are not swallowed."""

        @cli_errors
        def command():
            raise KeyError("x")

        with pytest.raises(KeyError):
            command()

    @patch("hsp_cli.utils.logfire_service")
    def test_reports_to_logfire(self, mock_logfire):
        """Test failures are forwarded to logfire."""

        @cli_errors
        def violated():
            raise BoundViolationError("gcd", 0.1, 0.5)

        @cli_errors
        def failed():
            raise DomainError("bad")

        with pytest.raises(typer.Exit):
            violated()
        with pytest.raises(typer.Exit):
            failed()
        mock_logfire.error.assert_called_once_with("bound violated", bound="gcd", observed=0.1, limit=0.5)
        mock_logfire.warn.assert_called_once_with("command failed", error="DomainError")


class TestValidators:
    """Test input validators and their typer callbacks."""

    def test_positive_int(self):
        """Test bounds on integers."""
        assert validate_positive_int(5) == 5
        assert validate_positive_int(0, min_val=0) == 0
        with pytest.raises(ValueError, match="at least 1"):
            validate_positive_int(0)
        with pytest.raises(ValueError, match="at most 10"):
            validate_positive_int(11, max_val=10)

    @pytest.mark.parametrize("value", [1e-6, 1.0, 2**0.5])
    def test_epsilon_accepts(self, value):
        """Test (0, sqrt(2)]."""
        assert validate_epsilon(value) == value

    @pytest.mark.parametrize("value", [0.0, -0.5, 1.5])
    def test_epsilon_rejects(self, value):
        """Test values outside (0, sqrt(2)]."""
        with pytest.raises(ValueError, match="Epsilon"):
            validate_epsilon(value)
        with pytest.raises(typer.BadParameter):
            validate_epsilon_callback(value)

    def test_trials_callback(self):
        """Test None falls through and bad counts are rejected."""
        assert validate_trials_callback(None) is None
        assert validate_trials_callback(1000) == 1000
        with pytest.raises(typer.BadParameter):
            validate_trials_callback(0)
        with pytest.raises(typer.BadParameter):
            validate_trials_callback(10**9)


class TestReports:
    """Test report paths and JSON writing."""

    def test_default_path(self, report_dir):
        """Test seeded and deterministic names."""
        assert default_report_path("simon", 3) == report_dir / "simon-3.json"
        assert default_report_path("qft-verify-4", None) == report_dir / "qft-verify-4.json"
        assert default_report_path("afft", None, suffix="csv") == report_dir / "afft.csv"

    def test_write_default_path(self, report_dir):
        """Test the directory is created."""
        path = write_report({"a": 1}, None, "simon", 7)
        assert path == report_dir / "simon-7.json"
        assert json.loads(path.read_text(encoding="utf-8")) == {"a": 1}

    def test_write_numpy_values(self, tmp_path):
        """Test numpy scalars, arrays and paths serialize."""
        payload = {
            "int": np.int64(3),
            "float": np.float64(0.5),
            "flag": np.bool_(True),
            "array": np.arange(3),
            "path": Path("reports/x.json"),
        }
        path = write_report(payload, tmp_path / "out.json", "x")
        assert json.loads(path.read_text(encoding="utf-8")) == {
            "int": 3,
            "float": 0.5,
            "flag": True,
            "array": [0, 1, 2],
            "path": "reports/x.json",
        }

    def test_write_is_deterministic(self, tmp_path):
        """Test identical payloads give identical bytes."""
        payload = {"b": [1.25, 2], "a": {"x": np.float64(1 / 3)}}
        first = write_report(payload, tmp_path / "1.json", "x").read_bytes()
        second = write_report(payload, tmp_path / "2.json", "x").read_bytes()
        assert first == second

    def test_write_rejects_unknown_types(self, tmp_path):
        """Test non-serializable values raise TypeError."""
        with pytest.raises(TypeError, match="object"):
            write_report({"x": object()}, tmp_path / "x.json", "x")

    def test_write_logs(self, tmp_path, caplog):
        """Test the written path is logged."""
        with caplog.at_level(logging.INFO, logger="hsp_cli.utils"):
            write_report({}, tmp_path / "x.json", "simon")
        assert "wrote simon report" in caplog.text


class TestDisplay:
    """Test console helpers."""

    def test_summary_table(self):
        """Test floats are shortened and other values printed as-is."""
        output = StringIO()
        console = Console(file=output, width=120)
        console.print(summary_table("Run", {"error": 0.123456789, "qubits": 18, "ok": True}))
        text = output.getvalue()
        assert "0.123457" in text
        assert "18" in text
        assert "True" in text

    def test_show_progress(self):
        """Test the spinner wraps a block."""
        console = Console(file=StringIO())
        ran = []
        with show_progress("Working...", console):
            ran.append(True)
        assert ran == [True]

    def test_handle_cli_error(self, caplog):
        """Test the message, details and hint are printed and the error logged."""
        output = StringIO()
        console = Console(file=output, width=120)
        with caplog.at_level(logging.ERROR, logger="hsp_cli.utils"):
            handle_cli_error(console, DomainError("N must be odd"), "Invalid modulus", hint="Try --N 13")
        text = output.getvalue()
        assert "Error: Invalid modulus" in text
        assert "Details: N must be odd" in text
        assert "Try --N 13" in text
        assert "Invalid modulus" in caplog.text

    def test_handle_cli_error_same_message(self):
        """Test details are omitted when they repeat the message."""
        output = StringIO()
        handle_cli_error(Console(file=output, width=120), DomainError("bad"), "bad")
        assert "Details" not in output.getvalue()
