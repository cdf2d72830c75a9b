"""Pytest configuration and shared fixtures for hsp-cli tests."""

from __future__ import annotations

import pytest
from typer.testing import CliRunner

from hsp_cli.config import settings


@pytest.fixture
def cli_runner():
    """Provide a Typer CLI test runner."""
    return CliRunner()


@pytest.fixture
def report_dir(tmp_path):
    """Directory that receives default-path reports."""
    return tmp_path / "reports"


@pytest.fixture(autouse=True)
def isolated_output_dir(monkeypatch, report_dir):
    """Point report output at a temporary directory for every test."""
    monkeypatch.setenv("HSP_OUTPUT_DIR", str(report_dir))
    monkeypatch.setattr(settings, "output_dir", report_dir)
