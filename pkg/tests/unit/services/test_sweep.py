"""Tests for sweep config parsing and execution."""

from __future__ import annotations

import csv
import io

import pytest

from hsp_cli.services.hsp_errors import ConfigError
from hsp_cli.services.sweep import (
    EXPERIMENTS,
    expand_grid,
    expand_values,
    load_sweep,
    parse_sweep,
    rows_to_csv,
    run_section,
)

pytestmark = pytest.mark.unit

AFFT = """
[afft]
n = 2..3
m = 1..n   # up to the current n
samples = 4
seed = 5
"""


class TestExpandValues:
    """Test value lists and ranges."""

    def test_single(self):
        """Test a lone number."""
        assert expand_values("7", {}) == [7]

    def test_list(self):
        """Test a comma list keeps number types."""
        assert expand_values("1.4, 1.0, 0.5", {}) == [1.4, 1.0, 0.5]
        assert expand_values("3,5,", {}) == [3, 5]

    def test_range(self):
        """Test inclusive integer ranges."""
        assert expand_values("4..6", {}) == [4, 5, 6]
        assert expand_values("5..4", {}) == []

    def test_range_names_earlier_parameter(self):
        """Test a range end bound to a declared value."""
        assert expand_values("1..n", {"n": 3}) == [1, 2, 3]
        assert expand_values("n", {"n": 3}) == [3]

    def test_empty(self):
        """Test an empty value sweeps nothing."""
        assert expand_values("  ", {}) == []

    @pytest.mark.parametrize("text", ["abc", "1..x", "1.5..3"])
    def test_rejects(self, text):
        """Test non-numbers and fractional range ends."""
        with pytest.raises(ConfigError):
            expand_values(text, {})


class TestExpandGrid:
    """Test Cartesian products."""

    def test_dependent_ranges(self):
        """Test later ranges see earlier values."""
        points = [(p["n"], p["m"]) for p in expand_grid({"n": "2..3", "m": "1..n"})]
        assert points == [(2, 1), (2, 2), (3, 1), (3, 2), (3, 3)]

    def test_empty_spec(self):
        """Test no parameters give no rows."""
        assert list(expand_grid({})) == []


class TestParseSweep:
    """Test sweep config validation."""

    def test_section(self):
        """Test run settings are split from the grid."""
        (section,) = parse_sweep(AFFT)
        assert section.config.experiment == "afft"
        assert section.config.seed == 5
        assert section.config.repetitions == 1
        assert section.grid == {"n": "2..3", "m": "1..n", "samples": "4"}
        assert section.columns == ["row", "n", "m", "samples", "seed", "predicted_error", "measured_error", "ok"]

    def test_multiple_sections(self):
        """Test every experiment may appear."""
        text = "[chernoff]\neps = 0.2\nn = 10\n[cyclic-hsp]\nN = 12\nd = 4\nrepetitions = 3\n"
        sections = parse_sweep(text)
        assert [s.config.experiment for s in sections] == ["chernoff", "cyclic-hsp"]
        assert sections[1].config.repetitions == 3

    @pytest.mark.parametrize(
        ("text", "match"),
        [
            ("[shor]\nN = 15\n", "Unknown sweep section"),
            ("[chernoff]\neps = 0.1\nn = 10\nk = 2\n", "unknown parameters"),
            ("[chernoff]\neps = 0.1\n", "missing parameters"),
            ("[chernoff]\neps = 0.1\nn = 10\nrepetitions = 0\n", "invalid run settings"),
            ("[chernoff]\neps = 0.1\nn = 10\nseed = x\n", "invalid run settings"),
            ("eps = 0.1\n", "Malformed"),
        ],
    )
    def test_rejects(self, text, match):
        """Test malformed configs raise ConfigError."""
        with pytest.raises(ConfigError, match=match):
            parse_sweep(text)

    def test_load_missing_file(self, tmp_path):
        """Test unreadable paths raise ConfigError."""
        with pytest.raises(ConfigError, match="Cannot read"):
            load_sweep(tmp_path / "missing.ini")

    def test_load(self, tmp_path):
        """Test reading from disk."""
        path = tmp_path / "afft.ini"
        path.write_text(AFFT, encoding="utf-8")
        assert load_sweep(path)[0].config.experiment == "afft"

    def test_registry(self):
        """Test the sweepable experiments."""
        assert set(EXPERIMENTS) == {"afft", "odd-qft", "cyclic-hsp", "chernoff"}


class TestRunSection:
    """Test sweep execution."""

    def test_afft_rows(self):
        """Test one row per grid point and the bound holds."""
        rows = run_section(parse_sweep(AFFT)[0])
        assert [row["row"] for row in rows] == [0, 1, 2, 3, 4]
        assert all(row["ok"] for row in rows)
        assert all(row["measured_error"] <= row["predicted_error"] for row in rows)

    def test_rows_replay(self):
        """Test equal configs give equal rows and seeds differ per row."""
        section = parse_sweep(AFFT)[0]
        first, second = run_section(section), run_section(section)
        assert first == second
        assert len({row["seed"] for row in first}) == len(first)

    def test_chernoff_rows(self):
        """Test the Chernoff experiment."""
        (section,) = parse_sweep("[chernoff]\neps = 0.25\nn = 50, 100\ntrials = 2000\n")
        rows = run_section(section)
        assert [row["n"] for row in rows] == [50, 100]
        assert all(row["trials"] == 2000 and row["ok"] for row in rows)

    def test_cyclic_rows(self):
        """Test the cyclic HSP success rate column."""
        (section,) = parse_sweep("[cyclic-hsp]\nN = 12\nd = 4\nrepetitions = 4\n")
        (row,) = run_section(section)
        assert row["runs"] == 4
        assert 0 <= row["rate"] <= 1

    def test_csv(self):
        """Test the header and float formatting."""
        section = parse_sweep(AFFT)[0]
        text = rows_to_csv(section.columns, run_section(section))
        records = list(csv.DictReader(io.StringIO(text)))
        assert text.splitlines()[0] == ",".join(section.columns)
        assert len(records) == 5
        assert records[0]["ok"] == "True"
        assert float(records[0]["predicted_error"]) > 0

    def test_csv_non_finite(self):
        """Test infinities are written as text."""
        text = rows_to_csv(["row", "value"], [{"row": 0, "value": float("inf")}])
        assert text.splitlines()[1] == "0,inf"
