"""Cartesian parameter sweeps read from ``[section]`` + ``key = value`` files.

Each section names an experiment. A value is a single number, a comma list
(``1.4, 1.0, 0.5``) or an inclusive integer range (``4..10``). Range ends may
name a parameter declared earlier in the section, so ``m = 1..n`` sweeps m
up to the current n. ``seed`` and ``repetitions`` are run settings rather
than swept parameters.

    [afft]
    n = 4..10
    m = 1..n
    seed = 0
"""

from __future__ import annotations

import configparser
import csv
import io
import logging
import math
from collections.abc import Callable, Iterator
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import ValidationError

from hsp_cli.services.abelian import HspSampler
from hsp_cli.services.bounds import chernoff_check
from hsp_cli.services.hsp_errors import ConfigError
from hsp_cli.services.models import ExperimentConfig
from hsp_cli.services.problems import cyclic_hsp, cyclic_oracle
from hsp_cli.services.qft import (
    ApproxQftParams,
    FourierBackend,
    measure_afft_error,
    odd_qft_report,
    plan_odd_qft,
    run_odd_qft,
)
from hsp_cli.services.statevec import random_state, trial_rng

logger = logging.getLogger(__name__)

RUN_KEYS = ("seed", "repetitions")

Value = int | float
Row = dict[str, Any]


# =============================================================================
# Experiments
# =============================================================================


def _afft_row(params: dict[str, Value], seed: int, repetitions: int) -> Row:
    approx = ApproxQftParams(int(params["n"]), int(params["m"]))
    measured = measure_afft_error(approx, samples=int(params.get("samples", 100)), seed=seed)
    return {
        "predicted_error": approx.predicted_error,
        "measured_error": measured,
        "ok": measured <= approx.predicted_error,
    }


def _odd_qft_row(params: dict[str, Value], seed: int, repetitions: int) -> Row:
    N, epsilon = int(params["N"]), float(params["eps"])
    plan = plan_odd_qft(N, epsilon)
    residual = tv = 0.0
    for rep in range(repetitions):
        u = random_state(N, trial_rng(seed, rep))
        report = odd_qft_report(u, plan, run_odd_qft(u, plan, FourierBackend.FFT))
        residual = max(residual, report.residual)
        tv = max(tv, report.tv_distance)
    return {
        "L": plan.L,
        "M": plan.M,
        "c1": plan.c1,
        "c2": plan.c2,
        "qubits": plan.qubits,
        "qubit_bound": plan.qubit_bound,
        "residual": residual,
        "tv_distance": tv,
        "ok": residual <= epsilon and tv <= 2 * epsilon + epsilon**2,
    }


def _cyclic_hsp_row(params: dict[str, Value], seed: int, repetitions: int) -> Row:
    N, d = int(params["N"]), int(params["d"])
    oracle = cyclic_oracle(N, d)
    sampler = HspSampler(oracle.group, oracle)
    hits = sum(cyclic_hsp(N, oracle, seed=trial_rng(seed, rep), sampler=sampler).success for rep in range(repetitions))
    return {"runs": repetitions, "successes": hits, "rate": hits / repetitions}


def _chernoff_row(params: dict[str, Value], seed: int, repetitions: int) -> Row:
    report = chernoff_check(float(params["eps"]), int(params["n"]), trials=int(params.get("trials", 10_000)), seed=seed)
    return {
        "trials": report.trials,
        "failures": report.successes,
        "empirical": report.empirical,
        "bound": report.bound,
        "ok": report.passes,
    }


@dataclass(frozen=True)
class Experiment:
    """A sweepable operation: its parameters and how one row is produced."""

    required: tuple[str, ...]
    optional: tuple[str, ...]
    run: Callable[[dict[str, Value], int, int], Row]
    result_columns: tuple[str, ...]

    @property
    def params(self) -> tuple[str, ...]:
        return self.required + self.optional


EXPERIMENTS: dict[str, Experiment] = {
    "afft": Experiment(("n", "m"), ("samples",), _afft_row, ("predicted_error", "measured_error", "ok")),
    "odd-qft": Experiment(
        ("N", "eps"),
        (),
        _odd_qft_row,
        ("L", "M", "c1", "c2", "qubits", "qubit_bound", "residual", "tv_distance", "ok"),
    ),
    "cyclic-hsp": Experiment(("N", "d"), (), _cyclic_hsp_row, ("runs", "successes", "rate")),
    "chernoff": Experiment(("eps", "n"), ("trials",), _chernoff_row, ("trials", "failures", "empirical", "bound", "ok")),
}


# =============================================================================
# Parsing
# =============================================================================


def _number(text: str) -> Value:
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"Expected a number, got {text!r}") from None


def _range_end(text: str, bound: dict[str, Value]) -> int:
    text = text.strip()
    if text in bound:
        value = bound[text]
    else:
        value = _number(text)
    if not float(value).is_integer():
        raise ConfigError(f"Range ends must be integers, got {text!r}")
    return int(value)


def expand_values(text: str, bound: dict[str, Value]) -> list[Value]:
    """Values of one parameter given the parameters already fixed."""
    text = text.strip()
    if not text:
        return []
    if ".." in text:
        lo, _, hi = text.partition("..")
        return list(range(_range_end(lo, bound), _range_end(hi, bound) + 1))
    return [bound[item] if item in bound else _number(item) for item in (p.strip() for p in text.split(",")) if item]


def expand_grid(spec: dict[str, str]) -> Iterator[dict[str, Value]]:
    """Cartesian product in declaration order, later ranges seeing earlier values."""
    keys = list(spec)

    def walk(depth: int, bound: dict[str, Value]) -> Iterator[dict[str, Value]]:
        if depth == len(keys):
            yield dict(bound)
            return
        key = keys[depth]
        for value in expand_values(spec[key], bound):
            bound[key] = value
            yield from walk(depth + 1, bound)
            del bound[key]

    if keys:
        yield from walk(0, {})


@dataclass(frozen=True)
class SweepSection:
    config: ExperimentConfig
    grid: dict[str, str]

    @property
    def experiment(self) -> Experiment:
        return EXPERIMENTS[self.config.experiment]

    @property
    def columns(self) -> list[str]:
        return ["row", *self.grid, "seed", *self.experiment.result_columns]


def parse_sweep(text: str) -> list[SweepSection]:
    """Read and validate every section; unknown experiments or keys are errors."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str  # type: ignore[assignment,method-assign]
    try:
        parser.read_string(text)
    except configparser.Error as e:
        raise ConfigError(f"Malformed sweep config: {e}") from e

    sections = []
    for name in parser.sections():
        experiment = EXPERIMENTS.get(name)
        if experiment is None:
            raise ConfigError(f"Unknown sweep section [{name}]; choose from {', '.join(EXPERIMENTS)}")
        items = dict(parser.items(name))
        grid = {k: v for k, v in items.items() if k not in RUN_KEYS}
        unknown = set(grid) - set(experiment.params)
        if unknown:
            raise ConfigError(f"[{name}] has unknown parameters: {', '.join(sorted(unknown))}")
        missing = set(experiment.required) - set(grid)
        if missing:
            raise ConfigError(f"[{name}] is missing parameters: {', '.join(sorted(missing))}")
        try:
            config = ExperimentConfig(
                experiment=name,
                params=grid,
                seed=int(items.get("seed", 0)),
                repetitions=int(items.get("repetitions", 1)),
            )
        except (ValidationError, ValueError) as e:
            raise ConfigError(f"[{name}] has invalid run settings: {e}") from e
        sections.append(SweepSection(config, grid))
    return sections


def load_sweep(path: Path) -> list[SweepSection]:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"Cannot read sweep config {path}: {e}") from e
    return parse_sweep(text)


# =============================================================================
# Running
# =============================================================================


def _cell(value: Any) -> Any:
    if isinstance(value, float | np.floating):
        return repr(float(value)) if math.isfinite(value) else str(value)
    return value


def run_section(section: SweepSection) -> list[Row]:
    """One row per grid point; each row's seed is derived from the master seed and its index."""
    seed = section.config.seed or 0
    rows = []
    for index, point in enumerate(expand_grid(section.grid)):
        row_seed = int(trial_rng(seed, index).integers(2**31))
        logger.debug("sweep [%s] row %d: %s", section.config.experiment, index, point)
        result = section.experiment.run(point, row_seed, section.config.repetitions)
        rows.append({"row": index, **point, "seed": row_seed, **result})
    return rows


def rows_to_csv(columns: list[str], rows: list[Row]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({c: _cell(row.get(c)) for c in columns})
    return buffer.getvalue()
