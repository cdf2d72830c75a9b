"""Sweep command - run a parameter sweep config to CSV."""

from pathlib import Path

import typer
from rich.console import Console

from hsp_cli.services import logfire_service
from hsp_cli.services.hsp_errors import BoundViolationError
from hsp_cli.services.sweep import load_sweep, run_section, rows_to_csv
from hsp_cli.utils import cli_errors, default_report_path, show_progress

console = Console()


@cli_errors
def sweep(
    config: Path = typer.Argument(..., exists=True, dir_okay=False, help="Sweep config ([section] + key = value)"),
    out: Path | None = typer.Option(None, "--out", "-o", help="CSV path (single-section configs only)"),
) -> None:
    """Run every section of a sweep config, one CSV per section."""
    sections = load_sweep(config)
    if out is not None and len(sections) > 1:
        raise ValueError("--out needs a single-section config; omit it to write <section>.csv files")

    failed = 0
    for section in sections:
        name = section.config.experiment
        with logfire_service.span("sweep.section", section=name, seed=section.config.seed):
            with show_progress(f"Sweeping [{name}]...", console):
                rows = run_section(section)
        path = out or default_report_path(name, None, suffix="csv")
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(rows_to_csv(section.columns, rows), encoding="utf-8")
        bad = sum(1 for row in rows if row.get("ok") is False)
        failed += bad
        console.print(f"[green]{name}:[/green] {len(rows)} rows -> {path}" + (f" [red]({bad} over bound)[/red]" if bad else ""))

    if failed:
        raise BoundViolationError("sweep rows over their bound", failed, 0)
