"""Shared utilities for hsp-cli commands."""

import json
import logging
from collections.abc import Callable
from contextlib import contextmanager
from functools import wraps
from pathlib import Path
from typing import TYPE_CHECKING, Any

import click
import numpy as np
import typer
from rich.console import Console
from rich.progress import Progress, SpinnerColumn, TextColumn
from rich.table import Table

from hsp_cli import config
from hsp_cli.services import logfire_service
from hsp_cli.services.hsp_errors import BoundViolationError, HspError

if TYPE_CHECKING:
    from collections.abc import Generator

logger = logging.getLogger(__name__)

# Exit codes
EXIT_USAGE = 1
EXIT_BOUND_VIOLATION = 2


def debug_enabled() -> bool:
    """True when the running command line was given the root --debug flag."""
    ctx = click.get_current_context(silent=True)
    if ctx is None:
        return False
    obj = ctx.find_root().obj
    return isinstance(obj, dict) and bool(obj.get("debug"))


def cli_errors(func: Callable[..., Any]) -> Callable[..., Any]:
    """Decorator mapping toolkit errors onto exit codes.

    - BoundViolationError: message in red, exit 2
    - Other toolkit errors and ValueError: message in red, exit 1
    - KeyboardInterrupt: "Cancelled", exit 0
    - Debug mode (--debug flag): the traceback is re-raised

    Example:
        @app.command()
        @cli_errors
        def verify(...):
            ...
    """

    @wraps(func)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return func(*args, **kwargs)
        except KeyboardInterrupt:
            Console().print("\n[yellow]Cancelled[/yellow]")
            raise typer.Exit(0) from None
        except BoundViolationError as e:
            logfire_service.error("bound violated", bound=e.name, observed=e.observed, limit=e.bound)
            handle_cli_error(Console(), e, "A checked bound does not hold")
            raise typer.Exit(EXIT_BOUND_VIOLATION) from None
        except (HspError, ValueError) as e:
            logfire_service.warn("command failed", error=type(e).__name__)
            handle_cli_error(Console(), e, str(e))
            if debug_enabled():
                raise
            raise typer.Exit(EXIT_USAGE) from None

    return wrapper


@contextmanager
def show_progress(description: str, console: Console) -> "Generator[None]":
    """Display a spinner while a simulation runs.

    Args:
        description: Text to show next to spinner
        console: Rich console instance
    """
    with Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        console=console,
        transient=True,
    ) as progress:
        progress.add_task(description, total=None)
        yield


def validate_positive_int(value: int, min_val: int = 1, max_val: int | None = None) -> int:
    """Validate that an integer is within bounds.

    Args:
        value: Integer to validate
        min_val: Minimum allowed value (default: 1)
        max_val: Maximum allowed value (default: None, no upper limit)

    Returns:
        The validated integer

    Raises:
        ValueError: If value is out of range
    """
    if value < min_val:
        raise ValueError(f"Value must be at least {min_val}, got {value}")
    if max_val is not None and value > max_val:
        raise ValueError(f"Value must be at most {max_val}, got {value}")
    return value


def validate_epsilon(value: float) -> float:
    """Validate a target accuracy in (0, sqrt(2)].

    Raises:
        ValueError: If epsilon is out of range
    """
    if not 0 < value <= 2**0.5 + 1e-12:
        raise ValueError(f"Epsilon must lie in (0, sqrt(2)], got {value}")
    return value


def validate_trials_callback(value: int | None) -> int | None:
    """Typer callback for --trials; None falls back to the configured default."""
    if value is None:
        return None
    try:
        return validate_positive_int(value, min_val=1, max_val=10**8)
    except ValueError as e:
        raise typer.BadParameter(str(e)) from e


def validate_epsilon_callback(value: float) -> float:
    """Typer callback for --eps."""
    try:
        return validate_epsilon(value)
    except ValueError as e:
        raise typer.BadParameter(str(e)) from e


def default_report_path(command: str, seed: int | None, suffix: str = "json") -> Path:
    """<output_dir>/<command>-<seed>.json, or <command>.json for deterministic commands."""
    name = command if seed is None else f"{command}-{seed}"
    return Path(config.settings.output_dir) / f"{name}.{suffix}"


def _to_builtin(value: Any) -> Any:
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def write_report(payload: dict[str, Any], out: Path | None, command: str, seed: int | None = None) -> Path:
    """Write a JSON report and return its path; identical payloads give identical bytes."""
    path = out or default_report_path(command, seed)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, default=_to_builtin) + "\n", encoding="utf-8")
    logger.info("wrote %s report to %s", command, path)
    logfire_service.info("report written", command=command, path=str(path))
    return path


def summary_table(title: str, rows: dict[str, Any]) -> Table:
    """Two-column key/value table for a report summary."""
    table = Table(title=title)
    table.add_column("Field", style="cyan")
    table.add_column("Value", style="green")
    for key, value in rows.items():
        table.add_row(key, f"{value:.6g}" if isinstance(value, float) else str(value))
    return table


def handle_cli_error(
    console: Console,
    error: Exception,
    message: str,
    hint: str | None = None,
) -> None:
    """Log the full exception, then display a user-friendly message.

    Args:
        console: Rich console for output
        error: The exception that occurred
        message: User-friendly error message to display
        hint: Optional helpful hint for the user

    Note:
        After calling this function, the caller should raise typer.Exit
        with the matching exit code.
    """
    logger.exception("CLI error occurred: %s", message)

    console.print(f"[red]Error:[/red] {message}")
    if error and str(error) and str(error) != message:
        console.print(f"[dim]Details: {error}[/dim]")
    if hint:
        console.print(f"[dim]{hint}[/dim]")
