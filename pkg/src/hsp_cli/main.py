"""hsp-cli - Main entry point."""

import sys
from collections.abc import Sequence

import click
import typer
from rich.console import Console

from hsp_cli import __version__
from hsp_cli.commands import bounds, ehk, graph, hsp, problems, qft, sweep
from hsp_cli.services.hsp_errors import BoundViolationError, HspError
from hsp_cli.services.logfire_service import configure_logfire
from hsp_cli.utils import EXIT_BOUND_VIOLATION, EXIT_USAGE

# Initialize Logfire for structured logging/tracing
configure_logfire()

app = typer.Typer(
    name="hsp",
    help="hsp-cli - Simulate and verify hidden subgroup algorithms from the command line.",
    no_args_is_help=True,
)

console = Console()

# Register subcommand groups
app.add_typer(qft.app, name="qft", help="Exact and approximate power-of-two QFT")
app.add_typer(graph.app, name="graph", help="Graph isomorphism reductions")
app.add_typer(bounds.app, name="bounds", help="Probability bound checks")

# Register single commands
app.command("odd-qft")(qft.odd_qft)
app.command("hsp")(hsp.hsp)
app.command("cyclic-hsp")(hsp.cyclic)
app.command("simon")(problems.simon)
app.command("shor")(problems.shor)
app.command("ehk")(ehk.ehk)
app.command("sweep")(sweep.sweep)


@app.command()
def version() -> None:
    """Show the toolkit version."""
    console.print(f"[bold]hsp-cli[/bold] v{__version__}")


@app.callback()
def main(
    ctx: typer.Context,
    debug: bool = typer.Option(False, "--debug", help="Re-raise errors with a full traceback"),
) -> None:
    """hsp-cli - Simulate and verify hidden subgroup algorithms from the command line."""
    ctx.ensure_object(dict)["debug"] = debug


def dispatch(argv: Sequence[str] | None = None) -> int:
    """Run one command line and return its exit code.

    0 on success, 2 when a checked bound is violated, 1 for usage errors.
    """
    args = list(sys.argv[1:] if argv is None else argv)
    debug = "--debug" in args
    try:
        result = app(args=args, prog_name="hsp", standalone_mode=False)
    except click.exceptions.UsageError as e:
        e.show()
        return EXIT_USAGE
    except click.exceptions.Abort:
        console.print("\n[yellow]Cancelled[/yellow]")
        return EXIT_USAGE
    except BoundViolationError as e:
        console.print(f"[red]Error:[/red] {e}")
        return EXIT_BOUND_VIOLATION
    except HspError as e:
        if debug:
            raise
        console.print(f"[red]Error:[/red] {e}")
        return EXIT_USAGE
    return result if isinstance(result, int) else 0


def run() -> None:
    """Console-script entry point."""
    sys.exit(dispatch())


if __name__ == "__main__":
    run()
