"""Simon and Shor commands."""

from pathlib import Path

import typer
from rich.console import Console
from rich.table import Table

from hsp_cli.services import logfire_service
from hsp_cli.services.models import TrialReport
from hsp_cli.services.problems import SimonInstance, bits_to_int, shor_factor, simon_solve, simon_success_bound
from hsp_cli.services.statevec import trial_rng
from hsp_cli.utils import cli_errors, show_progress, summary_table, write_report

console = Console()


@cli_errors
def simon(
    n: int = typer.Option(..., "--n", min=1, max=16, help="Bit width"),
    s: str | None = typer.Option(None, "--s", help="Hidden string, e.g. 1011 (random when omitted)"),
    seed: int = typer.Option(..., "--seed", help="Random seed"),
    repetitions: int = typer.Option(1, "--repetitions", "-r", min=1, help="Independent seeded runs"),
    out: Path | None = typer.Option(None, "--out", "-o", help="Report path"),
) -> None:
    """Recover s from f(x) = f(x xor s) over GF(2)."""
    if s is not None and len(s) != n:
        raise ValueError(f"Hidden string {s!r} must have {n} bits")
    instance = SimonInstance(n, bits_to_int(s)) if s is not None else SimonInstance.random(n, seed)
    with logfire_service.span("simon.solve", n=n, seed=seed, repetitions=repetitions):
        runs = [simon_solve(instance, seed=trial_rng(seed, rep)) for rep in range(repetitions)]
    check = TrialReport.from_outcomes(
        "simon success rate", (run.success for run in runs), simon_success_bound(n), seed=seed, params={"n": n}
    )
    payload = {**runs[0].to_dict(), "seed": seed, "check": check.model_dump()}
    if repetitions > 1:
        payload["runs"] = [run.to_dict() for run in runs]
    path = write_report(payload, out, "simon", seed)
    console.print(
        summary_table(
            f"Simon n={n}",
            {**{k: payload[k] for k in ("hidden", "recovered", "rounds")}, "success rate": check.empirical},
        )
    )
    console.print(f"[dim]Report: {path}[/dim]")
    check.verify()


@cli_errors
def shor(
    N: int = typer.Option(..., "--N", min=3, help="Odd composite to factor"),
    seed: int = typer.Option(..., "--seed", help="Random seed"),
    attempts: int = typer.Option(20, "--attempts", min=1, help="Random bases to try"),
    out: Path | None = typer.Option(None, "--out", "-o", help="Report path"),
) -> None:
    """Factor N by order finding."""
    with logfire_service.span("shor.factor", N=N, seed=seed):
        with show_progress(f"Factoring {N}...", console):
            run = shor_factor(N, seed=seed, max_attempts=attempts)
    payload = {**run.to_dict(), "seed": seed}
    path = write_report(payload, out, "shor", seed)

    table = Table(title=f"{N} = {run.factor} x {N // run.factor}")
    table.add_column("Base y", style="cyan")
    table.add_column("Order r", style="green")
    table.add_column("Outcome", style="yellow")
    for attempt in run.attempts:
        table.add_row(str(attempt.y), "-" if attempt.order is None else str(attempt.order), str(attempt.outcome))
    console.print(table)
    console.print(f"[dim]Report: {path}[/dim]")
