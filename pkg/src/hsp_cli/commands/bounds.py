"""Bounds commands - Monte-Carlo and exact checks of the probability bounds."""

from pathlib import Path

import typer
from rich.console import Console

from hsp_cli.services import logfire_service
from hsp_cli.services.bounds import (
    chernoff_check,
    gcd_pair_exact,
    gcd_pair_lower_bound,
    gcd_probability_check,
    generation_probability_check,
    resolve_group,
    totient_sum_check,
)
from hsp_cli.services.models import TrialReport
from hsp_cli.utils import cli_errors, show_progress, summary_table, validate_trials_callback, write_report

app = typer.Typer()
console = Console()


def _emit(report: TrialReport, out: Path | None, command: str) -> None:
    path = write_report(report.model_dump(), out, command, report.seed)
    console.print(
        summary_table(
            f"{report.name} ({report.kind} bound)",
            {
                "trials": report.trials,
                "events": report.successes,
                "empirical": report.empirical,
                "bound": report.bound,
                "margin": report.margin,
                "sigma": report.sigma,
                **({"exact": report.exact} if report.exact is not None else {}),
            },
        )
    )
    console.print(f"[dim]Report: {path}[/dim]")
    report.verify()


TrialsOption = typer.Option(None, "--trials", help="Monte-Carlo trials (default from settings)", callback=validate_trials_callback)
SeedOption = typer.Option(..., "--seed", help="Random seed")
OutOption = typer.Option(None, "--out", "-o", help="Report path")


@app.command("chernoff")
@cli_errors
def chernoff(
    eps: float = typer.Option(0.25, "--eps", help="Vote bias epsilon in (0, 1/2)"),
    n: int = typer.Option(400, "--n", min=1, help="Votes per trial"),
    trials: int | None = TrialsOption,
    seed: int = SeedOption,
    out: Path | None = OutOption,
) -> None:
    """Majority-vote failure rate against e^(-2 eps^2 n)."""
    with logfire_service.span("bounds.chernoff", eps=eps, n=n, seed=seed):
        report = chernoff_check(eps, n, trials=trials, seed=seed)
    _emit(report, out, "bounds-chernoff")


@app.command("gcd")
@cli_errors
def gcd(
    k: int = typer.Option(8, "--k", min=2, help="Samples per trial"),
    d: int = typer.Option(1_000_000, "--d", min=2, help="Samples are uniform on 0..d-1"),
    trials: int | None = TrialsOption,
    seed: int = SeedOption,
    out: Path | None = OutOption,
) -> None:
    """P(gcd of k samples = 1) against 1 - 2^(-k/2)."""
    with logfire_service.span("bounds.gcd", k=k, d=d, seed=seed):
        report = gcd_probability_check(d, k, trials=trials, seed=seed)
    _emit(report, out, "bounds-gcd")


@app.command("gen")
@cli_errors
def gen(
    group: str = typer.Option(..., "--group", "-g", help="Abelian descriptor (Z2xZ4) or bundled table (S3, D4, Q8)"),
    t: int = typer.Option(1, "--t", min=0, help="Extra elements beyond ceil(log |G|)"),
    trials: int | None = TrialsOption,
    seed: int = SeedOption,
    out: Path | None = OutOption,
) -> None:
    """P(t + ceil(log |G|) random elements generate G) against 1 - 2^-t."""
    G = resolve_group(group)
    with logfire_service.span("bounds.gen", group=group, t=t, seed=seed):
        with show_progress("Sampling generating sets...", console):
            report = generation_probability_check(G, t, trials=trials, seed=seed)
    _emit(report, out, "bounds-gen")


@app.command("totient")
@cli_errors
def totient(
    n: int = typer.Option(10_000, "--n", min=2, help="Upper end of the totient sum"),
    out: Path | None = OutOption,
) -> None:
    """|sum phi(c) - 3n^2/pi^2| < n ln n, plus the coprime-pair probability on 0..n."""
    with logfire_service.span("bounds.totient", n=n):
        check = totient_sum_check(n)
    payload = {
        **check.to_dict(),
        "coprime_pair_probability": gcd_pair_exact(n),
        "coprime_pair_lower_bound": gcd_pair_lower_bound(n),
    }
    path = write_report(payload, out, f"bounds-totient-{n}")
    console.print(summary_table(f"Totient sum up to {n}", payload))
    console.print(f"[dim]Report: {path}[/dim]")
