"""Abelian HSP commands - the general solver and the cyclic gcd variant."""

import time
from pathlib import Path

import typer
from rich.console import Console

from hsp_cli.services import logfire_service
from hsp_cli.services.abelian import AbelianGroup, CosetOracle, HspSampler, parse_subgroup, random_subgroup, solve_hsp
from hsp_cli.services.models import ExperimentConfig, RunReport, TrialReport
from hsp_cli.services.problems import CYCLIC_SUCCESS_BOUND, cyclic_hsp, cyclic_oracle, cyclic_success_probability
from hsp_cli.services.statevec import trial_rng
from hsp_cli.utils import cli_errors, summary_table, write_report

console = Console()


@cli_errors
def hsp(
    group: str = typer.Option(..., "--group", "-g", help="Group descriptor, e.g. Z4xZ2 or Z2^3"),
    hidden: str | None = typer.Option(None, "--hidden", help="Hidden subgroup generators, e.g. \"[(2,0)]\""),
    t1: int | None = typer.Option(None, "--t1", min=0, help="Extra Fourier samples"),
    t2: int | None = typer.Option(None, "--t2", min=0, help="Extra solution samples"),
    seed: int = typer.Option(..., "--seed", help="Random seed"),
    repetitions: int = typer.Option(1, "--repetitions", "-r", min=1, help="Independent seeded runs"),
    out: Path | None = typer.Option(None, "--out", "-o", help="Report path"),
) -> None:
    """Recover a hidden subgroup of a finite abelian group from coset-state samples.

    Without --hidden a random subgroup is hidden. Run k draws from a
    seed derived from (seed, k), so adding repetitions keeps earlier runs.
    """
    G = AbelianGroup.parse(group)
    H = parse_subgroup(G, hidden) if hidden is not None else random_subgroup(G, seed)
    oracle = CosetOracle.for_subgroup(G, H)
    sampler = HspSampler(G, oracle)
    config = ExperimentConfig(
        experiment="hsp",
        params={"group": str(G), "hidden": H.to_text(), "t1": t1, "t2": t2},
        seed=seed,
        output=out,
        repetitions=repetitions,
    )

    started = time.perf_counter()
    results = []
    with logfire_service.span("hsp.solve", group=str(G), hidden=H.to_text(), seed=seed, repetitions=repetitions):
        for rep in range(repetitions):
            run = solve_hsp(G, oracle, t1=t1, t2=t2, seed=trial_rng(seed, rep), sampler=sampler)
            results.append({**run.to_dict(), "recovered_elements": [list(g) for g in run.recovered.elements]})

    check = TrialReport.from_outcomes(
        "hsp success rate",
        (r["success"] for r in results),
        run.success_bound,
        seed=seed,
        params={"group": str(G), "order": G.order, "t1": run.t1, "t2": run.t2},
    )
    report = RunReport(
        config=config,
        results=results,
        aggregate={"success_rate": check.empirical, "success_bound": run.success_bound, "check": check.model_dump()},
        wall_clock=time.perf_counter() - started,
    )
    path = write_report(report.model_dump(), out, "hsp", seed)
    console.print(
        summary_table(
            f"HSP over {G}",
            {
                "hidden": H.to_text(),
                "recovered": results[-1]["recovered"],
                "success rate": report.aggregate["success_rate"],
                "success bound": run.success_bound,
                "seconds": report.wall_clock,
            },
        )
    )
    console.print(f"[dim]Report: {path}[/dim]")
    check.verify()


@cli_errors
def cyclic(
    N: int = typer.Option(..., "--N", min=1, help="Group order"),
    d: int = typer.Option(..., "--d", min=1, help="Hidden generator, a divisor of N"),
    samples: int = typer.Option(8, "--samples", min=1, help="Fourier samples per run"),
    seed: int = typer.Option(..., "--seed", help="Random seed"),
    repetitions: int = typer.Option(1, "--repetitions", "-r", min=1, help="Independent seeded runs"),
    out: Path | None = typer.Option(None, "--out", "-o", help="Report path"),
) -> None:
    """Find d with H = <d> in Z_N as N / gcd(N, samples)."""
    oracle = cyclic_oracle(N, d)
    sampler = HspSampler(oracle.group, oracle)
    config = ExperimentConfig(
        experiment="cyclic-hsp",
        params={"N": N, "d": d, "samples": samples},
        seed=seed,
        output=out,
        repetitions=repetitions,
    )

    started = time.perf_counter()
    with logfire_service.span("cyclic_hsp.solve", N=N, d=d, seed=seed, repetitions=repetitions):
        results = [
            cyclic_hsp(N, oracle, seed=trial_rng(seed, rep), samples=samples, sampler=sampler).to_dict()
            for rep in range(repetitions)
        ]

    exact = cyclic_success_probability(d, samples)
    check = TrialReport.from_outcomes(
        "cyclic hsp success rate",
        (r["success"] for r in results),
        min(CYCLIC_SUCCESS_BOUND, exact),
        seed=seed,
        params={"N": N, "d": d, "samples": samples},
        exact=exact,
    )
    report = RunReport(
        config=config,
        results=results,
        aggregate={"success_rate": check.empirical, "check": check.model_dump()},
        wall_clock=time.perf_counter() - started,
    )
    path = write_report(report.model_dump(), out, "cyclic-hsp", seed)
    console.print(
        summary_table(
            f"Cyclic HSP in Z{N}",
            {"d": results[-1]["d"], "gcd": results[-1]["M"], "success rate": report.aggregate["success_rate"]},
        )
    )
    console.print(f"[dim]Report: {path}[/dim]")
    check.verify()
