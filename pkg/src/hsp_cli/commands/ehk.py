"""EHK command - hidden subgroup search over an arbitrary finite group table."""

import re
from pathlib import Path

import typer
from rich.console import Console

from hsp_cli.services import logfire_service
from hsp_cli.services.ehk import (
    BUNDLED_GROUPS,
    CosetTableOracle,
    FiniteGroupTable,
    bundled_group,
    ehk_copy_count,
    ehk_run,
    error_accumulation_check,
)
from hsp_cli.services.hsp_errors import DomainError, TermExplosionError
from hsp_cli.utils import cli_errors, show_progress, summary_table, write_report

console = Console()


def parse_generators(group: FiniteGroupTable, text: str) -> list[int]:
    """Element names or table indices, separated by spaces or semicolons."""
    index = {name: i for i, name in enumerate(group.names)}
    generators = []
    for token in (t for t in re.split(r"[\s;]+", text.strip()) if t):
        if token in index:
            generators.append(index[token])
        elif token.isdigit() and int(token) < group.order:
            generators.append(int(token))
        else:
            raise DomainError(f"Unknown element {token!r} of {group.label or 'the group'}")
    return generators


def load_group(name: str | None, table: Path | None) -> FiniteGroupTable:
    if (name is None) == (table is None):
        raise DomainError("Give exactly one of --group and --table")
    if table is not None:
        return FiniteGroupTable.parse(table.read_text(encoding="utf-8"), label=table.stem)
    return bundled_group(name or "")


@cli_errors
def ehk(
    group: str | None = typer.Option(None, "--group", "-g", help=f"Bundled group: {', '.join(BUNDLED_GROUPS)}"),
    table: Path | None = typer.Option(None, "--table", help="Cayley table file (n, then n rows of n indices)"),
    hidden: str = typer.Option("", "--hidden", help="Generators of H, by name or index; empty for the trivial group"),
    m: int | None = typer.Option(None, "--m", min=1, help="Coset-state copies (default ceil(4 log|G| + 2))"),
    seed: int = typer.Option(..., "--seed", help="Random seed"),
    check_errors: bool = typer.Option(False, "--check-errors", help="Also check the error-accumulation bounds"),
    out: Path | None = typer.Option(None, "--out", "-o", help="Report path"),
) -> None:
    """Identify H from m coset states with the subgroup-projection cascade."""
    G = load_group(group, table)
    H = G.generated(parse_generators(G, hidden))
    copies = m if m is not None else ehk_copy_count(G.order)
    oracle = CosetTableOracle.for_subgroup(G, H)

    with logfire_service.span("ehk.run", group=G.label, m=copies, seed=seed):
        with show_progress(f"Running the cascade on {copies} copies...", console):
            try:
                run = ehk_run(G, oracle, copies, seed=seed)
            except TermExplosionError as e:
                if e.partial is not None:
                    write_report({**e.partial.to_dict(), "aborted": str(e), "seed": seed}, out, "ehk", seed)
                raise
            trace = error_accumulation_check(G, H, copies, seed=seed) if check_errors else None

    payload = {**run.to_dict(), "seed": seed}
    if trace is not None:
        payload["error_norms"] = trace.errors
        payload["error_bounds"] = trace.bounds
        payload["fidelity"] = trace.fidelity
    path = write_report(payload, out, "ehk", seed)
    console.print(
        summary_table(
            f"EHK on {G.label or 'table'}",
            {
                "m": copies,
                "found": " ".join(sorted(G.names[g] for g in run.found)),
                "success": run.success,
                "success bound": run.success_bound,
            },
        )
    )
    console.print(f"[dim]Report: {path}[/dim]")
    if trace is not None:
        trace.verify()
