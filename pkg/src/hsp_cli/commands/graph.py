"""Graph commands - automorphism counting and isomorphism through the reductions."""

from enum import StrEnum
from pathlib import Path

import typer
from rich.console import Console

from hsp_cli.services import logfire_service
from hsp_cli.services.graphs import (
    Graph,
    IsoOracle,
    acount_via_iso,
    agen_via_iso,
    apart_via_iso,
    imap_via_iso,
    iso_via_acount,
    iso_via_agen,
    iso_via_apart,
)
from hsp_cli.services.hsp_errors import ConfigError
from hsp_cli.utils import cli_errors, summary_table, write_report

app = typer.Typer()
console = Console()


class IsoVia(StrEnum):
    """How isomorphism is decided."""

    DIRECT = "direct"
    ACOUNT = "acount"
    AGEN = "agen"
    APART = "apart"


class Decider(StrEnum):
    """Isomorphism oracle plugged into the reductions."""

    NETWORKX = "networkx"
    BRUTE_FORCE = "brute-force"


def load_graph(spec: str, seed: int | None = None) -> Graph:
    """A graph file, or ``path:n``, ``cycle:n``, ``complete:n``, ``random:n[:p]``."""
    kind, _, rest = spec.partition(":")
    builders = {"path": Graph.path, "cycle": Graph.cycle, "complete": Graph.complete}
    try:
        if kind in builders:
            return builders[kind](int(rest))
        if kind == "random":
            n, _, p = rest.partition(":")
            return Graph.random(int(n), float(p) if p else 0.5, seed=seed)
    except ValueError as e:
        raise ConfigError(f"Malformed graph spec {spec!r}: {e}") from e
    path = Path(spec)
    if not path.is_file():
        raise ConfigError(f"{spec!r} is neither a graph file nor a path:/cycle:/complete:/random: spec")
    return Graph.parse(path.read_text(encoding="utf-8"))


def make_oracle(decider: Decider) -> IsoOracle:
    return IsoOracle.brute_force() if decider is Decider.BRUTE_FORCE else IsoOracle.networkx()


@app.command("acount")
@cli_errors
def acount(
    graph: str = typer.Option(..., "--in", "-i", help="Graph file or spec such as cycle:6"),
    seed: int | None = typer.Option(None, "--seed", help="Seed for random: specs"),
    decider: Decider = typer.Option(Decider.NETWORKX, "--decider", help="Isomorphism oracle"),
    out: Path | None = typer.Option(None, "--out", "-o", help="Report path"),
) -> None:
    """Count automorphisms, and report the orbit partition, from isomorphism queries."""
    G = load_graph(graph, seed)
    oracle = make_oracle(decider)
    with logfire_service.span("graph.acount", n=G.n, decider=str(decider)):
        count = acount_via_iso(G, oracle)
        count_calls = oracle.calls
        partition = apart_via_iso(G, oracle)
    payload = {
        "graph": G.to_text(),
        "vertices": G.n,
        "automorphisms": count,
        "partition": [sorted(cell) for cell in partition],
        "acount_oracle_calls": count_calls,
        "oracle_calls": oracle.calls,
        "decider": str(decider),
    }
    path = write_report(payload, out, "graph-acount", seed)
    console.print(
        summary_table(
            f"Automorphisms of a {G.n}-vertex graph",
            {"|aut G|": count, "orbits": len(partition), "oracle calls": oracle.calls},
        )
    )
    console.print(f"[dim]Report: {path}[/dim]")


@app.command("iso")
@cli_errors
def iso(
    first: str = typer.Option(..., "--a", help="First graph file or spec"),
    second: str = typer.Option(..., "--b", help="Second graph file or spec"),
    via: IsoVia = typer.Option(IsoVia.DIRECT, "--via", help="direct, acount, agen or apart"),
    seed: int | None = typer.Option(None, "--seed", help="Seed for random: specs"),
    decider: Decider = typer.Option(Decider.NETWORKX, "--decider", help="Isomorphism oracle"),
    out: Path | None = typer.Option(None, "--out", "-o", help="Report path"),
) -> None:
    """Decide isomorphism directly, or through the automorphism problems of G1 + G2."""
    G1 = load_graph(first, seed)
    G2 = load_graph(second, None if seed is None else seed + 1)
    oracle = make_oracle(decider)
    mapping = None
    with logfire_service.span("graph.iso", n=G1.n, via=str(via)):
        if via is IsoVia.DIRECT:
            mapping = imap_via_iso(G1, G2, oracle)
            isomorphic = mapping is not None
        elif via is IsoVia.ACOUNT:
            isomorphic = iso_via_acount(G1, G2, lambda G: acount_via_iso(G, oracle))
        elif via is IsoVia.AGEN:
            isomorphic = iso_via_agen(G1, G2, lambda G: agen_via_iso(G, oracle))
        else:
            isomorphic = iso_via_apart(G1, G2, lambda G: apart_via_iso(G, oracle))
    payload = {
        "first": G1.to_text(),
        "second": G2.to_text(),
        "via": str(via),
        "isomorphic": isomorphic,
        "mapping": None if mapping is None else list(mapping),
        "oracle_calls": oracle.calls,
        "decider": str(decider),
    }
    path = write_report(payload, out, f"graph-iso-{via}", seed)
    console.print(summary_table(f"Isomorphism via {via}", {"isomorphic": isomorphic, "oracle calls": oracle.calls}))
    console.print(f"[dim]Report: {path}[/dim]")
