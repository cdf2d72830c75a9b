"""QFT commands - circuit verification, approximate QFT and the odd-modulus QFT."""

from pathlib import Path

import numpy as np
import typer
from rich.console import Console

from hsp_cli.services import logfire_service
from hsp_cli.services.hsp_errors import BoundViolationError, DomainError
from hsp_cli.services.qft import (
    ApproxQftParams,
    FourierBackend,
    exact_circuit_error,
    exact_qft_circuit,
    manual_odd_plan,
    measure_afft_error,
    odd_qft_diagnostics,
    odd_qft_report,
    plan_odd_qft,
    run_odd_qft,
)
from hsp_cli.services.statevec import StateVector, basis_state, random_state, uniform_state
from hsp_cli.utils import cli_errors, show_progress, summary_table, validate_epsilon_callback, write_report

app = typer.Typer()
console = Console()

# Amplitude tolerance for the exact circuit against the dense matrix
CIRCUIT_TOLERANCE = 1e-9


def parse_input_state(text: str, N: int, seed: int | None) -> StateVector:
    """``basis<k>``, ``uniform`` or ``random`` over C^N."""
    text = text.strip().lower()
    if text == "uniform":
        return uniform_state(N)
    if text == "random":
        return random_state(N, seed)
    if text.startswith("basis") and text[5:].isdigit():
        return basis_state(N, int(text[5:]))
    raise DomainError(f"Unknown input state {text!r}; use basis<k>, uniform or random")


@app.command("verify")
@cli_errors
def verify(
    n: int = typer.Option(..., "--n", min=1, max=12, help="Qubit count"),
    out: Path | None = typer.Option(None, "--out", "-o", help="Report path"),
) -> None:
    """Check the exact QFT circuit against the dense F_{2^n}."""
    with logfire_service.span("qft.verify", n=n):
        circuit = exact_qft_circuit(n)
        error = exact_circuit_error(n)
    expected_size = n * (n + 1) // 2 + n // 2
    payload = {
        "n": n,
        "max_error": error,
        "size": circuit.size,
        "expected_size": expected_size,
        "restricted_size": circuit.restricted_size,
        "depth": circuit.depth,
    }
    path = write_report(payload, out, f"qft-verify-{n}")
    console.print(summary_table(f"Exact QFT on {n} qubits", payload))
    console.print(f"[dim]Report: {path}[/dim]")
    if error >= CIRCUIT_TOLERANCE:
        raise BoundViolationError("circuit vs dense F amplitude error", error, CIRCUIT_TOLERANCE)
    if circuit.size != expected_size:
        raise BoundViolationError("QFT gate count", circuit.size, expected_size)


@app.command("afft")
@cli_errors
def afft(
    n: int = typer.Option(..., "--n", min=1, max=12, help="Qubit count"),
    m: int = typer.Option(..., "--m", min=1, help="Rotation cutoff: R_k with k > m are dropped"),
    samples: int = typer.Option(100, "--samples", min=1, help="Random input states"),
    seed: int = typer.Option(..., "--seed", help="Random seed"),
    out: Path | None = typer.Option(None, "--out", "-o", help="Report path"),
) -> None:
    """Measure the worst-case error of the approximate QFT."""
    params = ApproxQftParams(n, m)
    with logfire_service.span("qft.afft", n=n, m=m, seed=seed):
        measured = measure_afft_error(params, samples=samples, seed=seed)
    payload = {
        "n": n,
        "m": m,
        "samples": samples,
        "seed": seed,
        "measured_error": measured,
        "predicted_error": params.predicted_error,
        "gate_budget": params.gate_budget,
    }
    path = write_report(payload, out, "qft-afft", seed)
    console.print(summary_table(f"Approximate QFT n={n}, m={m}", payload))
    console.print(f"[dim]Report: {path}[/dim]")
    if measured > params.predicted_error:
        raise BoundViolationError("AFFT state error", measured, params.predicted_error)


@cli_errors
def odd_qft(
    N: int = typer.Option(..., "--N", help="Odd modulus"),
    eps: float = typer.Option(1.0, "--eps", help="Target accuracy in (0, sqrt(2)]", callback=validate_epsilon_callback),
    u: str = typer.Option("basis0", "--u", help="Input: basis<k>, uniform or random"),
    seed: int = typer.Option(..., "--seed", help="Random seed"),
    backend: FourierBackend = typer.Option(FourierBackend.CIRCUIT, "--backend", help="F_M implementation"),
    afft_m: int | None = typer.Option(None, "--afft-m", help="Cutoff for the afft backend"),
    L: int | None = typer.Option(None, "--L", help="Manual ancilla size (power of two)"),
    M: int | None = typer.Option(None, "--M", help="Manual register size (power of two)"),
    diagnostics: bool = typer.Option(False, "--diagnostics", help="Also check the shift and tail bounds"),
    out: Path | None = typer.Option(None, "--out", "-o", help="Report path"),
) -> None:
    """Approximate F_N with power-of-two transforms and report the distance to F_N u."""
    if (L is None) != (M is None):
        raise DomainError("Give both --L and --M for a manual plan, or neither")
    plan = manual_odd_plan(N, L, M, eps) if L is not None and M is not None else plan_odd_qft(N, eps)
    state = parse_input_state(u, N, seed)

    with logfire_service.span("odd_qft.run", **plan.to_dict(), backend=str(backend), seed=seed):
        with show_progress(f"Simulating {plan.qubits} qubits...", console):
            v = run_odd_qft(state, plan, backend, afft_cutoff=afft_m)
            report = odd_qft_report(state, plan, v)
            diag = odd_qft_diagnostics(plan, seed=seed, check=False) if diagnostics else None

    payload = {"plan": plan.to_dict(), "input": u, "backend": str(backend), "seed": seed, **report.to_dict()}
    if diag is not None:
        payload["max_shift_distance"] = float(np.max(diag.shift_distances()))
        payload["shift_bound"] = plan.shift_bound
        payload["tail_checks"] = [list(c) for c in diag.tail_checks]
    path = write_report(payload, out, "odd-qft", seed)
    console.print(summary_table(f"Odd QFT N={N}, L={plan.L}, M={plan.M}", {"qubits": plan.qubits, **report.to_dict()}))
    console.print(f"[dim]Report: {path}[/dim]")

    if plan.auto_planned:
        if report.residual > eps:
            raise BoundViolationError("odd-QFT residual", report.residual, eps)
        if report.tv_distance > 2 * eps + eps**2:
            raise BoundViolationError("odd-QFT TV distance", report.tv_distance, 2 * eps + eps**2)
    if diag is not None:
        diag.verify()
