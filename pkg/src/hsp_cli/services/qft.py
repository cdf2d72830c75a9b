"""Fourier-transform constructions.

Dense reference matrices F_N, the exact power-of-two circuit, the truncated
(approximate) circuit, the coprime-factor composition, and the odd-modulus
transform built from a power-of-two transform plus a relabelling of its output.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import StrEnum
from fractions import Fraction
from functools import cached_property
from typing import Any

import numpy as np

from hsp_cli.config import settings
from hsp_cli.services.hsp_errors import (
    BoundViolationError,
    CapabilityError,
    DomainError,
    InvariantError,
    UnsupportedPlanError,
)
from hsp_cli.services.statevec import (
    GateKind,
    GateSpec,
    RegisterLayout,
    SeedLike,
    StateVector,
    apply_circuit,
    apply_gate,
    circuit_depth,
    circuit_unitary,
    is_power_of_two,
    make_rng,
    qubits_for_dim,
)

logger = logging.getLogger(__name__)

# Constant windows for the auto-planned odd transform
C1_RANGE = (65, 130)
C2_RANGE = (735, 1470)
MIN_PLANNED_N = 13


# =============================================================================
# Dense reference
# =============================================================================


@dataclass(frozen=True, eq=False)
class CyclicQftMatrix:
    """F_N with entries w_N^{jk} / sqrt(N)."""

    N: int
    matrix: np.ndarray = field(repr=False)

    def apply(self, state: StateVector) -> StateVector:
        if state.dim != self.N:
            raise DomainError(f"F_{self.N} applied to a state of dimension {state.dim}")
        return StateVector(self.matrix @ state.amplitudes)

    def unitarity_residual(self) -> float:
        return float(np.max(np.abs(self.matrix @ self.matrix.conj().T - np.eye(self.N))))


def dense_qft(N: int) -> CyclicQftMatrix:
    """Dense F_N; the oracle every circuit construction is checked against."""
    if N < 1:
        raise DomainError(f"Minimum modulus is 1, got {N}")
    idx = np.arange(N)
    # exponents reduced mod N keep the phases exact for large N
    phases = np.outer(idx, idx) % N
    matrix = np.exp(2j * np.pi * phases / N) / np.sqrt(N)
    return CyclicQftMatrix(N, matrix)


def small_odd_qft(N: int) -> CyclicQftMatrix:
    """Odd moduli below the planning threshold are served by the dense matrix."""
    if N % 2 == 0 or N >= MIN_PLANNED_N:
        raise DomainError(f"small_odd_qft covers odd N < {MIN_PLANNED_N}, got {N}")
    return dense_qft(N)


# =============================================================================
# Power-of-two circuits
# =============================================================================


@dataclass(frozen=True)
class ApproxQftParams:
    """Cutoff m for the truncated transform on n qubits."""

    n: int
    m: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DomainError(f"Qubit count must be at least 1, got {self.n}")
        if not 1 <= self.m <= self.n:
            raise DomainError(f"Cutoff m must satisfy 1 <= m <= n={self.n}, got {self.m}")

    @property
    def predicted_error(self) -> float:
        return 2 * math.pi * self.n * 2.0 ** (-self.m)

    @property
    def gate_budget(self) -> int:
        return self.n * self.m + self.n


@dataclass(frozen=True)
class QftCircuit:
    n: int
    ops: tuple[GateSpec, ...]
    cutoff: int | None = None

    @property
    def size(self) -> int:
        return len(self.ops)

    @cached_property
    def depth(self) -> int:
        return circuit_depth(self.ops)

    @property
    def restricted_size(self) -> int:
        """Op count when only H and R_n are available: R_k costs n - k + 1 uses of R_n."""
        return sum(self.n - op.k + 1 if op.kind is GateKind.RK else 1 for op in self.ops)

    def on_qubits(self, targets: Sequence[int]) -> tuple[GateSpec, ...]:
        """The same ops relabelled so circuit qubit q acts on ``targets[q]``."""
        if len(targets) != self.n:
            raise DomainError(f"Need {self.n} target qubits, got {len(targets)}")
        mapped = []
        for op in self.ops:
            new_targets = tuple(targets[q] for q in op.targets)
            mapped.append(GateSpec(op.kind, new_targets, k=op.k))
        return tuple(mapped)

    def unitary(self) -> np.ndarray:
        return circuit_unitary(self.ops, self.n)

    def apply(self, state: StateVector) -> StateVector:
        return apply_circuit(state, self.ops, RegisterLayout.single(self.n))


def _qft_ops(n: int, cutoff: int | None) -> tuple[GateSpec, ...]:
    ops: list[GateSpec] = []
    for a in range(n):
        ops.append(GateSpec.h(a))
        for b in range(a + 1, n):
            k = b - a + 1
            if cutoff is None or k <= cutoff:
                ops.append(GateSpec.rk(k, control=b, target=a))
    ops.extend(GateSpec.swap(a, n - 1 - a) for a in range(n // 2))
    return tuple(ops)


def exact_qft_circuit(n: int) -> QftCircuit:
    """H and controlled R_k per qubit, then the qubit-order reversal."""
    if n < 1:
        raise DomainError(f"Minimum qubit count is 1, got {n}")
    return QftCircuit(n, _qft_ops(n, None))


def afft_circuit(params: ApproxQftParams) -> QftCircuit:
    """Truncated transform: rotations R_k with k > m are dropped."""
    circuit = QftCircuit(params.n, _qft_ops(params.n, params.m), cutoff=params.m)
    logger.debug("afft n=%d m=%d kept %d ops", params.n, params.m, circuit.size)
    return circuit


def exact_circuit_error(n: int) -> float:
    """Max amplitude error of the exact circuit against F_{2^n} over all basis inputs."""
    return float(np.max(np.abs(exact_qft_circuit(n).unitary() - dense_qft(2**n).matrix)))


def measure_afft_error(params: ApproxQftParams, samples: int = 100, seed: SeedLike = 0) -> float:
    """Worst ||(F - AFFT_m) psi|| over seeded random unit states."""
    rng = make_rng(seed)
    dim = 2**params.n
    diff = dense_qft(dim).matrix - afft_circuit(params).unitary()
    states = rng.standard_normal((dim, samples)) + 1j * rng.standard_normal((dim, samples))
    states /= np.linalg.norm(states, axis=0)
    return float(np.max(np.linalg.norm(diff @ states, axis=0)))


# =============================================================================
# Coprime composition
# =============================================================================


def coprime_qft(A: int, B: int) -> CyclicQftMatrix:
    """F_{AB} assembled as (U_B (x) U_A)(F_A (x) F_B) between CRT relabellings.

    Inputs j are read as (j mod A, j mod B). U_B sends x to xB mod A and U_A sends
    y to yA mod B; the resulting pair is read back through the CRT.
    """
    if A < 1 or B < 1:
        raise DomainError(f"Moduli must be positive, got {A}, {B}")
    if math.gcd(A, B) != 1:
        raise DomainError(f"coprime_qft needs gcd(A, B) = 1, got gcd({A}, {B}) = {math.gcd(A, B)}")
    N = A * B
    j = np.arange(N)
    # tensor index of the pair (j mod A, j mod B)
    crt_in = (j % A) * B + (j % B)
    pair_a, pair_b = np.divmod(np.arange(N), B)
    u_index = ((pair_a * B) % A) * B + (pair_b * A) % B

    kron = np.kron(dense_qft(A).matrix, dense_qft(B).matrix)
    multiplied = np.zeros_like(kron)
    multiplied[u_index] = kron
    # back to Z_N: tensor index crt_in[k] holds output k
    composed = multiplied[crt_in][:, crt_in]
    return CyclicQftMatrix(N, composed)


# =============================================================================
# Odd modulus: relabelling map
# =============================================================================


def round_half_up(x: Fraction | int) -> int:
    """Nearest integer, ties rounding up."""
    return math.floor(Fraction(x) + Fraction(1, 2))


def sawtooth_distance(x: Fraction | int, M: int) -> Fraction:
    """|x|_M: distance from x to the nearest multiple of M."""
    r = Fraction(x) % M
    return min(r, M - r)


@dataclass(frozen=True, eq=False)
class DeltaMap:
    """Division-with-remainder relabelling k -> (s, t) of F_M's output.

    k' = round(kN/M), t = k - round(k'M/N), s = k' mod N; all in exact integers.
    """

    M: int
    N: int
    s: np.ndarray = field(repr=False)
    t: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, M: int, N: int, verify: bool = True) -> DeltaMap:
        if math.gcd(M, N) != 1:
            raise DomainError(f"Delta map needs gcd(M, N) = 1, got gcd({M}, {N}) = {math.gcd(M, N)}")
        if M <= 3 * N:
            raise DomainError(f"Delta map needs M > 3N, got M={M}, N={N}")
        k = np.arange(M, dtype=np.int64)
        k_prime = (2 * k * N + M) // (2 * M)
        t = k - (2 * k_prime * M + N) // (2 * N)
        s = k_prime % N
        delta = cls(M, N, s, t)
        if verify:
            delta.verify()
        return delta

    @property
    def alpha(self) -> int:
        return (self.M + self.N) // (2 * self.N)

    @property
    def beta(self) -> int:
        return -((3 * self.N - self.M) // (2 * self.N))

    @property
    def interval_radius(self) -> int:
        """Largest d with 2N|d| < M - N."""
        return (self.M - self.N - 1) // (2 * self.N)

    @property
    def lambda_bound(self) -> int:
        """floor(M/(2N) - 1/2); the offset set is |d| below this."""
        return (self.M - self.N) // (2 * self.N)

    def i_prime(self, i: int) -> int:
        return (2 * self.M * i + self.N) // (2 * self.N)

    def delta(self, s: int) -> Fraction:
        exact = Fraction(self.M * s, self.N)
        return round_half_up(exact) - exact

    def interval(self, i: int) -> np.ndarray:
        """The index set (i): i' + d mod M with 2N|d| < M - N."""
        radius = self.interval_radius
        return (self.i_prime(i) + np.arange(-radius, radius + 1)) % self.M

    def lambda_offsets(self) -> np.ndarray:
        bound = self.lambda_bound
        return np.arange(-bound + 1, bound)

    def image_index(self, register_width: int) -> np.ndarray:
        """Combined index s * 2**width + (t + alpha) for every k."""
        return (self.s << register_width) + self.t + self.alpha

    def c_set(self, s: int) -> np.ndarray:
        return np.unique(self.t[self.s == s])

    def verify(self) -> None:
        """Check every structural property; raises InvariantError listing failures."""
        failures = []
        alpha, beta = self.alpha, self.beta
        if alpha != beta + 1:
            failures.append(f"alpha={alpha} != beta+1={beta + 1}")
        if self.t.min() < -alpha or self.t.max() > alpha:
            failures.append("t outside [-alpha, alpha]")
        else:
            width = 2 * alpha + 1
            codes = self.s * width + self.t + alpha
            if np.unique(codes).size != self.M:
                failures.append("Delta is not injective")
            marks = np.zeros((self.N, width), dtype=bool)
            marks[self.s, self.t + alpha] = True
            if not marks[:, alpha - beta : alpha + beta + 1].all():
                failures.append("some C_s misses part of [-beta, beta]")
        if any(abs(self.delta(s)) > Fraction(1, 2) for s in range(self.N)):
            failures.append("|delta_s| > 1/2")
        intervals = [self.interval(i) for i in range(self.N)]
        if len({iv.size for iv in intervals}) != 1:
            failures.append("interval sets differ in size")
        if np.unique(np.concatenate(intervals)).size != sum(iv.size for iv in intervals):
            failures.append("interval sets overlap")
        if failures:
            raise InvariantError(f"Delta map (M={self.M}, N={self.N}): " + "; ".join(failures))


# =============================================================================
# Odd modulus: plan, run, analysis
# =============================================================================


def odd_qft_qubit_bound(N: int, epsilon: float) -> int:
    """ceil(12.53 + 3 log2(sqrt(N)/eps)): qubits sufficient for an auto-planned run."""
    return math.ceil(12.53 + 3 * math.log2(math.sqrt(N) / epsilon))


def _next_power_of_two(x: float) -> int:
    return 1 << max(0, math.ceil(math.log2(x)))


@dataclass(frozen=True)
class OddQftPlan:
    """Parameter bundle for the odd-modulus transform."""

    N: int
    L: int
    M: int
    epsilon: float | None = None
    auto_planned: bool = False

    @property
    def c1(self) -> float | None:
        return None if self.epsilon is None else self.L * self.epsilon**2 / math.sqrt(self.N)

    @property
    def c2(self) -> float | None:
        return None if self.epsilon is None else self.M * self.epsilon**3 / self.N**1.5

    @property
    def alpha(self) -> int:
        return (self.M + self.N) // (2 * self.N)

    @property
    def beta(self) -> int:
        return -((3 * self.N - self.M) // (2 * self.N))

    @property
    def qubits(self) -> int:
        return qubits_for_dim(self.M) + 2

    @property
    def s_qubits(self) -> int:
        return qubits_for_dim(self.N)

    @property
    def t_qubits(self) -> int:
        return self.qubits - self.s_qubits

    @property
    def qubit_bound(self) -> int | None:
        return None if self.epsilon is None else odd_qft_qubit_bound(self.N, self.epsilon)

    @property
    def tail_bound(self) -> float:
        """Bound on ||sum_i u_i T^i|| for unit u."""
        N, L, M = self.N, self.L, self.M
        return (2 / math.pi) * math.sqrt(22 * math.log(N) ** 2 / L + 32 * N**2 / (L * M))

    @property
    def shift_bound(self) -> float:
        """Bound on ||S^i - B^i||."""
        return math.pi * self.L * self.N / (self.M * math.sqrt(3))

    @property
    def predicted_error(self) -> float:
        return self.tail_bound + self.shift_bound

    @property
    def satisfies_main_bound(self) -> bool | None:
        if self.epsilon is None:
            return None
        return self.predicted_error <= self.epsilon / math.sqrt(2)

    @cached_property
    def delta_map(self) -> DeltaMap:
        return DeltaMap.build(self.M, self.N)

    def layout(self) -> RegisterLayout:
        return RegisterLayout.of(("s", self.s_qubits), ("t", self.t_qubits))

    def to_dict(self) -> dict[str, Any]:
        return {
            "N": self.N,
            "epsilon": self.epsilon,
            "L": self.L,
            "M": self.M,
            "c1": self.c1,
            "c2": self.c2,
            "alpha": self.alpha,
            "beta": self.beta,
            "qubits": self.qubits,
            "qubit_bound": self.qubit_bound,
            "predicted_error": self.predicted_error,
            "auto_planned": self.auto_planned,
        }


def plan_odd_qft(N: int, epsilon: float) -> OddQftPlan:
    """Pick L and M as the powers of two inside the constant windows."""
    if N % 2 == 0 or N < MIN_PLANNED_N:
        raise UnsupportedPlanError(
            f"Auto-planning needs odd N >= {MIN_PLANNED_N}, got {N}; use manual_odd_plan to explore"
        )
    if not 0 < epsilon <= math.sqrt(2) + 1e-12:
        raise UnsupportedPlanError(f"epsilon must lie in (0, sqrt(2)], got {epsilon}")

    L = _next_power_of_two(C1_RANGE[0] * math.sqrt(N) / epsilon**2)
    M = _next_power_of_two(C2_RANGE[0] * N**1.5 / epsilon**3)
    plan = OddQftPlan(N=N, L=L, M=M, epsilon=epsilon, auto_planned=True)

    if not (C1_RANGE[0] <= plan.c1 <= C1_RANGE[1] and C2_RANGE[0] <= plan.c2 <= C2_RANGE[1]):
        raise InvariantError(f"Planned constants out of window: c1={plan.c1:.3f}, c2={plan.c2:.3f}")
    if L < 16 or M < L * N:
        raise InvariantError(f"Planned sizes violate L >= 16, M >= LN: L={L}, M={M}, N={N}")
    logger.info("planned odd QFT N=%d eps=%s: L=%d M=%d qubits=%d", N, epsilon, L, M, plan.qubits)
    return plan


def manual_odd_plan(N: int, L: int, M: int, epsilon: float | None = None) -> OddQftPlan:
    """Exploration plan outside the auto-planned constant windows; only structural checks apply."""
    if N % 2 == 0 or N < 3:
        raise DomainError(f"Manual plans need odd N >= 3, got {N}")
    if not (is_power_of_two(L) and is_power_of_two(M)):
        raise DomainError(f"L and M must be powers of two, got L={L}, M={M}")
    if M < L * N or M <= 3 * N:
        raise DomainError(f"Manual plans need M >= LN and M > 3N, got L={L}, M={M}, N={N}")
    return OddQftPlan(N=N, L=L, M=M, epsilon=epsilon, auto_planned=False)


class FourierBackend(StrEnum):
    CIRCUIT = "circuit"
    AFFT = "afft"
    FFT = "fft"


def _extend_to_permutation(domain: np.ndarray, image: np.ndarray, size: int) -> np.ndarray:
    """A bijection of range(size) agreeing with domain -> image; the rest pair up in order."""
    perm = np.empty(size, dtype=np.int64)
    perm[domain] = image
    free_domain = np.ones(size, dtype=bool)
    free_domain[domain] = False
    free_image = np.ones(size, dtype=bool)
    free_image[image] = False
    perm[free_domain] = np.flatnonzero(free_image)
    return perm


def _assert_zero_beyond(state: StateVector, limit: int, step: str) -> None:
    leak = float(np.max(np.abs(state.amplitudes[limit:]), initial=0.0))
    if leak > settings.norm_tolerance:
        raise InvariantError(f"Unused basis states carry amplitude {leak:.3e} after {step}")


def reindex_permutation(plan: OddQftPlan) -> np.ndarray:
    """|i>|j> -> |i + jN> on the combined register, for i < N and j < L."""
    i = np.arange(plan.N, dtype=np.int64)[:, None]
    j = np.arange(plan.L, dtype=np.int64)[None, :]
    domain = ((i << plan.t_qubits) + j).reshape(-1)
    image = (i + j * plan.N).reshape(-1)
    return _extend_to_permutation(domain, image, 2**plan.qubits)


def delta_permutation(plan: OddQftPlan) -> np.ndarray:
    """k -> s * 2**t_qubits + (t + alpha) for k < M."""
    domain = np.arange(plan.M, dtype=np.int64)
    image = plan.delta_map.image_index(plan.t_qubits)
    return _extend_to_permutation(domain, image, 2**plan.qubits)


def run_odd_qft(
    u: StateVector,
    plan: OddQftPlan,
    backend: FourierBackend | str = FourierBackend.CIRCUIT,
    afft_cutoff: int | None = None,
) -> StateVector:
    """Approximate F_N |u> as a state on registers (s, t + alpha).

    Steps: F_L on the ancilla, reindex |i>|j> -> |i + jN>, F_M on the low
    log M qubits, then the Delta relabelling.
    """
    backend = FourierBackend(backend)
    if u.dim != plan.N:
        raise DomainError(f"Plan is for N={plan.N}, state has dimension {u.dim}")
    n_total, width = plan.qubits, plan.t_qubits
    layout = plan.layout()
    all_qubits = range(n_total)

    amps = np.zeros(2**n_total, dtype=np.complex128)
    amps[np.arange(plan.N) << width] = u.amplitudes
    state = StateVector(amps)

    # (1) uniform superposition over j < L on the ancilla
    l_bits = qubits_for_dim(plan.L)
    f_l = exact_qft_circuit(l_bits).on_qubits(range(n_total - l_bits, n_total))
    state = apply_circuit(state, f_l, layout)

    # (2) reindex into a single register
    state = apply_gate(state, GateSpec.permutation_of(all_qubits, reindex_permutation(plan)), layout)
    _assert_zero_beyond(state, plan.L * plan.N, "reindex")

    # (3) F_M on the low qubits
    m_bits = qubits_for_dim(plan.M)
    if backend is FourierBackend.FFT:
        blocks = state.amplitudes.reshape(-1, plan.M)
        state = StateVector(np.fft.ifft(blocks, axis=1, norm="ortho").reshape(-1))
    else:
        if backend is FourierBackend.AFFT:
            if afft_cutoff is None:
                raise DomainError("The afft backend needs a cutoff m")
            circuit = afft_circuit(ApproxQftParams(m_bits, afft_cutoff))
        else:
            circuit = exact_qft_circuit(m_bits)
        state = apply_circuit(state, circuit.on_qubits(range(n_total - m_bits, n_total)), layout)
    _assert_zero_beyond(state, plan.M, "F_M")

    # (4) relabel k -> (s, t + alpha)
    return apply_gate(state, GateSpec.permutation_of(all_qubits, delta_permutation(plan)), layout)


def a0_amplitudes(plan: OddQftPlan, k: np.ndarray) -> np.ndarray:
    """A^0_k = (1/sqrt(LNM)) sum_{a<LN} w_M^{ak}, by the geometric series."""
    n_terms = plan.L * plan.N
    k = np.asarray(k) % plan.M
    z = np.exp(2j * np.pi * k / plan.M)
    z_n = np.exp(2j * np.pi * ((k * n_terms) % plan.M) / plan.M)
    with np.errstate(divide="ignore", invalid="ignore"):
        sums = np.where(k == 0, n_terms, (1 - z_n) / (1 - z))
    return sums / math.sqrt(n_terms * plan.M)


@dataclass(frozen=True)
class OddQftReport:
    """Distances of the output from F_N u (x) psi for the two choices of psi."""

    optimal_residual: float
    lambda_residual: float
    lambda_raw_residual: float
    tv_distance: float
    predicted_error: float

    @property
    def residual(self) -> float:
        return min(self.optimal_residual, self.lambda_residual)

    def to_dict(self) -> dict[str, float]:
        return {
            "residual": self.residual,
            "optimal_residual": self.optimal_residual,
            "lambda_residual": self.lambda_residual,
            "lambda_raw_residual": self.lambda_raw_residual,
            "tv_distance": self.tv_distance,
            "predicted_error": self.predicted_error,
        }


def odd_qft_report(u: StateVector, plan: OddQftPlan, v: StateVector) -> OddQftReport:
    """Compare the output v with F_N u tensored with psi* and with the offset-set vector."""
    rows = 2**plan.s_qubits
    out = v.amplitudes.reshape(rows, 2**plan.t_qubits)
    u_hat = np.zeros(rows, dtype=np.complex128)
    u_hat[: plan.N] = dense_qft(plan.N).matrix @ u.amplitudes

    # least-squares tensor factor
    w = u_hat.conj() @ out
    psi_opt = w / np.linalg.norm(w)
    optimal = float(np.linalg.norm(out - np.outer(u_hat, psi_opt)))

    offsets = plan.delta_map.lambda_offsets()
    psi_raw = np.zeros(out.shape[1], dtype=np.complex128)
    psi_raw[offsets + plan.alpha] = a0_amplitudes(plan, offsets)
    raw = float(np.linalg.norm(out - np.outer(u_hat, psi_raw)))
    lam = float(np.linalg.norm(out - np.outer(u_hat, psi_raw / np.linalg.norm(psi_raw))))

    marginal = np.sum(np.abs(out) ** 2, axis=1)
    tv = float(np.sum(np.abs(marginal - np.abs(u_hat) ** 2)))
    return OddQftReport(optimal, lam, raw, tv, plan.predicted_error)


# =============================================================================
# Odd modulus: diagnostic vectors
# =============================================================================


@dataclass(frozen=True, eq=False)
class OddQftDiagnostics:
    """A^i = F_M F_LN^{-1}|Li>, split as B^i (on (i)) plus tail T^i; S^i is B^0 shifted by i'."""

    plan: OddQftPlan
    A: np.ndarray = field(repr=False)
    B: np.ndarray = field(repr=False)
    T: np.ndarray = field(repr=False)
    S: np.ndarray = field(repr=False)
    psi: np.ndarray = field(repr=False)
    tail_checks: tuple[tuple[float, float], ...] = ()

    def shift_distances(self) -> np.ndarray:
        return np.linalg.norm(self.S - self.B, axis=1)

    def tail_norm(self, u_hat: np.ndarray) -> float:
        return float(np.linalg.norm(np.asarray(u_hat) @ self.T))

    def verify(self) -> None:
        worst = float(self.shift_distances().max())
        if worst > self.plan.shift_bound:
            raise BoundViolationError("shift distance ||S^i - B^i||", worst, self.plan.shift_bound)
        for observed, bound in self.tail_checks:
            if observed > bound:
                raise BoundViolationError("tail norm ||sum u_i T^i||", observed, bound)


def odd_qft_diagnostics(
    plan: OddQftPlan, samples: int = 8, seed: SeedLike = 0, check: bool = True
) -> OddQftDiagnostics:
    """Dense diagnostic vectors plus the shift and tail bound checks."""
    N, L, M = plan.N, plan.L, plan.M
    if M > 2**20 or N * M > settings.max_diagnostic_amplitudes:
        raise CapabilityError("odd-QFT diagnostics (N*M)", N * M, settings.max_diagnostic_amplitudes)
    delta = plan.delta_map

    a = np.arange(L * N)
    seeds = np.zeros((N, M), dtype=np.complex128)
    phases = np.outer(np.arange(N), a) % N
    seeds[:, : L * N] = np.exp(-2j * np.pi * phases / N) / math.sqrt(L * N)
    A = np.fft.ifft(seeds, axis=1, norm="ortho")

    mask = np.zeros((N, M), dtype=bool)
    for i in range(N):
        mask[i, delta.interval(i)] = True
    B = np.where(mask, A, 0)
    T = A - B
    S = np.stack([np.roll(B[0], delta.i_prime(i)) for i in range(N)])

    offsets = delta.lambda_offsets()
    psi = np.zeros(2 * plan.alpha + 1, dtype=np.complex128)
    psi[offsets + plan.alpha] = A[0, offsets % M]
    psi /= np.linalg.norm(psi)

    checks: list[tuple[float, float]] = []
    if N >= MIN_PLANNED_N and M >= 16 * N:
        rng = make_rng(seed)
        for _ in range(samples):
            u_hat = rng.standard_normal(N) + 1j * rng.standard_normal(N)
            u_hat /= np.linalg.norm(u_hat)
            checks.append((float(np.linalg.norm(u_hat @ T)), plan.tail_bound))
    diagnostics = OddQftDiagnostics(plan, A, B, T, S, psi, tuple(checks))
    if check:
        diagnostics.verify()
    return diagnostics
