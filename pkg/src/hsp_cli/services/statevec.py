"""Dense complex state-vector engine.

Basis states, tensor products, gate application by expansion of small unitaries
over selected qubits, computational-basis measurement and the distance utilities
the bound checks are phrased in.

Qubit 0 is the most significant bit of a basis index, so |01> is (0, 1, 0, 0).
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Any

import numpy as np

from hsp_cli.config import settings
from hsp_cli.services.hsp_errors import DomainError

logger = logging.getLogger(__name__)

# P gate angle: cos(theta) = 3/5, sin(theta) = 4/5
P_COS = 3 / 5
P_SIN = 4 / 5

SeedLike = int | np.random.Generator | None


def make_rng(seed: SeedLike = None) -> np.random.Generator:
    """Return a numpy Generator for an int seed, or pass a Generator through."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def trial_rng(master_seed: int, index: int) -> np.random.Generator:
    """Derive the generator for trial ``index`` from a master seed.

    The derivation is counter based: trial k sees the same stream no matter how
    many trials are requested in total.
    """
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(index,)))


def qubits_for_dim(dim: int) -> int:
    """Smallest q with 2**q >= dim."""
    if dim < 1:
        raise DomainError(f"Dimension must be positive, got {dim}")
    return (dim - 1).bit_length()


def is_power_of_two(value: int) -> bool:
    return value >= 1 and value & (value - 1) == 0


@dataclass(frozen=True, eq=False)
class StateVector:
    """Unit vector of complex amplitudes over a labelled basis."""

    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amps.size < 1:
            raise DomainError("State dimension must be at least 1")
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > settings.norm_tolerance:
            raise DomainError(f"State is not normalized: norm {norm:.12f}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_vector(cls, values: Iterable[complex] | np.ndarray, normalize: bool = True) -> StateVector:
        """Build a state from raw amplitudes, normalizing them unless told not to."""
        amps = np.asarray(list(values) if not isinstance(values, np.ndarray) else values, dtype=np.complex128)
        if normalize:
            norm = np.linalg.norm(amps)
            if norm == 0:
                raise DomainError("Cannot normalize the zero vector")
            amps = amps / norm
        return cls(amps)

    @property
    def dim(self) -> int:
        return int(self.amplitudes.size)

    @property
    def qubit_count(self) -> int:
        return qubits_for_dim(self.dim)

    @property
    def is_qubit_addressed(self) -> bool:
        return is_power_of_two(self.dim)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def to_json(self) -> dict[str, Any]:
        """Debug dump as {"dim": n, "amps": [[re, im], ...]}."""
        return {
            "dim": self.dim,
            "amps": [[float(a.real), float(a.imag)] for a in self.amplitudes],
        }


def basis_state(dim: int, index: int) -> StateVector:
    """The standard basis vector |index> of C^dim."""
    if dim < 1:
        raise DomainError(f"Dimension must be positive, got {dim}")
    if not 0 <= index < dim:
        raise DomainError(f"Basis index {index} out of range for dimension {dim}")
    amps = np.zeros(dim, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(amps)


def uniform_state(dim: int, subset: Iterable[int] | None = None) -> StateVector:
    """Uniform superposition over ``subset`` (all of C^dim when omitted)."""
    indices = np.arange(dim) if subset is None else np.fromiter(subset, dtype=np.int64)
    if indices.size == 0:
        raise DomainError("Uniform superposition needs a non-empty subset")
    if indices.min() < 0 or indices.max() >= dim:
        raise DomainError(f"Subset indices out of range for dimension {dim}")
    amps = np.zeros(dim, dtype=np.complex128)
    amps[indices] = 1.0
    return StateVector.from_vector(amps)


def random_state(dim: int, seed: SeedLike = None) -> StateVector:
    """Haar-random state from normalized complex Gaussians."""
    rng = make_rng(seed)
    amps = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return StateVector.from_vector(amps)


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Tensor product; amplitude p*b.dim + q is a[p]*b[q]."""
    return StateVector(np.kron(a.amplitudes, b.amplitudes))


# =============================================================================
# Gates
# =============================================================================


class GateKind(StrEnum):
    H = "H"
    CNOT = "CNOT"
    CCNOT = "CCNOT"
    P = "P"
    RK = "Rk"
    SWAP = "SWAP"
    PERMUTATION = "PERM"
    DENSE = "DENSE"


_ARITY = {
    GateKind.H: 1,
    GateKind.P: 1,
    GateKind.CNOT: 2,
    GateKind.RK: 2,
    GateKind.SWAP: 2,
    GateKind.CCNOT: 3,
}


@dataclass(frozen=True, eq=False)
class GateSpec:
    """One elementary operation on an ordered list of target qubits.

    The first target is the most significant bit of the gate's local index, so
    for CNOT and Rk the first target is the control.
    """

    kind: GateKind
    targets: tuple[int, ...]
    k: int | None = None
    permutation: tuple[int, ...] | None = None
    matrix: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        targets = tuple(int(t) for t in self.targets)
        object.__setattr__(self, "targets", targets)
        if not targets:
            raise DomainError("A gate needs at least one target qubit")
        if len(set(targets)) != len(targets):
            raise DomainError(f"Target collision in {self.kind} gate: {targets}")
        if min(targets) < 0:
            raise DomainError(f"Negative qubit index in {targets}")
        arity = _ARITY.get(self.kind)
        if arity is not None and len(targets) != arity:
            raise DomainError(f"{self.kind} acts on {arity} qubits, got {len(targets)}")
        if self.kind is GateKind.RK and (self.k is None or self.k < 1):
            raise DomainError(f"Rk needs k >= 1, got {self.k}")
        if self.kind is GateKind.PERMUTATION:
            perm = np.asarray(self.permutation, dtype=np.int64)
            if perm.size != 2 ** len(targets) or not np.array_equal(np.sort(perm), np.arange(perm.size)):
                raise DomainError("Permutation gate needs a bijection of the target basis")
        if self.kind is GateKind.DENSE:
            mat = np.asarray(self.matrix, dtype=np.complex128)
            size = 2 ** len(targets)
            if mat.shape != (size, size):
                raise DomainError(f"Dense gate on {len(targets)} qubits needs a {size}x{size} matrix")
            residual = np.max(np.abs(mat @ mat.conj().T - np.eye(size)))
            if residual >= settings.unitary_tolerance * max(1, size):
                raise DomainError(f"Dense gate matrix is not unitary (residual {residual:.3e})")
            mat.setflags(write=False)
            object.__setattr__(self, "matrix", mat)

    # -- factories ---------------------------------------------------------

    @classmethod
    def h(cls, qubit: int) -> GateSpec:
        return cls(GateKind.H, (qubit,))

    @classmethod
    def cnot(cls, control: int, target: int) -> GateSpec:
        return cls(GateKind.CNOT, (control, target))

    @classmethod
    def ccnot(cls, control1: int, control2: int, target: int) -> GateSpec:
        return cls(GateKind.CCNOT, (control1, control2, target))

    @classmethod
    def p(cls, qubit: int) -> GateSpec:
        return cls(GateKind.P, (qubit,))

    @classmethod
    def rk(cls, k: int, control: int, target: int) -> GateSpec:
        """Controlled phase exp(2*pi*i / 2**k) on |11>."""
        return cls(GateKind.RK, (control, target), k=k)

    @classmethod
    def swap(cls, a: int, b: int) -> GateSpec:
        return cls(GateKind.SWAP, (a, b))

    @classmethod
    def permutation_of(cls, targets: Sequence[int], perm: Sequence[int]) -> GateSpec:
        """Basis permutation |i> -> |perm[i]> of the target register."""
        return cls(GateKind.PERMUTATION, tuple(targets), permutation=tuple(int(p) for p in perm))

    @classmethod
    def dense(cls, targets: Sequence[int], matrix: np.ndarray) -> GateSpec:
        return cls(GateKind.DENSE, tuple(targets), matrix=matrix)

    # -- matrices ----------------------------------------------------------

    def unitary(self) -> np.ndarray:
        """The gate's matrix on its own 2**len(targets)-dimensional space."""
        match self.kind:
            case GateKind.H:
                return np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)
            case GateKind.CNOT:
                return np.eye(4, dtype=np.complex128)[[0, 1, 3, 2]]
            case GateKind.CCNOT:
                return np.eye(8, dtype=np.complex128)[[0, 1, 2, 3, 4, 5, 7, 6]]
            case GateKind.P:
                # exp(+-i theta/2) with cos(theta) = 3/5 gives cos(theta/2) = 2/sqrt(5)
                half = complex(np.sqrt((1 + P_COS) / 2), np.sqrt((1 - P_COS) / 2))
                return np.diag([half, half.conjugate()])
            case GateKind.RK:
                return np.diag([1, 1, 1, np.exp(2j * np.pi / 2**self.k)]).astype(np.complex128)
            case GateKind.SWAP:
                return np.eye(4, dtype=np.complex128)[[0, 2, 1, 3]]
            case GateKind.PERMUTATION:
                size = len(self.permutation)
                mat = np.zeros((size, size), dtype=np.complex128)
                mat[list(self.permutation), np.arange(size)] = 1.0
                return mat
            case _:
                return np.array(self.matrix)

    def label(self) -> str:
        if self.kind is GateKind.RK:
            return f"R{self.k}{list(self.targets)}"
        return f"{self.kind}{list(self.targets)}"


@dataclass(frozen=True)
class RegisterLayout:
    """Named, disjoint qubit registers covering all qubits of a state."""

    registers: tuple[tuple[str, int, int], ...]

    def __post_init__(self) -> None:
        names = [name for name, _, _ in self.registers]
        if len(set(names)) != len(names):
            raise DomainError(f"Duplicate register names in {names}")
        covered = sorted(q for _, start, stop in self.registers for q in range(start, stop))
        if covered != list(range(len(covered))):
            raise DomainError("Register ranges must be disjoint and cover qubits 0..n-1")

    @classmethod
    def of(cls, *sizes: tuple[str, int]) -> RegisterLayout:
        """Consecutive registers, e.g. ``RegisterLayout.of(("s", 4), ("t", 14))``."""
        registers = []
        start = 0
        for name, size in sizes:
            registers.append((name, start, start + size))
            start += size
        return cls(tuple(registers))

    @classmethod
    def single(cls, qubit_count: int, name: str = "q") -> RegisterLayout:
        return cls(((name, 0, qubit_count),))

    @property
    def total_qubits(self) -> int:
        return sum(stop - start for _, start, stop in self.registers)

    def qubits(self, name: str) -> tuple[int, ...]:
        for reg_name, start, stop in self.registers:
            if reg_name == name:
                return tuple(range(start, stop))
        raise DomainError(f"Unknown register '{name}'")


def _layout_for(state: StateVector, layout: RegisterLayout | None) -> RegisterLayout:
    if not state.is_qubit_addressed:
        raise DomainError(f"Qubit-addressed operation needs a power-of-two dimension, got {state.dim}")
    if layout is None:
        return RegisterLayout.single(state.qubit_count)
    if layout.total_qubits != state.qubit_count:
        raise DomainError(f"Layout covers {layout.total_qubits} qubits, state has {state.qubit_count}")
    return layout


def _apply_to_targets(amps: np.ndarray, n: int, gate: GateSpec) -> np.ndarray:
    # amps has 2**n rows; trailing axes (columns of an operator) ride along
    k = len(gate.targets)
    local = list(range(k))
    psi = np.moveaxis(amps.reshape((2,) * n + amps.shape[1:]), gate.targets, local)
    shape = psi.shape
    block = psi.reshape(2**k, -1)
    if gate.kind is GateKind.PERMUTATION:
        out = np.empty_like(block)
        out[list(gate.permutation)] = block
    else:
        out = gate.unitary() @ block
    return np.moveaxis(out.reshape(shape), local, gate.targets).reshape(amps.shape)


def apply_gate(state: StateVector, gate: GateSpec, layout: RegisterLayout | None = None) -> StateVector:
    """Apply the expansion of ``gate`` over its target qubits."""
    layout = _layout_for(state, layout)
    n = layout.total_qubits
    if max(gate.targets) >= n:
        raise DomainError(f"Gate targets {gate.targets} outside a {n}-qubit layout")
    return StateVector(_apply_to_targets(state.amplitudes, n, gate))


def apply_circuit(state: StateVector, ops: Iterable[GateSpec], layout: RegisterLayout | None = None) -> StateVector:
    """Apply a gate list in order, validating only at the ends."""
    layout = _layout_for(state, layout)
    n = layout.total_qubits
    amps = np.array(state.amplitudes)
    for gate in ops:
        if max(gate.targets) >= n:
            raise DomainError(f"Gate targets {gate.targets} outside a {n}-qubit layout")
        amps = _apply_to_targets(amps, n, gate)
    return StateVector(amps)


def circuit_unitary(ops: Iterable[GateSpec], qubit_count: int) -> np.ndarray:
    """The full 2**n x 2**n matrix of a gate list, built column-parallel."""
    mat = np.eye(2**qubit_count, dtype=np.complex128)
    for gate in ops:
        if max(gate.targets) >= qubit_count:
            raise DomainError(f"Gate targets {gate.targets} outside a {qubit_count}-qubit layout")
        mat = _apply_to_targets(mat, qubit_count, gate)
    return mat


def apply_matrix(state: StateVector, matrix: np.ndarray) -> StateVector:
    """Apply a full-dimension operator; works for any dim, not only powers of two."""
    matrix = np.asarray(matrix)
    if matrix.shape != (state.dim, state.dim):
        raise DomainError(f"Operator shape {matrix.shape} does not match dimension {state.dim}")
    return StateVector(matrix @ state.amplitudes)


def circuit_depth(ops: Iterable[GateSpec]) -> int:
    """Depth by as-soon-as-possible layering: each qubit is touched once per layer."""
    last: dict[int, int] = {}
    depth = 0
    for gate in ops:
        layer = 1 + max((last.get(q, 0) for q in gate.targets), default=0)
        for q in gate.targets:
            last[q] = layer
        depth = max(depth, layer)
    return depth


# =============================================================================
# Measurement
# =============================================================================


@dataclass(frozen=True, eq=False)
class MeasurementRecord:
    outcome: int
    probability: float
    post_state: StateVector


def sample_index(probabilities: np.ndarray, rng: np.random.Generator) -> int:
    """Inverse-CDF draw; a point on a CDF boundary goes to the lower index."""
    cdf = np.cumsum(probabilities)
    # u in (0, total] never lands on a zero-probability prefix
    u = (1.0 - rng.random()) * cdf[-1]
    return int(min(np.searchsorted(cdf, u, side="left"), cdf.size - 1))


def measure(
    state: StateVector,
    register: str | None = None,
    layout: RegisterLayout | None = None,
    seed: SeedLike = None,
) -> MeasurementRecord:
    """Measure a register in the computational basis and collapse the state.

    Without a register the whole state is measured, which also works for
    dimensions that are not powers of two.
    """
    rng = make_rng(seed)
    if register is None:
        probs = state.probabilities()
        outcome = sample_index(probs, rng)
        return MeasurementRecord(outcome, float(probs[outcome]), basis_state(state.dim, outcome))

    layout = _layout_for(state, layout)
    n = layout.total_qubits
    targets = layout.qubits(register)
    k = len(targets)
    local = list(range(k))
    psi = np.moveaxis(state.amplitudes.reshape((2,) * n), targets, local)
    shape = psi.shape
    block = psi.reshape(2**k, -1)
    probs = np.sum(np.abs(block) ** 2, axis=1)
    outcome = sample_index(probs, rng)
    probability = float(probs[outcome])

    collapsed = np.zeros_like(block)
    collapsed[outcome] = block[outcome] / np.sqrt(probability)
    post = np.moveaxis(collapsed.reshape(shape), local, targets).reshape(-1)
    logger.debug("measured register %s -> %d (p=%.6f)", register, outcome, probability)
    return MeasurementRecord(outcome, probability, StateVector(post))


# =============================================================================
# Distances
# =============================================================================


def _check_dims(a: StateVector, b: StateVector) -> None:
    if a.dim != b.dim:
        raise DomainError(f"Dimension mismatch: {a.dim} vs {b.dim}")


def state_distance(a: StateVector, b: StateVector) -> float:
    """Euclidean norm of the amplitude difference."""
    _check_dims(a, b)
    return float(np.linalg.norm(a.amplitudes - b.amplitudes))


def total_variation(a: StateVector, b: StateVector) -> float:
    """Sum over the basis of |p_a(k) - p_b(k)| for the induced distributions."""
    _check_dims(a, b)
    return float(np.sum(np.abs(a.probabilities() - b.probabilities())))


def unit_direction_distance(a: np.ndarray, b: np.ndarray) -> float:
    """||a - b/||b|| ||: at most eps*sqrt(2) when a is a unit vector and ||a - b|| = eps <= 1."""
    b = np.asarray(b, dtype=np.complex128)
    norm = np.linalg.norm(b)
    if norm == 0:
        raise DomainError("Cannot take the direction of the zero vector")
    return float(np.linalg.norm(np.asarray(a) - b / norm))
