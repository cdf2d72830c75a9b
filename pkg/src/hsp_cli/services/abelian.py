"""Finite abelian groups and the abelian hidden subgroup algorithm.

A group is a modulus tuple (N_1, ..., N_k); elements are coordinate tuples and
are indexed in C order, so the index of g is ``np.ravel_multi_index(g, moduli)``.
"""

from __future__ import annotations

import logging
import math
import re
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any

import numpy as np

from hsp_cli.config import settings
from hsp_cli.services.hsp_errors import CapabilityError, ConfigError, DomainError
from hsp_cli.services.statevec import SeedLike, StateVector, make_rng, sample_index, uniform_state

logger = logging.getLogger(__name__)

GroupElement = tuple[int, ...]

_FACTOR_RE = re.compile(r"Z(\d+)(?:\^(\d+))?", re.IGNORECASE)
_TUPLE_RE = re.compile(r"\(([^()]*)\)")

# Classes per batched FFT in the sampler
_SAMPLER_CHUNK = 256


@dataclass(frozen=True)
class AbelianGroup:
    """Z_{N_1} + ... + Z_{N_k}."""

    moduli: tuple[int, ...]

    def __post_init__(self) -> None:
        moduli = tuple(int(n) for n in self.moduli)
        if not moduli:
            raise DomainError("A group needs at least one cyclic factor")
        if min(moduli) < 1:
            raise DomainError(f"Moduli must be at least 1, got {moduli}")
        object.__setattr__(self, "moduli", moduli)

    @classmethod
    def parse(cls, text: str) -> AbelianGroup:
        """Read descriptors like ``Z4xZ2xZ5`` or ``Z2^3``."""
        parts = [p.strip() for p in text.strip().split("x") if p.strip()] if text else []
        if not parts:
            raise ConfigError(f"Empty group descriptor: {text!r}")
        moduli: list[int] = []
        for part in parts:
            match = _FACTOR_RE.fullmatch(part)
            if match is None:
                raise ConfigError(f"Malformed group factor {part!r} in {text!r}")
            moduli.extend([int(match.group(1))] * int(match.group(2) or 1))
        try:
            return cls(tuple(moduli))
        except DomainError as e:
            raise ConfigError(str(e)) from e

    @classmethod
    def cyclic(cls, n: int) -> AbelianGroup:
        return cls((n,))

    def __str__(self) -> str:
        return "x".join(f"Z{n}" for n in self.moduli)

    @property
    def rank(self) -> int:
        return len(self.moduli)

    @property
    def order(self) -> int:
        return math.prod(self.moduli)

    @property
    def lcm_d(self) -> int:
        return math.lcm(*self.moduli)

    @property
    def alphas(self) -> tuple[int, ...]:
        d = self.lcm_d
        return tuple(d // n for n in self.moduli)

    @property
    def identity(self) -> GroupElement:
        return (0,) * self.rank

    @cached_property
    def elements(self) -> np.ndarray:
        """All elements as an (order, rank) array in index order."""
        grid = np.indices(self.moduli).reshape(self.rank, -1).T
        grid.setflags(write=False)
        return grid

    def reduce(self, coords: Sequence[int] | np.ndarray) -> np.ndarray:
        return np.mod(np.asarray(coords, dtype=np.int64), self.moduli)

    def element(self, coords: Sequence[int]) -> GroupElement:
        if len(coords) != self.rank:
            raise DomainError(f"{self} elements have {self.rank} coordinates, got {len(coords)}")
        return tuple(int(c) for c in self.reduce(coords))

    def contains(self, coords: Sequence[int]) -> bool:
        return len(coords) == self.rank and all(0 <= c < n for c, n in zip(coords, self.moduli, strict=True))

    def index_of(self, coords: Sequence[int] | np.ndarray) -> int | np.ndarray:
        """Index of one element, or of each row of an array of elements."""
        arr = self.reduce(coords)
        if arr.ndim == 1:
            return int(np.ravel_multi_index(tuple(arr), self.moduli))
        return np.ravel_multi_index(tuple(arr.T), self.moduli)

    def element_at(self, index: int) -> GroupElement:
        return tuple(int(c) for c in np.unravel_index(index, self.moduli))

    def add(self, g: Sequence[int], h: Sequence[int]) -> GroupElement:
        return self.element(np.add(g, h))

    def neg(self, g: Sequence[int]) -> GroupElement:
        return self.element(np.negative(g))

    def random_element(self, rng: np.random.Generator) -> GroupElement:
        return tuple(int(rng.integers(n)) for n in self.moduli)


# =============================================================================
# Subgroups
# =============================================================================


def _closure(group: AbelianGroup, generators: Iterable[Sequence[int]]) -> np.ndarray:
    """Index mask of <generators>, closing under g, 2g, 4g, ... per generator."""
    mods = np.asarray(group.moduli)
    elems = group.elements
    mask = np.zeros(group.order, dtype=bool)
    mask[0] = True
    rounds = group.lcm_d.bit_length()
    for g in generators:
        shift = np.asarray(g, dtype=np.int64) % mods
        for _ in range(rounds):
            mask[group.index_of(elems[mask] + shift)] = True
            shift = (2 * shift) % mods
    return mask


@dataclass(frozen=True, eq=False)
class Subgroup:
    """A subgroup with its generators and materialized element mask."""

    group: AbelianGroup
    generators: tuple[GroupElement, ...]
    mask: np.ndarray = field(repr=False)

    @classmethod
    def generated_by(cls, group: AbelianGroup, generators: Iterable[Sequence[int]]) -> Subgroup:
        gens = tuple(group.element(g) for g in generators)
        mask = _closure(group, gens)
        mask.setflags(write=False)
        return cls(group, gens, mask)

    @classmethod
    def trivial(cls, group: AbelianGroup) -> Subgroup:
        return cls.generated_by(group, [])

    @classmethod
    def whole(cls, group: AbelianGroup) -> Subgroup:
        basis = np.eye(group.rank, dtype=np.int64)
        return cls.generated_by(group, basis)

    @classmethod
    def from_mask(cls, group: AbelianGroup, mask: np.ndarray) -> Subgroup:
        """Subgroup from a closed element mask, with a greedy generating set."""
        mask = np.asarray(mask, dtype=bool)
        gens: list[GroupElement] = []
        current = _closure(group, gens)
        for index in np.flatnonzero(mask):
            if not current[index]:
                gens.append(group.element_at(int(index)))
                current = _closure(group, gens)
        if not np.array_equal(current, mask):
            raise DomainError("Element set is not closed under addition")
        current.setflags(write=False)
        return cls(group, tuple(gens), current)

    @property
    def order(self) -> int:
        return int(self.mask.sum())

    @property
    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    @property
    def elements(self) -> list[GroupElement]:
        return [self.group.element_at(int(i)) for i in self.indices]

    def __contains__(self, g: Sequence[int]) -> bool:
        return bool(self.mask[self.group.index_of(g)])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Subgroup):
            return NotImplemented
        return self.group == other.group and np.array_equal(self.mask, other.mask)

    def __hash__(self) -> int:
        return hash((self.group, self.mask.tobytes()))

    def join(self, other: Subgroup) -> Subgroup:
        return Subgroup.generated_by(self.group, self.generators + other.generators)

    def is_subgroup_of(self, other: Subgroup) -> bool:
        return bool(np.all(other.mask[self.mask]))

    def to_text(self) -> str:
        return "[" + ",".join("(" + ",".join(str(c) for c in g) + ")" for g in self.generators) + "]"


def parse_subgroup(group: AbelianGroup, text: str) -> Subgroup:
    """Read generator lists like ``[(2,0,0),(0,1,0)]``; ``[(2)]`` for cyclic groups."""
    body = text.strip()
    if not (body.startswith("[") and body.endswith("]")):
        raise ConfigError(f"Subgroup must be a bracketed generator list, got {text!r}")
    generators = []
    for chunk in _TUPLE_RE.findall(body):
        try:
            coords = [int(c) for c in chunk.split(",") if c.strip()]
        except ValueError as e:
            raise ConfigError(f"Non-integer coordinate in {chunk!r}") from e
        if len(coords) != group.rank:
            raise ConfigError(f"Generator ({chunk}) has {len(coords)} coordinates, {group} needs {group.rank}")
        generators.append(coords)
    return Subgroup.generated_by(group, generators)


def all_subgroups(group: AbelianGroup) -> list[Subgroup]:
    """Every subgroup, as joins of cyclic subgroups; sorted by order."""
    cyclic: dict[bytes, Subgroup] = {}
    for index in range(group.order):
        sub = Subgroup.generated_by(group, [group.element_at(index)])
        cyclic.setdefault(sub.mask.tobytes(), sub)
    found = dict(cyclic)
    frontier = list(cyclic.values())
    while frontier:
        fresh = []
        for sub in frontier:
            for c in cyclic.values():
                if c.is_subgroup_of(sub):
                    continue
                joined = sub.join(c)
                key = joined.mask.tobytes()
                if key not in found:
                    found[key] = joined
                    fresh.append(joined)
        frontier = fresh
    return sorted(found.values(), key=lambda s: (s.order, s.indices.tolist()))


def random_subgroup(group: AbelianGroup, seed: SeedLike = None) -> Subgroup:
    """Closure of one to three random elements."""
    rng = make_rng(seed)
    count = int(rng.integers(1, 4))
    return Subgroup.generated_by(group, [group.random_element(rng) for _ in range(count)])


# =============================================================================
# Characters and dense operators
# =============================================================================


def _pairing(group: AbelianGroup, g: np.ndarray, h: np.ndarray) -> np.ndarray:
    """sum_l alpha_l g_l h_l mod d, so chi_g(h) = w_d^pairing."""
    return (np.asarray(g) * np.asarray(group.alphas)) @ np.asarray(h).T % group.lcm_d


def character_eval(group: AbelianGroup, g: Sequence[int], h: Sequence[int]) -> complex:
    """chi_g(h) = prod_j w_{N_j}^{g_j h_j}."""
    phase = int(_pairing(group, group.reduce(g), group.reduce(h)))
    return complex(np.exp(2j * np.pi * phase / group.lcm_d))


def orthogonal_subgroup(group: AbelianGroup, H: Subgroup) -> Subgroup:
    """H-perp: every g with chi_g(h) = 1 on all generators of H."""
    if not H.generators:
        return Subgroup.whole(group)
    gens = np.asarray(H.generators, dtype=np.int64)
    mask = np.all(_pairing(group, group.elements, gens) == 0, axis=1)
    return Subgroup.from_mask(group, mask)


def _check_dense(group: AbelianGroup) -> None:
    if group.order > settings.max_dense_order:
        raise CapabilityError(f"dense operator for {group}", group.order, settings.max_dense_order)


def group_qft(group: AbelianGroup) -> np.ndarray:
    """Dense F_G with entries chi_g(h) / sqrt(|G|)."""
    _check_dense(group)
    phases = _pairing(group, group.elements, group.elements)
    return np.exp(2j * np.pi * phases / group.lcm_d) / math.sqrt(group.order)


def translation_op(group: AbelianGroup, t: Sequence[int]) -> np.ndarray:
    """tau_t: |g> -> |t + g>."""
    _check_dense(group)
    targets = group.index_of(group.elements + np.asarray(t))
    op = np.zeros((group.order, group.order), dtype=np.complex128)
    op[targets, np.arange(group.order)] = 1.0
    return op


def phase_op(group: AbelianGroup, h: Sequence[int]) -> np.ndarray:
    """phi_h: diagonal chi_g(h)."""
    _check_dense(group)
    phases = _pairing(group, group.elements, group.reduce(h)[None, :])[:, 0]
    return np.diag(np.exp(2j * np.pi * phases / group.lcm_d))


def subgroup_state(H: Subgroup) -> StateVector:
    """|H>: uniform superposition over H's elements."""
    return uniform_state(H.group.order, H.indices)


# =============================================================================
# Oracle and quantum sampling
# =============================================================================


@dataclass(frozen=True, eq=False)
class CosetOracle:
    """f: G -> X as a table over element indices."""

    group: AbelianGroup
    labels: np.ndarray = field(repr=False)
    hidden: Subgroup | None = None

    def __post_init__(self) -> None:
        labels = np.asarray(self.labels)
        if labels.shape != (self.group.order,):
            raise DomainError(f"Oracle table needs {self.group.order} labels, got shape {labels.shape}")
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def for_subgroup(cls, group: AbelianGroup, H: Subgroup) -> CosetOracle:
        """Canonical labels: index of the lexicographically least element of g + H."""
        labels = np.full(group.order, group.order, dtype=np.int64)
        for h in H.indices:
            shifted = group.index_of(group.elements + np.asarray(group.element_at(int(h))))
            np.minimum(labels, shifted, out=labels)
        return cls(group, labels, hidden=H)

    @classmethod
    def from_function(cls, group: AbelianGroup, f: Callable[[GroupElement], int], hidden: Subgroup | None = None) -> CosetOracle:
        labels = np.fromiter((f(group.element_at(i)) for i in range(group.order)), dtype=np.int64, count=group.order)
        return cls(group, labels, hidden=hidden)

    def __call__(self, g: Sequence[int]) -> int:
        return int(self.labels[self.group.index_of(g)])

    @cached_property
    def classes(self) -> np.ndarray:
        """Dense class id per element index."""
        return np.unique(self.labels, return_inverse=True)[1].reshape(-1)

    def separates(self, H: Subgroup) -> bool:
        """f(g1) = f(g2) iff g1 - g2 in H."""
        if not np.array_equal(self.classes == self.classes[0], H.mask):
            return False
        for h in H.generators:
            shifted = self.classes[self.group.index_of(self.group.elements + np.asarray(h))]
            if not np.array_equal(shifted, self.classes):
                return False
        return int(self.classes.max()) + 1 == self.group.order // H.order


class HspSampler:
    """Exact measurement distribution of the abelian HSP circuit.

    F_G|0>, query f into a second register, F_G on the first register, then
    measure the first register. The second register is traced out class by
    class with a batched n-dimensional FFT, so no dense F_G is built.
    """

    def __init__(self, group: AbelianGroup, oracle: CosetOracle):
        if oracle.group != group:
            raise DomainError(f"Oracle is over {oracle.group}, sampler over {group}")
        self.group = group
        self.oracle = oracle

    @cached_property
    def distribution(self) -> np.ndarray:
        group = self.group
        classes = self.oracle.classes
        n_classes = int(classes.max()) + 1
        axes = tuple(range(1, group.rank + 1))
        probs = np.zeros(group.order)
        for start in range(0, n_classes, _SAMPLER_CHUNK):
            ids = np.arange(start, min(start + _SAMPLER_CHUNK, n_classes))
            block = (classes[None, :] == ids[:, None]).astype(np.complex128) / math.sqrt(group.order)
            block = np.fft.ifftn(block.reshape((ids.size, *group.moduli)), axes=axes, norm="ortho")
            probs += np.sum(np.abs(block.reshape(ids.size, -1)) ** 2, axis=0)
        logger.debug("HSP distribution over %s from %d label classes", group, n_classes)
        return probs

    def sample(self, rng: np.random.Generator) -> GroupElement:
        return self.group.element_at(sample_index(self.distribution, rng))

    def samples(self, count: int, rng: np.random.Generator) -> list[GroupElement]:
        return [self.sample(rng) for _ in range(count)]


def hsp_sample(group: AbelianGroup, oracle: CosetOracle, seed: SeedLike = None) -> GroupElement:
    """One run of the quantum step: a uniform element of H-perp."""
    return HspSampler(group, oracle).sample(make_rng(seed))


# =============================================================================
# Linear systems mod d
# =============================================================================


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def smith_normal_form(A: np.ndarray, d: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Diagonal D = U A V mod d with U, V unimodular over the integers.

    Pivots are cleared with 2x2 gcd combinations of determinant 1; only
    diagonality is produced, not the divisibility chain.
    """
    if d < 1:
        raise DomainError(f"Modulus must be positive, got {d}")
    D = np.mod(np.array(A, dtype=np.int64, ndmin=2), d)
    rows, cols = D.shape
    U = np.eye(rows, dtype=np.int64)
    V = np.eye(cols, dtype=np.int64)

    def row_combine(p: int, i: int) -> None:
        a, b = int(D[p, p]), int(D[i, p])
        if b % a == 0:
            q = b // a
            D[i] = (D[i] - q * D[p]) % d
            U[i] = (U[i] - q * U[p]) % d
            return
        g, x, y = _egcd(a, b)
        for M in (D, U):
            top, bottom = M[p].copy(), M[i].copy()
            M[p] = (x * top + y * bottom) % d
            M[i] = (-(b // g) * top + (a // g) * bottom) % d

    def col_combine(p: int, j: int) -> None:
        a, b = int(D[p, p]), int(D[p, j])
        if b % a == 0:
            q = b // a
            D[:, j] = (D[:, j] - q * D[:, p]) % d
            V[:, j] = (V[:, j] - q * V[:, p]) % d
            return
        g, x, y = _egcd(a, b)
        for M in (D, V):
            left, right = M[:, p].copy(), M[:, j].copy()
            M[:, p] = (x * left + y * right) % d
            M[:, j] = (-(b // g) * left + (a // g) * right) % d

    for p in range(min(rows, cols)):
        nonzero = np.argwhere(D[p:, p:] != 0)
        if nonzero.size == 0:
            break
        r, c = nonzero[0] + p
        D[[p, r]] = D[[r, p]]
        U[[p, r]] = U[[r, p]]
        D[:, [p, c]] = D[:, [c, p]]
        V[:, [p, c]] = V[:, [c, p]]
        while np.any(D[p + 1 :, p]) or np.any(D[p, p + 1 :]):
            for i in range(p + 1, rows):
                if D[i, p]:
                    row_combine(p, i)
            for j in range(p + 1, cols):
                if D[p, j]:
                    col_combine(p, j)
    return D, U, V


@dataclass(frozen=True, eq=False)
class LinearSystemModD:
    """A X = 0 mod d with its Smith data D = U A V."""

    group: AbelianGroup
    A: np.ndarray = field(repr=False)
    d: int
    D: np.ndarray = field(repr=False)
    U: np.ndarray = field(repr=False)
    V: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, group: AbelianGroup, A: np.ndarray, d: int | None = None) -> LinearSystemModD:
        d = group.lcm_d if d is None else d
        A = np.mod(np.array(A, dtype=np.int64, ndmin=2), d)
        if A.shape[1] != group.rank:
            raise DomainError(f"System has {A.shape[1]} unknowns, {group} has rank {group.rank}")
        D, U, V = smith_normal_form(A, d)
        return cls(group, A, d, D, U, V)

    @classmethod
    def from_samples(cls, group: AbelianGroup, samples: Sequence[Sequence[int]]) -> LinearSystemModD:
        """Rows alpha_l * g_l for each sampled g."""
        rows = np.asarray(samples, dtype=np.int64).reshape(-1, group.rank) * np.asarray(group.alphas)
        if rows.shape[0] == 0:
            rows = np.zeros((1, group.rank), dtype=np.int64)
        return cls.build(group, rows)

    def residual(self) -> int:
        """Largest entry of (U A V - D) mod d; zero for a correct decomposition."""
        return int(np.max((self.U @ self.A @ self.V - self.D) % self.d))

    @property
    def steps(self) -> np.ndarray:
        """Spacing of the allowed Y_i: d / gcd(D_ii, d), or 1 for free unknowns."""
        steps = np.ones(self.group.rank, dtype=np.int64)
        for i in range(min(self.D.shape)):
            steps[i] = self.d // math.gcd(int(self.D[i, i]), self.d)
        return steps

    def sample_solution(self, rng: np.random.Generator) -> np.ndarray:
        """A uniform solution X = V Y mod d."""
        steps = self.steps
        Y = np.array([step * rng.integers(self.d // step) for step in steps], dtype=np.int64)
        return (self.V @ Y) % self.d


def uniform_solution_sample(system: LinearSystemModD, seed: SeedLike = None) -> GroupElement:
    """Uniform solution read back as group coordinates X_l mod N_l."""
    X = system.sample_solution(make_rng(seed))
    return system.group.element(X)


# =============================================================================
# Full algorithm
# =============================================================================


def default_confidence(group: AbelianGroup) -> int:
    """ceil(log|G|) + 1: success probability at least 1 - 1/|G|."""
    return math.ceil(math.log2(group.order)) + 1


def success_bound(t1: int, t2: int) -> float:
    return (1 - 2.0**-t1) * (1 - 2.0**-t2)


@dataclass(frozen=True, eq=False)
class HspRun:
    group: AbelianGroup
    samples: list[GroupElement]
    solutions: list[GroupElement]
    system: LinearSystemModD
    recovered: Subgroup
    t1: int
    t2: int
    hidden: Subgroup | None = None
    # Exact FFT sampling: no approximation error from the Fourier step
    fourier_error: float = 0.0

    @property
    def success(self) -> bool | None:
        return None if self.hidden is None else self.recovered == self.hidden

    @property
    def success_bound(self) -> float:
        return success_bound(self.t1, self.t2)

    def to_dict(self) -> dict[str, Any]:
        return {
            "group": str(self.group),
            "hidden": None if self.hidden is None else self.hidden.to_text(),
            "recovered": self.recovered.to_text(),
            "recovered_order": self.recovered.order,
            "samples": [list(g) for g in self.samples],
            "success": self.success,
            "success_bound": self.success_bound,
            "fourier_error": self.fourier_error,
        }


def solve_hsp(
    group: AbelianGroup,
    oracle: CosetOracle,
    t1: int | None = None,
    t2: int | None = None,
    seed: SeedLike = None,
    sampler: HspSampler | None = None,
) -> HspRun:
    """Sample H-perp, solve the congruences, and close random solutions into H."""
    t1 = default_confidence(group) if t1 is None else t1
    t2 = default_confidence(group) if t2 is None else t2
    rng = make_rng(seed)
    sampler = sampler or HspSampler(group, oracle)
    log_order = math.ceil(math.log2(group.order))

    samples = sampler.samples(t1 + log_order, rng)
    system = LinearSystemModD.from_samples(group, samples)
    solutions = [group.element(system.sample_solution(rng)) for _ in range(t2 + log_order)]
    recovered = Subgroup.generated_by(group, solutions)
    logger.debug("solve_hsp %s: %d samples, recovered order %d", group, len(samples), recovered.order)
    return HspRun(group, samples, solutions, system, recovered, t1, t2, hidden=oracle.hidden)
