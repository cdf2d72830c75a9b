"""Information-theoretic subgroup identification on explicit small groups.

m random coset states are held as a sum of product terms. Each cyclic subgroup
<g> is then tested with the two-outcome measurement P_K versus its complement,
where P_K projects every copy onto functions constant on left cosets of K.
"""

from __future__ import annotations

import itertools
import logging
import math
from collections.abc import Callable, Hashable, Iterable, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any

import numpy as np

from hsp_cli.config import settings
from hsp_cli.services.abelian import AbelianGroup
from hsp_cli.services.hsp_errors import BoundViolationError, CapabilityError, ConfigError, DomainError, TermExplosionError
from hsp_cli.services.statevec import SeedLike, make_rng

logger = logging.getLogger(__name__)

MAX_TABLE_ORDER = 24
PRUNE_BELOW = 1e-14
# Decimals kept when keying factors for merging
_KEY_DECIMALS = 9

TableSubgroup = frozenset[int]


# =============================================================================
# Group tables
# =============================================================================


@dataclass(frozen=True, eq=False)
class FiniteGroupTable:
    """Cayley table with ``table[a, b]`` the index of a*b."""

    table: np.ndarray = field(repr=False)
    names: tuple[str, ...] = ()
    label: str = ""

    def __post_init__(self) -> None:
        table = np.asarray(self.table, dtype=np.int64)
        n = table.shape[0]
        if table.ndim != 2 or table.shape != (n, n) or n < 1:
            raise DomainError(f"Cayley table must be square, got shape {table.shape}")
        if n > MAX_TABLE_ORDER:
            raise CapabilityError("group table order", n, MAX_TABLE_ORDER)
        if table.min() < 0 or table.max() >= n:
            raise DomainError("Cayley table entries out of range")
        idx = np.arange(n)
        if not np.array_equal(table[table[:, :, None], idx[None, None, :]], table[idx[:, None, None], table[None, :, :]]):
            raise DomainError("Cayley table is not associative")
        identities = [e for e in range(n) if np.array_equal(table[e], idx) and np.array_equal(table[:, e], idx)]
        if not identities:
            raise DomainError("Cayley table has no identity")
        if not all(np.any(table[a] == identities[0]) and np.any(table[:, a] == identities[0]) for a in range(n)):
            raise DomainError("Cayley table lacks inverses")
        table.setflags(write=False)
        object.__setattr__(self, "table", table)
        names = self.names or tuple(str(i) for i in range(n))
        if len(names) != n:
            raise DomainError(f"Need {n} element names, got {len(names)}")
        object.__setattr__(self, "names", tuple(names))

    # -- construction ----------------------------------------------------------

    @classmethod
    def from_elements(
        cls,
        elements: Sequence[Hashable],
        op: Callable[[Any, Any], Hashable],
        names: Sequence[str] | None = None,
        label: str = "",
    ) -> FiniteGroupTable:
        index = {e: i for i, e in enumerate(elements)}
        n = len(elements)
        table = np.empty((n, n), dtype=np.int64)
        for i, a in enumerate(elements):
            for j, b in enumerate(elements):
                try:
                    table[i, j] = index[op(a, b)]
                except KeyError as e:
                    raise DomainError(f"Element set not closed: {a} * {b}") from e
        return cls(table, tuple(names) if names else tuple(str(e) for e in elements), label)

    @classmethod
    def cyclic(cls, n: int) -> FiniteGroupTable:
        idx = np.arange(n)
        return cls((idx[:, None] + idx[None, :]) % n, label=f"Z{n}")

    @classmethod
    def from_abelian(cls, group: AbelianGroup) -> FiniteGroupTable:
        elems = group.elements
        table = group.index_of((elems[:, None, :] + elems[None, :, :]).reshape(-1, group.rank)).reshape(group.order, group.order)
        names = tuple("(" + ",".join(str(c) for c in row) + ")" for row in elems)
        return cls(table, names, str(group))

    @classmethod
    def from_permutations(cls, n: int) -> FiniteGroupTable:
        """S_n in lexicographic order, composing (a o b)(v) = a(b(v))."""
        perms = list(itertools.permutations(range(n)))
        if len(perms) > MAX_TABLE_ORDER:
            raise CapabilityError("symmetric group order", len(perms), MAX_TABLE_ORDER)
        return cls.from_elements(perms, compose, ["".join(map(str, p)) for p in perms], f"S{n}")

    @classmethod
    def parse(cls, text: str, label: str = "") -> FiniteGroupTable:
        """First line n, then n lines of n space-separated indices."""
        lines = [line.split() for line in text.strip().splitlines() if line.strip()]
        try:
            n = int(lines[0][0])
            rows = [[int(v) for v in row] for row in lines[1:]]
        except (IndexError, ValueError) as e:
            raise ConfigError(f"Malformed group table: {e}") from e
        if len(rows) != n or any(len(row) != n for row in rows):
            raise ConfigError(f"Group table must have {n} rows of {n} entries")
        try:
            return cls(np.array(rows), label=label)
        except DomainError as e:
            raise ConfigError(str(e)) from e

    def to_text(self) -> str:
        return "\n".join([str(self.order), *(" ".join(str(v) for v in row) for row in self.table)]) + "\n"

    # -- structure -------------------------------------------------------------

    @property
    def order(self) -> int:
        return self.table.shape[0]

    @cached_property
    def identity(self) -> int:
        idx = np.arange(self.order)
        return next(e for e in range(self.order) if np.array_equal(self.table[e], idx))

    @cached_property
    def inverse(self) -> np.ndarray:
        return np.argmax(self.table == self.identity, axis=1)

    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    def generated(self, generators: Iterable[int]) -> TableSubgroup:
        """Closure of {e} under right multiplication by the generators."""
        gens = list(generators)
        members = {self.identity}
        frontier = [self.identity]
        while frontier:
            fresh = []
            for a in frontier:
                for g in gens:
                    b = int(self.table[a, g])
                    if b not in members:
                        members.add(b)
                        fresh.append(b)
            frontier = fresh
        return frozenset(members)

    def cyclic_subgroup(self, g: int) -> TableSubgroup:
        return self.generated([g])

    def is_subgroup(self, K: Iterable[int]) -> bool:
        members = frozenset(K)
        return self.identity in members and all(int(self.table[a, b]) in members for a in members for b in members)

    def left_coset_labels(self, K: TableSubgroup) -> np.ndarray:
        """Coset id per element: the least index of bK."""
        members = np.fromiter(sorted(K), dtype=np.int64)
        return self.table[:, members].min(axis=1)

    @cached_property
    def subgroups(self) -> list[TableSubgroup]:
        """Subgroup lattice, as joins of cyclic subgroups."""
        cyclic = {self.cyclic_subgroup(g) for g in range(self.order)}
        found = set(cyclic)
        frontier = list(cyclic)
        while frontier:
            fresh = []
            for sub in frontier:
                for c in cyclic:
                    if c <= sub:
                        continue
                    joined = self.generated(sub | c)
                    if joined not in found:
                        found.add(joined)
                        fresh.append(joined)
            frontier = fresh
        return sorted(found, key=lambda s: (len(s), sorted(s)))


def compose(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    """(a o b)(v) = a(b(v))."""
    return tuple(a[v] for v in b)


def _closure_of(generators: Sequence[Hashable], op: Callable[[Any, Any], Hashable], identity: Hashable) -> list[Hashable]:
    elements = [identity]
    seen = {identity}
    for a in elements:
        for g in generators:
            b = op(a, g)
            if b not in seen:
                seen.add(b)
                elements.append(b)
    return elements


def _quaternion_mul(a: tuple[int, str], b: tuple[int, str]) -> tuple[int, str]:
    rules = {
        ("1", "1"): (1, "1"),
        ("i", "i"): (-1, "1"),
        ("j", "j"): (-1, "1"),
        ("k", "k"): (-1, "1"),
        ("i", "j"): (1, "k"),
        ("j", "k"): (1, "i"),
        ("k", "i"): (1, "j"),
        ("j", "i"): (-1, "k"),
        ("k", "j"): (-1, "i"),
        ("i", "k"): (-1, "j"),
    }
    if a[1] == "1":
        sign, unit = 1, b[1]
    elif b[1] == "1":
        sign, unit = 1, a[1]
    else:
        sign, unit = rules[(a[1], b[1])]
    return (a[0] * b[0] * sign, unit)


def _bundled() -> dict[str, Callable[[], FiniteGroupTable]]:
    def dihedral4() -> FiniteGroupTable:
        rotation, reflection = (1, 2, 3, 0), (0, 3, 2, 1)
        elems = _closure_of([rotation, reflection], compose, (0, 1, 2, 3))
        return FiniteGroupTable.from_elements(elems, compose, ["".join(map(str, p)) for p in elems], "D4")

    def quaternion() -> FiniteGroupTable:
        elems = [(s, u) for u in ("1", "i", "j", "k") for s in (1, -1)]
        names = [("-" if s < 0 else "") + u for s, u in elems]
        return FiniteGroupTable.from_elements(elems, _quaternion_mul, names, "Q8")

    tables: dict[str, Callable[[], FiniteGroupTable]] = {f"Z{n}": (lambda n=n: FiniteGroupTable.cyclic(n)) for n in range(1, 9)}
    tables["Z2xZ2"] = lambda: FiniteGroupTable.from_abelian(AbelianGroup((2, 2)))
    tables["S3"] = lambda: FiniteGroupTable.from_permutations(3)
    tables["D4"] = dihedral4
    tables["Q8"] = quaternion
    return tables


BUNDLED_GROUPS = tuple(_bundled())


def bundled_group(name: str) -> FiniteGroupTable:
    """One of Z1..Z8, Z2xZ2, S3, D4, Q8."""
    factory = _bundled().get(name)
    if factory is None:
        raise ConfigError(f"Unknown bundled group {name!r}; choose from {', '.join(BUNDLED_GROUPS)}")
    return factory()


# =============================================================================
# Projectors and product states
# =============================================================================


@dataclass(frozen=True, eq=False)
class SubgroupProjector:
    """Single-copy projector onto span{|bK>} over the distinct left cosets bK."""

    K: TableSubgroup
    matrix: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, group: FiniteGroupTable, K: Iterable[int]) -> SubgroupProjector:
        members = frozenset(K)
        if not group.is_subgroup(members):
            raise DomainError(f"{sorted(members)} is not a subgroup of {group.label or 'the group'}")
        labels = group.left_coset_labels(members)
        matrix = (labels[:, None] == labels[None, :]).astype(np.complex128) / len(members)
        return cls(members, matrix)

    def residuals(self) -> tuple[float, float]:
        """(||P^2 - P||, ||P^H - P||) as max entries."""
        P = self.matrix
        return float(np.max(np.abs(P @ P - P))), float(np.max(np.abs(P.conj().T - P)))


@dataclass(frozen=True, eq=False)
class ProductState:
    """sum_t coefs[t] * factors[t, 0] (x) ... (x) factors[t, m-1]."""

    coefs: np.ndarray = field(repr=False)
    factors: np.ndarray = field(repr=False)

    @classmethod
    def product(cls, factors: Sequence[np.ndarray]) -> ProductState:
        stacked = np.asarray(factors, dtype=np.complex128)[None, :, :]
        return cls(np.ones(1, dtype=np.complex128), stacked)

    @property
    def term_count(self) -> int:
        return int(self.coefs.size)

    @property
    def m(self) -> int:
        return int(self.factors.shape[1])

    @property
    def dim(self) -> int:
        return int(self.factors.shape[2])

    def inner(self, other: ProductState, chunk: int = 512) -> complex:
        """<self|other> from the per-copy Gram products, chunked over rows."""
        total = 0j
        for start in range(0, self.term_count, chunk):
            rows = slice(start, start + chunk)
            acc = np.ones((self.factors[rows].shape[0], other.term_count), dtype=np.complex128)
            for k in range(self.m):
                acc *= self.factors[rows, k, :].conj() @ other.factors[:, k, :].T
            total += complex(self.coefs[rows].conj() @ acc @ other.coefs)
        return total

    def norm_squared(self) -> float:
        return float(self.inner(self).real)

    def scaled(self, factor: complex) -> ProductState:
        return ProductState(self.coefs * factor, self.factors)

    def plus(self, other: ProductState) -> ProductState:
        return ProductState(np.concatenate([self.coefs, other.coefs]), np.concatenate([self.factors, other.factors]))

    def minus(self, other: ProductState) -> ProductState:
        return self.plus(other.scaled(-1))

    def project(self, projector: SubgroupProjector) -> ProductState:
        """P_K on every copy; the term count is unchanged."""
        return ProductState(self.coefs, self.factors @ projector.matrix.T).merged()

    def complement(self, projector: SubgroupProjector) -> ProductState:
        """(I - P_K) as the difference of the state and its projection."""
        return self.minus(self.project(projector)).merged()

    def merged(self) -> ProductState:
        """Combine terms whose factor lists agree up to scale; drop negligible terms."""
        F = self.factors
        norms = np.linalg.norm(F, axis=2)
        live = np.all(norms > PRUNE_BELOW, axis=1)
        F, norms, coefs = F[live], norms[live], self.coefs[live]
        if coefs.size == 0:
            return ProductState(np.zeros(0, dtype=np.complex128), np.zeros((0, *self.factors.shape[1:]), dtype=np.complex128))

        unit = F / norms[:, :, None]
        lead = np.argmax(np.abs(unit) > 1e-9, axis=2)
        phase = np.take_along_axis(unit, lead[:, :, None], axis=2)[:, :, 0]
        phase /= np.abs(phase)
        unit /= phase[:, :, None]
        coefs = coefs * np.prod(norms * phase, axis=1)

        keys = np.round(np.concatenate([unit.real, unit.imag], axis=2).reshape(len(coefs), -1), _KEY_DECIMALS) + 0.0
        _, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
        summed = np.zeros(first.size, dtype=np.complex128)
        np.add.at(summed, inverse.reshape(-1), coefs)
        keep = np.abs(summed) > PRUNE_BELOW
        return ProductState(summed[keep], unit[first][keep])

    def normalized(self) -> ProductState:
        norm = math.sqrt(self.norm_squared())
        if norm == 0:
            raise DomainError("Cannot normalize a zero product state")
        return self.scaled(1 / norm)

    def to_dense(self) -> np.ndarray:
        """Dense vector in C^(dim^m); only for cross-checks at small sizes."""
        size = self.dim**self.m
        if size > 2**20:
            raise CapabilityError("dense product state", size, 2**20)
        out = np.zeros(size, dtype=np.complex128)
        for coef, factors in zip(self.coefs, self.factors, strict=True):
            vec = np.ones(1, dtype=np.complex128)
            for f in factors:
                vec = np.kron(vec, f)
            out += coef * vec
        return out


def dense_projector_power(projector: SubgroupProjector, m: int) -> np.ndarray:
    """P_K tensored m times, for cross-checks."""
    size = projector.matrix.shape[0] ** m
    if size > 2**10:
        raise CapabilityError("dense m-fold projector", size, 2**10)
    out = np.ones((1, 1), dtype=np.complex128)
    for _ in range(m):
        out = np.kron(out, projector.matrix)
    return out


# =============================================================================
# Oracle, coset states, overlaps
# =============================================================================


@dataclass(frozen=True, eq=False)
class CosetTableOracle:
    """Labels per table index; equal labels exactly on left cosets of the hidden subgroup."""

    group: FiniteGroupTable
    labels: np.ndarray = field(repr=False)

    @classmethod
    def for_subgroup(cls, group: FiniteGroupTable, H: Iterable[int]) -> CosetTableOracle:
        members = frozenset(H)
        if not group.is_subgroup(members):
            raise DomainError(f"{sorted(members)} is not a subgroup")
        return cls(group, group.left_coset_labels(members))

    def __call__(self, g: int) -> int:
        return int(self.labels[g])

    def level_set(self, g: int) -> np.ndarray:
        return np.flatnonzero(self.labels == self.labels[g])

    @property
    def hidden(self) -> TableSubgroup:
        """Level set of the identity."""
        return frozenset(int(i) for i in self.level_set(self.group.identity))


def coset_state(group: FiniteGroupTable, oracle: CosetTableOracle, m: int, seed: SeedLike = None) -> ProductState:
    """m copies of |a_i H> for uniform a_i, read off the oracle's level sets."""
    if m < 1:
        raise DomainError(f"Copy count must be at least 1, got {m}")
    rng = make_rng(seed)
    factors = []
    for a in rng.integers(group.order, size=m):
        support = oracle.level_set(int(a))
        vec = np.zeros(group.order, dtype=np.complex128)
        vec[support] = 1 / math.sqrt(support.size)
        factors.append(vec)
    return ProductState.product(factors)


def overlap_pk(psi: ProductState, group: FiniteGroupTable, K: Iterable[int]) -> float:
    """<Psi|P_K|Psi> in the product representation."""
    return float(psi.inner(psi.project(SubgroupProjector.build(group, K))).real)


def predicted_overlap(H: Iterable[int], K: Iterable[int], m: int) -> float:
    """(|H n K| / |K|)^m."""
    H, K = frozenset(H), frozenset(K)
    return (len(H & K) / len(K)) ** m


def ehk_success_bound(order: int, m: int) -> float:
    return 1 - 2 * order / 2 ** (m / 2)


def ehk_copy_count(order: int) -> int:
    return math.ceil(4 * math.log2(order) + 2)


# =============================================================================
# Measurement cascade
# =============================================================================


@dataclass(frozen=True)
class EhkStep:
    element: int
    outcome: int
    probability_plus: float
    term_count: int


@dataclass(frozen=True)
class EhkRun:
    group: FiniteGroupTable
    m: int
    found: TableSubgroup
    steps: list[EhkStep]
    hidden: TableSubgroup | None = None

    @property
    def oracle_calls(self) -> int:
        return self.m

    @property
    def success(self) -> bool | None:
        return None if self.hidden is None else self.found == self.hidden

    @property
    def success_bound(self) -> float:
        return ehk_success_bound(self.group.order, self.m)

    def to_dict(self) -> dict[str, Any]:
        names = self.group.names
        return {
            "group": self.group.label,
            "m": self.m,
            "oracle_calls": self.oracle_calls,
            "found": sorted(names[g] for g in self.found),
            "hidden": None if self.hidden is None else sorted(names[g] for g in self.hidden),
            "success": self.success,
            "success_bound": self.success_bound,
            "steps": [
                {"element": names[s.element], "outcome": s.outcome, "p_plus": s.probability_plus, "terms": s.term_count}
                for s in self.steps
            ],
        }


def ehk_run(group: FiniteGroupTable, oracle: CosetTableOracle, m: int, seed: SeedLike = None) -> EhkRun:
    """Test every <g> in table order; members implied by confirmed ones are skipped."""
    rng = make_rng(seed)
    psi = coset_state(group, oracle, m, rng)
    confirmed: set[int] = set()
    found = group.generated(confirmed)
    steps: list[EhkStep] = []
    for g in range(group.order):
        if g in found:
            continue
        projector = SubgroupProjector.build(group, group.cyclic_subgroup(g))
        plus = psi.project(projector)
        p_plus = min(1.0, max(0.0, plus.norm_squared()))
        if rng.random() < p_plus:
            psi = plus.scaled(1 / math.sqrt(p_plus))
            confirmed.add(g)
            found = group.generated(confirmed)
            outcome = 1
        else:
            psi = psi.complement(projector).normalized()
            outcome = -1
        steps.append(EhkStep(g, outcome, p_plus, psi.term_count))
        if psi.term_count > settings.max_ehk_terms:
            partial = EhkRun(group, m, found, steps, oracle.hidden)
            raise TermExplosionError(psi.term_count, settings.max_ehk_terms, partial=partial)
    logger.debug("ehk on %s with m=%d found %d elements in %d tests", group.label, m, len(found), len(steps))
    return EhkRun(group, m, found, steps, oracle.hidden)


@dataclass(frozen=True)
class ErrorTrace:
    """<E_i|E_i> along the ideal cascade, with the i^2 / 2^m bounds and the final fidelity."""

    m: int
    errors: list[float]
    fidelity: float
    order: int

    @property
    def bounds(self) -> list[float]:
        return [i**2 / 2**self.m for i in range(len(self.errors))]

    @property
    def fidelity_bound(self) -> float:
        return ehk_success_bound(self.order, self.m)

    def verify(self, tolerance: float = 1e-9) -> None:
        for i, (observed, bound) in enumerate(zip(self.errors, self.bounds, strict=True)):
            if observed > bound + tolerance:
                raise BoundViolationError(f"error norm <E_{i}|E_{i}>", observed, bound)
        if self.fidelity < self.fidelity_bound - tolerance:
            raise BoundViolationError("final fidelity", self.fidelity, self.fidelity_bound)


def error_accumulation_check(group: FiniteGroupTable, H: Iterable[int], m: int, seed: SeedLike = None) -> ErrorTrace:
    """Project onto the correct branch for every g in table order, tracking E_i = Psi - Psi_i."""
    members = frozenset(H)
    oracle = CosetTableOracle.for_subgroup(group, members)
    psi = coset_state(group, oracle, m, seed)
    current = psi
    errors = [0.0]
    for g in range(group.order):
        projector = SubgroupProjector.build(group, group.cyclic_subgroup(g))
        current = current.project(projector) if g in members else current.complement(projector)
        if current.term_count > settings.max_ehk_terms:
            raise TermExplosionError(current.term_count, settings.max_ehk_terms, partial=errors)
        errors.append(psi.minus(current).merged().norm_squared())
    return ErrorTrace(m, errors, current.norm_squared(), group.order)
