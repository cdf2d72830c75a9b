"""Simon's problem, the cyclic HSP with gcd post-processing, and Shor's reduction."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Any

import numpy as np
import sympy

from hsp_cli.services.abelian import AbelianGroup, CosetOracle, HspSampler, Subgroup
from hsp_cli.services.hsp_errors import DomainError, RetryExhaustedError
from hsp_cli.services.statevec import SeedLike, make_rng

logger = logging.getLogger(__name__)

CYCLIC_SAMPLES = 8
# success claim for CYCLIC_SAMPLES or more samples
CYCLIC_SUCCESS_BOUND = 0.75


# =============================================================================
# Simon
# =============================================================================


def bits_to_int(bits: str) -> int:
    """'110' -> 6; the first character is the most significant bit."""
    if not bits or set(bits) - {"0", "1"}:
        raise DomainError(f"Expected a bit string, got {bits!r}")
    return int(bits, 2)


def int_to_bits(value: int, n: int) -> str:
    return format(value, f"0{n}b")


def gf2_nullspace(rows: list[int], n: int) -> list[int]:
    """Basis of {x : r.x = 0 mod 2 for every row}, vectors packed as n-bit ints."""
    pivots: dict[int, int] = {}
    for row in rows:
        for col, pivot in pivots.items():
            if row >> col & 1:
                row ^= pivot
        if not row:
            continue
        col = row.bit_length() - 1
        for other, pivot in pivots.items():
            if pivot >> col & 1:
                pivots[other] = pivot ^ row
        pivots[col] = row
    basis = []
    for free in range(n):
        if free in pivots:
            continue
        vector = 1 << free
        for col, pivot in pivots.items():
            if pivot >> free & 1:
                vector |= 1 << col
        basis.append(vector)
    return basis


def gf2_span(basis: list[int]) -> list[int]:
    """All 2**len(basis) combinations, zero first."""
    span = [0]
    for b in basis:
        span += [v ^ b for v in span]
    return span


@dataclass(frozen=True)
class SimonInstance:
    """f on Z_2^n with f(x) = f(x') iff x' = x xor s."""

    n: int
    s: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise DomainError(f"Simon instances need n >= 1, got {self.n}")
        if not 0 <= self.s < 2**self.n:
            raise DomainError(f"Hidden shift {self.s} does not fit in {self.n} bits")

    @classmethod
    def random(cls, n: int, seed: SeedLike = None) -> SimonInstance:
        return cls(n, int(make_rng(seed).integers(2**n)))

    @property
    def group(self) -> AbelianGroup:
        return AbelianGroup((2,) * self.n)

    def f(self, x: int) -> int:
        return min(x, x ^ self.s)

    def oracle(self) -> CosetOracle:
        group = self.group
        x = np.arange(2**self.n)
        hidden = Subgroup.generated_by(group, [group.element_at(self.s)])
        return CosetOracle(group, np.minimum(x, x ^ self.s), hidden=hidden)


@dataclass(frozen=True)
class SimonRun:
    instance: SimonInstance
    s: int
    samples: list[int]
    rounds: int
    classical_queries: int

    @property
    def success(self) -> bool:
        return self.s == self.instance.s

    def to_dict(self) -> dict[str, Any]:
        n = self.instance.n
        return {
            "n": n,
            "hidden": int_to_bits(self.instance.s, n),
            "recovered": int_to_bits(self.s, n),
            "samples": [int_to_bits(y, n) for y in self.samples],
            "rounds": self.rounds,
            "classical_queries": self.classical_queries,
            "success": self.success,
        }


def simon_success_bound(n: int) -> float:
    return 1 - 2.0**-n


def simon_solve(inst: SimonInstance, seed: SeedLike = None, max_rounds: int = 8) -> SimonRun:
    """Sample y with y.s = 0, solve over GF(2), and confirm candidates with f(c) = f(0).

    Rounds of 2n + 1 samples accumulate while the nullspace has dimension 2 or
    more; after the last round every nonzero nullspace vector is tried.
    """
    rng = make_rng(seed)
    sampler = HspSampler(inst.group, inst.oracle())
    samples: list[int] = []
    basis: list[int] = []
    rounds = 0
    while rounds < max_rounds:
        rounds += 1
        samples += [inst.group.index_of(y) for y in sampler.samples(2 * inst.n + 1, rng)]
        basis = gf2_nullspace(samples, inst.n)
        if len(basis) <= 1:
            break
        logger.debug("simon round %d: nullspace dimension %d, resampling", rounds, len(basis))

    queries = 1
    found = 0
    for candidate in gf2_span(basis)[1:]:
        queries += 1
        if inst.f(candidate) == inst.f(0):
            found = candidate
            break
    return SimonRun(inst, found, samples, rounds, queries)


# =============================================================================
# Cyclic HSP
# =============================================================================


def cyclic_oracle(N: int, d: int) -> CosetOracle:
    """Canonical coset oracle for H = <d> in Z_N."""
    if N < 1 or d < 1 or N % d:
        raise DomainError(f"Cyclic HSP needs d | N, got N={N}, d={d}")
    group = AbelianGroup.cyclic(N)
    return CosetOracle.for_subgroup(group, Subgroup.generated_by(group, [(d,)]))


@dataclass(frozen=True)
class CyclicHspRun:
    N: int
    d: int
    M: int
    samples: list[int]
    expected: int | None = None

    @property
    def success(self) -> bool | None:
        return None if self.expected is None else self.d == self.expected

    def to_dict(self) -> dict[str, Any]:
        return {
            "N": self.N,
            "d": self.d,
            "M": self.M,
            "samples": self.samples,
            "expected": self.expected,
            "success": self.success,
        }


def cyclic_hsp(
    N: int,
    oracle: CosetOracle,
    seed: SeedLike = None,
    samples: int = CYCLIC_SAMPLES,
    sampler: HspSampler | None = None,
) -> CyclicHspRun:
    """Output d = N / M with M the gcd of the samples; all-zero samples give M = N."""
    if oracle.group != AbelianGroup.cyclic(N):
        raise DomainError(f"Oracle is over {oracle.group}, expected Z{N}")
    rng = make_rng(seed)
    sampler = sampler or HspSampler(oracle.group, oracle)
    drawn = [g[0] for g in sampler.samples(samples, rng)]
    M = math.gcd(N, *drawn)
    expected = None
    if oracle.hidden is not None:
        expected = math.gcd(N, *(g[0] for g in oracle.hidden.generators))
    return CyclicHspRun(N, N // M, M, drawn, expected)


def cyclic_success_probability(d: int, samples: int = CYCLIC_SAMPLES) -> float:
    """Exact chance that samples uniform over the multiples of N/d have gcd N/d with N.

    Writing each sample as j * N/d with j uniform on Z_d, this is the chance that
    no prime of d divides every j.
    """
    if d < 1 or samples < 0:
        raise DomainError(f"Need d >= 1 and samples >= 0, got d={d}, samples={samples}")
    return float(math.prod(1 - p**-samples for p in sympy.primefactors(d)))


# =============================================================================
# Order finding and factoring
# =============================================================================


@dataclass(frozen=True)
class OrderFindingInstance:
    """f(a) = x^a mod N over Z_{N_amb}, with r | N_amb."""

    N: int
    x: int
    r: int
    ambient: int

    @classmethod
    def create(cls, N: int, x: int, ambient: int | None = None) -> OrderFindingInstance:
        """Ambient size r * ceil(ambient / r), by default the smallest multiple of r at least N."""
        if N < 2:
            raise DomainError(f"Modulus must be at least 2, got {N}")
        x %= N
        g = math.gcd(x, N)
        if g != 1:
            raise DomainError(f"gcd({x}, {N}) = {g}: take it as a factor directly")
        r = int(sympy.n_order(x, N))
        target = N if ambient is None else ambient
        return cls(N, x, r, r * math.ceil(target / r))

    def f(self, a: int) -> int:
        return pow(self.x, a, self.N)

    def oracle(self) -> CosetOracle:
        group = AbelianGroup.cyclic(self.ambient)
        hidden = Subgroup.generated_by(group, [(self.r,)])
        return CosetOracle.from_function(group, lambda a: self.f(a[0]), hidden=hidden)


def find_order(inst: OrderFindingInstance, seed: SeedLike = None, max_attempts: int = 10) -> int:
    """The order of x, as the generator the cyclic HSP finds over Z_{N_amb}.

    A gcd failure yields a proper divisor d of r, caught by checking x^d = 1.
    """
    rng = make_rng(seed)
    oracle = inst.oracle()
    sampler = HspSampler(oracle.group, oracle)
    for attempt in range(1, max_attempts + 1):
        d = cyclic_hsp(inst.ambient, oracle, seed=rng, sampler=sampler).d
        if inst.f(d) == 1:
            return d
        logger.debug("order finding attempt %d: x^%d != 1 mod %d", attempt, d, inst.N)
    raise RetryExhaustedError(f"order finding for x={inst.x} mod {inst.N}", max_attempts)


class ShorOutcome(StrEnum):
    LUCKY_GCD = "lucky_gcd"
    ODD_ORDER = "odd_order"
    TRIVIAL_ROOT = "trivial_root"
    FACTOR = "factor"


@dataclass(frozen=True)
class ShorAttempt:
    y: int
    outcome: ShorOutcome
    order: int | None = None


@dataclass(frozen=True)
class ShorRun:
    N: int
    factor: int
    attempts: list[ShorAttempt] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "N": self.N,
            "factor": self.factor,
            "cofactor": self.N // self.factor,
            "attempts": [{"y": a.y, "order": a.order, "outcome": str(a.outcome)} for a in self.attempts],
        }


def check_factorable(N: int) -> None:
    """Reject inputs the reduction cannot handle, with the reason."""
    if N < 3 or N % 2 == 0:
        raise DomainError(f"N must be an odd composite, got {N}" + (" (2 is a factor)" if N % 2 == 0 and N > 2 else ""))
    if sympy.isprime(N):
        raise DomainError(f"{N} is prime; there is no nontrivial factor")
    primes = sympy.primefactors(N)
    if len(primes) == 1:
        raise DomainError(f"{N} is a power of the prime {primes[0]}; order finding cannot split it")


def shor_factor(N: int, seed: SeedLike = None, max_attempts: int = 20) -> ShorRun:
    """Random base y, its order r, then gcd(y^(r/2) - 1, N) or gcd(y^(r/2) + 1, N)."""
    check_factorable(N)
    rng = make_rng(seed)
    attempts: list[ShorAttempt] = []
    for _ in range(max_attempts):
        y = int(rng.integers(2, N))
        g = math.gcd(y, N)
        if g > 1:
            attempts.append(ShorAttempt(y, ShorOutcome.LUCKY_GCD))
            return ShorRun(N, g, attempts)
        r = find_order(OrderFindingInstance.create(N, y), seed=rng)
        if r % 2:
            attempts.append(ShorAttempt(y, ShorOutcome.ODD_ORDER, r))
            continue
        half = pow(y, r // 2, N)
        if half == N - 1:
            attempts.append(ShorAttempt(y, ShorOutcome.TRIVIAL_ROOT, r))
            continue
        factor = math.gcd(half - 1, N)
        if factor in (1, N):
            factor = math.gcd(half + 1, N)
        attempts.append(ShorAttempt(y, ShorOutcome.FACTOR, r))
        logger.info("factored %d with y=%d, r=%d: %d", N, y, r, factor)
        return ShorRun(N, factor, attempts)
    raise RetryExhaustedError(f"factoring {N}", max_attempts)
