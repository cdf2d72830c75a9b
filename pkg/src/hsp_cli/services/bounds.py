"""Monte-Carlo and exact checks of the probability bounds the algorithms lean on.

Four bounds are covered: majority voting (Chernoff), the gcd of uniform
integer samples being 1, the Euler totient sum, and random elements
generating a finite group.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Any

import numpy as np
import sympy

from hsp_cli.config import settings
from hsp_cli.services.abelian import AbelianGroup
from hsp_cli.services.ehk import FiniteGroupTable, bundled_group
from hsp_cli.services.hsp_errors import BoundViolationError, CapabilityError, ConfigError, DomainError
from hsp_cli.services.models import TrialReport
from hsp_cli.services.statevec import SeedLike, make_rng, qubits_for_dim

logger = logging.getLogger(__name__)

MAX_GENERATION_ORDER = 2**12
# Largest d**k enumerated exactly in the gcd check
MAX_GCD_ENUMERATION = 2**16


def _seed_value(seed: SeedLike) -> int | None:
    return seed if isinstance(seed, int) else None


def _trials(trials: int | None) -> int:
    count = settings.default_trials if trials is None else trials
    if count < 1:
        raise DomainError(f"Need at least one trial, got {count}")
    return count


# =============================================================================
# Chernoff
# =============================================================================


def chernoff_bound(epsilon: float, n: int) -> float:
    return math.exp(-2 * epsilon**2 * n)


def chernoff_check(epsilon: float, n: int, trials: int | None = None, seed: SeedLike = 0) -> TrialReport:
    """Rate at which the majority of n Bernoulli(1/2 + epsilon) votes is wrong.

    The report counts wrong majorities (sum <= n/2) as its events, and the
    bound e^(-2 epsilon^2 n) is an upper bound on their rate.
    """
    if not 0 < epsilon < 0.5:
        raise DomainError(f"epsilon must lie in (0, 1/2), got {epsilon}")
    if n < 1:
        raise DomainError(f"Need at least one vote, got n={n}")
    count = _trials(trials)
    rng = make_rng(seed)
    votes = rng.binomial(n, 0.5 + epsilon, size=count)
    failures = int(np.count_nonzero(2 * votes <= n))
    bound = chernoff_bound(epsilon, n)
    logger.debug("chernoff eps=%s n=%d: %d/%d wrong majorities, bound %.3g", epsilon, n, failures, count, bound)
    return TrialReport(
        name="chernoff",
        trials=count,
        successes=failures,
        bound=bound,
        kind="upper",
        seed=_seed_value(seed),
        params={"epsilon": epsilon, "n": n},
    )


# =============================================================================
# Totient sums
# =============================================================================


def totient_sieve(n: int) -> np.ndarray:
    """phi(0..n) by the multiplicative sieve; phi[0] is 0."""
    if n < 1:
        raise DomainError(f"Sieve bound must be positive, got {n}")
    phi = np.arange(n + 1, dtype=np.int64)
    for p in range(2, n + 1):
        if phi[p] == p:
            phi[p::p] -= phi[p::p] // p
    return phi


@dataclass(frozen=True)
class TotientSumCheck:
    n: int
    total: int
    deviation: float
    bound: float

    @property
    def holds(self) -> bool:
        return self.deviation < self.bound

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "total": self.total,
            "deviation": self.deviation,
            "bound": self.bound,
            "holds": self.holds,
        }


def totient_sum_check(n: int) -> TotientSumCheck:
    """Compare sum_{c<=n} phi(c) with 3n^2/pi^2; the gap must stay under n ln n."""
    if n < 2:
        raise DomainError(f"The totient sum bound needs n >= 2, got {n}")
    total = int(totient_sieve(n)[1:].sum())
    check = TotientSumCheck(n, total, abs(total - 3 * n * n / math.pi**2), n * math.log(n))
    if not check.holds:
        raise BoundViolationError(f"totient sum deviation at n={n}", check.deviation, check.bound)
    return check


# =============================================================================
# GCD of random samples
# =============================================================================


def gcd_pair_exact(n: int) -> float:
    """P(gcd(a, b) = 1) for a, b uniform on {0..n}, by counting.

    Pairs with max(a, b) = c >= 2 contribute 2 phi(c) coprime pairs, and
    max = 1 contributes the three pairs (0,1), (1,0), (1,1).
    """
    if n < 1:
        raise DomainError(f"Range bound must be positive, got {n}")
    coprime = 2 * int(totient_sieve(n)[1:].sum()) + 1
    return coprime / (n + 1) ** 2


def gcd_pair_lower_bound(n: int) -> float:
    """(2n^2 + 4n)/(n+1)^4 * (3n^2 - pi^2 n ln n)/pi^2, above 1/2 from n = 94 on."""
    if n < 1:
        raise DomainError(f"Range bound must be positive, got {n}")
    return (2 * n * n + 4 * n) / (n + 1) ** 4 * (3 * n * n - math.pi**2 * n * math.log(n)) / math.pi**2


def gcd_bound(k: int) -> float:
    return 1 - 0.5 ** (k / 2)


def gcd_exact(d: int, k: int) -> float | None:
    """P(gcd(t_1..t_k) = 1) over {0..d-1}^k by enumeration, or None past the cap."""
    if d**k > MAX_GCD_ENUMERATION:
        return None
    grid = np.array(list(itertools.product(range(d), repeat=k)), dtype=np.int64)
    return float(np.count_nonzero(np.gcd.reduce(grid, axis=1) == 1)) / d**k


def gcd_probability_check(d: int, k: int, trials: int | None = None, seed: SeedLike = 0) -> TrialReport:
    """Empirical P(gcd = 1) for k uniform samples from {0..d-1} against 1 - 2^(-k/2)."""
    if d < 2 or k < 2:
        raise DomainError(f"Need d >= 2 and k >= 2, got d={d}, k={k}")
    count = _trials(trials)
    rng = make_rng(seed)
    samples = rng.integers(0, d, size=(count, k), dtype=np.int64)
    coprime = int(np.count_nonzero(np.gcd.reduce(samples, axis=1) == 1))
    return TrialReport(
        name="gcd",
        trials=count,
        successes=coprime,
        bound=gcd_bound(k),
        seed=_seed_value(seed),
        params={"d": d, "k": k},
        exact=gcd_exact(d, k),
    )


# =============================================================================
# Random generation
# =============================================================================


def z2_generation_probability(r: int, t: int) -> float:
    """P(r + t uniform vectors span GF(2)^r) = prod_{a=1..r} (1 - 2^-(t+a))."""
    if r < 0 or t < 0:
        raise DomainError(f"Need r, t >= 0, got r={r}, t={t}")
    return math.prod(1 - 2.0 ** -(t + a) for a in range(1, r + 1))


def generation_bound(t: int) -> float:
    return 1 - 2.0**-t


def resolve_group(text: str) -> AbelianGroup | FiniteGroupTable:
    """An abelian descriptor such as ``Z2xZ4``, else a bundled table name such as ``S3``."""
    try:
        return AbelianGroup.parse(text)
    except ConfigError:
        try:
            return bundled_group(text.strip())
        except ConfigError:
            raise ConfigError(f"{text!r} is neither an abelian descriptor nor a bundled group") from None


def _batched_rank_mod_p(matrices: np.ndarray, p: int) -> np.ndarray:
    """Rank over GF(p) of each matrix in a (trials, rows, cols) stack."""
    M = matrices % p
    trials, rows, cols = M.shape
    inverse = np.array([0] + [pow(v, -1, p) for v in range(1, p)], dtype=np.int64)
    rank = np.zeros(trials, dtype=np.int64)
    row_ids = np.arange(rows)
    for col in range(cols):
        candidates = (M[:, :, col] != 0) & (row_ids[None, :] >= rank[:, None])
        has = candidates.any(axis=1)
        if not has.any():
            continue
        t = np.flatnonzero(has)
        pivot = np.argmax(candidates[t], axis=1)
        target = rank[t]
        swapped = M[t, pivot].copy()
        M[t, pivot] = M[t, target]
        M[t, target] = swapped
        pivot_rows = (M[t, target] * inverse[M[t, target, col]][:, None]) % p
        M[t, target] = pivot_rows
        factors = M[t, :, col].copy()
        factors[np.arange(t.size), target] = 0
        M[t] = (M[t] - factors[:, :, None] * pivot_rows[:, None, :]) % p
        rank[t] += 1
    return rank


def _abelian_generates(group: AbelianGroup, draws: np.ndarray) -> np.ndarray:
    """Per trial, whether the drawn elements generate the group.

    A set generates a finite abelian group iff its image spans G/pG over
    GF(p) for every prime p dividing |G|.
    """
    ok = np.ones(draws.shape[0], dtype=bool)
    moduli = np.asarray(group.moduli)
    for p in sympy.primefactors(group.order):
        columns = np.flatnonzero(moduli % p == 0)
        ok &= _batched_rank_mod_p(draws[:, :, columns], int(p)) == columns.size
    return ok


def _table_generates(group: FiniteGroupTable, gens: np.ndarray) -> bool:
    members = {group.identity}
    frontier = [group.identity]
    while frontier:
        fresh = []
        for a in frontier:
            for g in gens:
                b = int(group.table[a, g])
                if b not in members:
                    members.add(b)
                    fresh.append(b)
                    if len(members) == group.order:
                        return True
        frontier = fresh
    return len(members) == group.order


def generation_probability_check(
    group: AbelianGroup | FiniteGroupTable, t: int, trials: int | None = None, seed: SeedLike = 0
) -> TrialReport:
    """Empirical P(t + ceil(log|G|) uniform elements generate G) against 1 - 2^-t."""
    if t < 0:
        raise DomainError(f"t must be non-negative, got {t}")
    if group.order > MAX_GENERATION_ORDER:
        raise CapabilityError("Group order for the generation check", group.order, MAX_GENERATION_ORDER)
    count = _trials(trials)
    rng = make_rng(seed)
    draws_per_trial = t + qubits_for_dim(group.order)

    if isinstance(group, AbelianGroup):
        draws = rng.integers(0, np.asarray(group.moduli), size=(count, draws_per_trial, group.rank))
        generated = int(np.count_nonzero(_abelian_generates(group, draws)))
        label = str(group)
        exact = None
        if set(group.moduli) <= {2}:
            exact = z2_generation_probability(group.rank, t)
        elif group.order == 1:
            exact = 1.0
    else:
        draws = rng.integers(0, group.order, size=(count, draws_per_trial))
        generated = sum(_table_generates(group, row) for row in draws)
        label = group.label
        exact = 1.0 if group.order == 1 else None

    logger.debug("generation %s t=%d: %d/%d generating sets", label, t, generated, count)
    return TrialReport(
        name="generation",
        trials=count,
        successes=generated,
        bound=generation_bound(t),
        seed=_seed_value(seed),
        params={"group": label, "t": t, "elements": draws_per_trial},
        exact=exact,
    )
