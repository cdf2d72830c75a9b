"""Tests for Simon's problem, the cyclic HSP and the factoring reduction."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hsp_cli.services.abelian import HspSampler
from hsp_cli.services.hsp_errors import DomainError, RetryExhaustedError
from hsp_cli.services.models import TrialReport
from hsp_cli.services.problems import (
    CYCLIC_SUCCESS_BOUND,
    OrderFindingInstance,
    ShorOutcome,
    SimonInstance,
    bits_to_int,
    check_factorable,
    cyclic_hsp,
    cyclic_oracle,
    cyclic_success_probability,
    find_order,
    gf2_nullspace,
    gf2_span,
    int_to_bits,
    shor_factor,
    simon_solve,
    simon_success_bound,
)
from hsp_cli.services.statevec import trial_rng

pytestmark = pytest.mark.unit


class TestBitHelpers:
    """Test bit-string conversions and GF(2) algebra."""

    def test_bits_to_int(self):
        """Test the first character is the high bit."""
        assert bits_to_int("110") == 6
        assert int_to_bits(6, 4) == "0110"

    @pytest.mark.parametrize("text", ["", "102", "ab"])
    def test_bits_to_int_rejects(self, text):
        """Test non-binary strings."""
        with pytest.raises(DomainError):
            bits_to_int(text)

    def test_nullspace_by_hand(self):
        """Test x0 = x1 = x2 is the only nonzero solution."""
        assert gf2_nullspace([0b011, 0b110], 3) == [0b111]

    def test_nullspace_of_nothing(self):
        """Test no constraints leave every unit vector free."""
        assert sorted(gf2_nullspace([], 3)) == [1, 2, 4]

    def test_span(self):
        """Test all combinations, zero first."""
        assert gf2_span([1, 2]) == [0, 1, 2, 3]
        assert gf2_span([]) == [0]

    @given(st.lists(st.integers(min_value=0, max_value=2**6 - 1), max_size=10))
    @settings(max_examples=60, deadline=None)
    @pytest.mark.property
    def test_nullspace_is_orthogonal(self, rows: list[int]):
        """Property: every basis vector has even overlap with every row."""
        basis = gf2_nullspace(rows, 6)
        for vector in basis:
            for row in rows:
                assert (vector & row).bit_count() % 2 == 0
        assert len(gf2_span(basis)) == len(set(gf2_span(basis)))


class TestSimon:
    """Test Simon's algorithm."""

    @pytest.mark.parametrize(("n", "s"), [(1, 0), (1, 1), (4, 0b1011), (6, 0b100001), (8, 0)])
    def test_recovers_shift(self, n, s):
        """Test the hidden shift is found."""
        run = simon_solve(SimonInstance(n, s), seed=n)
        assert run.success
        assert run.s == s

    def test_samples_orthogonal_to_shift(self):
        """Test each sample y has y.s = 0."""
        inst = SimonInstance(5, 0b10110)
        run = simon_solve(inst, seed=3)
        assert all((y & inst.s).bit_count() % 2 == 0 for y in run.samples)
        assert run.classical_queries >= 2

    def test_oracle_separates_pairs(self):
        """Test f(x) = f(x xor s)."""
        inst = SimonInstance(4, 0b0110)
        assert inst.f(0b0001) == inst.f(0b0111)
        assert inst.oracle().separates(inst.oracle().hidden)

    def test_instance_validation(self):
        """Test the shift must fit in n bits."""
        with pytest.raises(DomainError):
            SimonInstance(3, 8)
        with pytest.raises(DomainError):
            SimonInstance(0, 0)

    def test_random_instance_is_seeded(self):
        """Test equal seeds draw equal shifts."""
        assert SimonInstance.random(6, 9) == SimonInstance.random(6, 9)

    def test_report(self):
        """Test bit strings in the serialized run."""
        data = simon_solve(SimonInstance(3, 0b101), seed=0).to_dict()
        assert data["hidden"] == "101"
        assert data["recovered"] == "101"
        assert data["success"] is True

    def test_success_bound(self):
        """Test 1 - 2^-n."""
        assert simon_success_bound(1) == 0.5
        assert simon_success_bound(8) == pytest.approx(255 / 256)

    @pytest.mark.slow
    @pytest.mark.timeout(300)
    @pytest.mark.parametrize("n", range(1, 9))
    def test_success_rate(self, n):
        """Test 300 seeded runs with random shifts meet 1 - 2^-n."""
        runs = [simon_solve(SimonInstance.random(n, trial_rng(n, k)), seed=trial_rng(100 + n, k)) for k in range(300)]
        report = TrialReport.from_outcomes(f"simon n={n}", (run.success for run in runs), simon_success_bound(n))
        assert report.trials == 300
        assert report.passes, report


class TestCyclicHsp:
    """Test the gcd variant over Z_N."""

    def test_oracle_requires_divisor(self):
        """Test d | N."""
        with pytest.raises(DomainError):
            cyclic_oracle(12, 5)

    def test_recovers_generator(self):
        """Test <4> in Z12 is found on nearly every seed."""
        oracle = cyclic_oracle(12, 4)
        runs = [cyclic_hsp(12, oracle, seed=seed) for seed in range(20)]
        assert all(run.M % 3 == 0 for run in runs)
        assert sum(bool(run.success) for run in runs) >= 18
        assert runs[0].expected == 4

    def test_trivial_subgroup(self):
        """Test H = {0} gives d = N."""
        run = cyclic_hsp(9, cyclic_oracle(9, 9), seed=1, samples=20)
        assert run.expected == 9
        assert run.d == 9

    def test_whole_group(self):
        """Test H = Z_N leaves only zero samples."""
        run = cyclic_hsp(10, cyclic_oracle(10, 1), seed=2)
        assert run.samples == [0] * 8
        assert (run.M, run.d) == (10, 1)

    def test_group_mismatch(self):
        """Test the oracle must live on Z_N."""
        with pytest.raises(DomainError):
            cyclic_hsp(8, cyclic_oracle(12, 4))

    @pytest.mark.parametrize(
        ("d", "samples", "expected"),
        [(1, 8, 1.0), (4, 1, 0.5), (6, 1, 1 / 3), (5, 2, 24 / 25), (12, 3, (7 / 8) * (26 / 27))],
    )
    def test_success_probability(self, d, samples, expected):
        """Test the product over primes of d of 1 - p^-samples."""
        assert cyclic_success_probability(d, samples) == pytest.approx(expected)

    def test_success_probability_default_samples(self):
        """Test the default sample count clears the 3/4 claim."""
        for d in range(1, 200):
            assert cyclic_success_probability(d) >= CYCLIC_SUCCESS_BOUND

    @pytest.mark.parametrize(("d", "samples"), [(0, 8), (4, -1)])
    def test_success_probability_rejects(self, d, samples):
        """Test d >= 1 and a non-negative sample count."""
        with pytest.raises(DomainError):
            cyclic_success_probability(d, samples)

    @pytest.mark.slow
    @pytest.mark.timeout(300)
    @pytest.mark.parametrize(("N", "d"), [(15, 5), (16, 4), (21, 3), (12, 6)])
    def test_success_rate(self, N, d):
        """Test 500 seeded runs recover d at least 15/16 of the time."""
        oracle = cyclic_oracle(N, d)
        sampler = HspSampler(oracle.group, oracle)
        runs = [cyclic_hsp(N, oracle, seed=trial_rng(N * d, k), sampler=sampler) for k in range(500)]
        report = TrialReport.from_outcomes(f"cyclic N={N} d={d}", (run.success for run in runs), 15 / 16)
        assert report.passes, report
        assert report.empirical >= cyclic_success_probability(d) - 3 * report.sigma - 1 / report.trials


class TestOrderFinding:
    """Test order finding as a cyclic HSP."""

    def test_instance(self):
        """Test r and the ambient size for 7 mod 15."""
        inst = OrderFindingInstance.create(15, 7)
        assert inst.r == 4
        assert inst.ambient == 16

    def test_instance_rejects_common_factor(self):
        """Test gcd(x, N) = 1."""
        with pytest.raises(DomainError, match="gcd"):
            OrderFindingInstance.create(15, 5)

    @pytest.mark.parametrize(("N", "x", "r"), [(15, 7, 4), (21, 2, 6), (35, 4, 6), (15, 1, 1)])
    def test_find_order(self, N, x, r):
        """Test the recovered order."""
        assert find_order(OrderFindingInstance.create(N, x), seed=0) == r

    def test_retry_exhausted(self):
        """Test zero attempts raise."""
        with pytest.raises(RetryExhaustedError):
            find_order(OrderFindingInstance.create(15, 7), max_attempts=0)


class TestShor:
    """Test the factoring reduction."""

    @pytest.mark.parametrize("N", [15, 21, 33, 35])
    def test_factors(self, N):
        """Test a nontrivial factor is returned."""
        run = shor_factor(N, seed=1)
        assert 1 < run.factor < N
        assert N % run.factor == 0
        assert run.attempts[-1].outcome in (ShorOutcome.FACTOR, ShorOutcome.LUCKY_GCD)
        assert run.to_dict()["cofactor"] * run.factor == N

    @pytest.mark.parametrize(("N", "reason"), [(14, "2 is a factor"), (13, "prime"), (9, "power of the prime 3"), (1, "odd composite")])
    def test_rejects(self, N, reason):
        """Test even, prime and prime-power inputs."""
        with pytest.raises(DomainError, match=reason):
            check_factorable(N)
