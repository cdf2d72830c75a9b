"""Tests for finite abelian groups and the abelian HSP solver."""

from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import factorint
from sympy.utilities.iterables import partitions

from hsp_cli.services.abelian import (
    AbelianGroup,
    CosetOracle,
    HspSampler,
    LinearSystemModD,
    Subgroup,
    all_subgroups,
    character_eval,
    default_confidence,
    group_qft,
    hsp_sample,
    orthogonal_subgroup,
    parse_subgroup,
    phase_op,
    random_subgroup,
    smith_normal_form,
    solve_hsp,
    subgroup_state,
    success_bound,
    translation_op,
    uniform_solution_sample,
)
from hsp_cli.services.hsp_errors import CapabilityError, ConfigError, DomainError
from hsp_cli.services.models import TrialReport
from hsp_cli.services.statevec import StateVector, make_rng, state_distance, trial_rng

pytestmark = pytest.mark.unit

Z4 = AbelianGroup((4,))
Z4xZ2 = AbelianGroup((4, 2))
Z2_3 = AbelianGroup((2, 2, 2))
MIXED = AbelianGroup((2, 4, 3))


class TestAbelianGroup:
    """Test group descriptors and element arithmetic."""

    @pytest.mark.parametrize(
        ("text", "moduli"),
        [("Z4xZ2xZ5", (4, 2, 5)), ("Z2^3", (2, 2, 2)), ("z6", (6,)), ("Z3 x Z2^2", (3, 2, 2))],
    )
    def test_parse(self, text, moduli):
        """Test factor lists and powers."""
        assert AbelianGroup.parse(text).moduli == moduli

    @pytest.mark.parametrize("text", ["", "Q8", "Z4xQ", "Z0"])
    def test_parse_rejects(self, text):
        """Test malformed descriptors raise ConfigError."""
        with pytest.raises(ConfigError):
            AbelianGroup.parse(text)

    def test_str_round_trip(self):
        """Test the canonical descriptor."""
        assert str(AbelianGroup.parse("Z2^2xZ3")) == "Z2xZ2xZ3"

    def test_invariants(self):
        """Test order, lcm and scaling factors."""
        group = AbelianGroup((4, 6))
        assert group.order == 24
        assert group.rank == 2
        assert group.lcm_d == 12
        assert group.alphas == (3, 2)

    def test_arithmetic(self):
        """Test componentwise addition and negation."""
        assert Z4xZ2.add((3, 1), (2, 1)) == (1, 0)
        assert Z4xZ2.neg((1, 1)) == (3, 1)
        assert Z4xZ2.identity == (0, 0)

    def test_index_round_trip(self):
        """Test C-order indexing."""
        assert Z4xZ2.index_of((1, 1)) == 3
        assert Z4xZ2.element_at(3) == (1, 1)
        np.testing.assert_array_equal(Z4xZ2.index_of(Z4xZ2.elements), np.arange(8))

    def test_element_wrong_rank(self):
        """Test coordinate count must match the rank."""
        with pytest.raises(DomainError):
            Z4xZ2.element((1,))

    def test_contains(self):
        """Test reduced-coordinate membership."""
        assert Z4xZ2.contains((3, 1))
        assert not Z4xZ2.contains((4, 0))

    def test_rejects_empty_moduli(self):
        """Test a group needs a factor."""
        with pytest.raises(DomainError):
            AbelianGroup(())


class TestSubgroups:
    """Test subgroup construction and enumeration."""

    def test_parse_cyclic(self):
        """Test <2> in Z4."""
        H = parse_subgroup(Z4, "[(2)]")
        assert H.elements == [(0,), (2,)]
        assert H.to_text() == "[(2)]"

    def test_parse_errors(self):
        """Test bracket and arity checks."""
        with pytest.raises(ConfigError):
            parse_subgroup(Z4xZ2, "(1,0)")
        with pytest.raises(ConfigError):
            parse_subgroup(Z4xZ2, "[(1)]")
        with pytest.raises(ConfigError):
            parse_subgroup(Z4xZ2, "[(a,0)]")

    def test_closure(self):
        """Test <(1,1)> in Z4xZ2 has order 4."""
        H = Subgroup.generated_by(Z4xZ2, [(1, 1)])
        assert H.order == 4
        assert (2, 0) in H
        assert (1, 0) not in H

    def test_trivial_and_whole(self):
        """Test the extreme subgroups."""
        assert Subgroup.trivial(MIXED).order == 1
        assert Subgroup.whole(MIXED).order == MIXED.order

    def test_equality_ignores_generators(self):
        """Test subgroups compare by element set."""
        assert Subgroup.generated_by(Z4, [(1,)]) == Subgroup.generated_by(Z4, [(3,)])
        assert len({Subgroup.generated_by(Z4, [(1,)]), Subgroup.whole(Z4)}) == 1

    def test_from_mask_rejects_non_subgroup(self):
        """Test {0, 1} is not closed in Z4."""
        with pytest.raises(DomainError):
            Subgroup.from_mask(Z4, np.array([True, True, False, False]))

    @pytest.mark.parametrize(("group", "count"), [(Z4, 3), (AbelianGroup((6,)), 4), (AbelianGroup((2, 2)), 5), (Z2_3, 16)])
    def test_all_subgroups(self, group, count):
        """Test subgroup counts."""
        subs = all_subgroups(group)
        assert len(subs) == count
        assert subs[0].order == 1
        assert subs[-1].order == group.order

    def test_random_subgroup_is_seeded(self):
        """Test equal seeds give equal subgroups."""
        assert random_subgroup(MIXED, 4) == random_subgroup(MIXED, 4)


class TestCharacters:
    """Test characters and the dense operators."""

    def test_character_value(self):
        """Test chi_1(1) = i in Z4."""
        assert character_eval(Z4, (1,), (1,)) == pytest.approx(1j)
        assert character_eval(Z4xZ2, (0, 1), (3, 1)) == pytest.approx(-1)

    def test_orthogonal_of_two_in_z4(self):
        """Test <2>-perp = <2> in Z4."""
        H = parse_subgroup(Z4, "[(2)]")
        assert orthogonal_subgroup(Z4, H) == H

    def test_orthogonal_of_trivial(self):
        """Test the trivial subgroup's perp is G."""
        assert orthogonal_subgroup(Z4xZ2, Subgroup.trivial(Z4xZ2)).order == 8

    @given(st.integers(min_value=0, max_value=10_000))
    @settings(max_examples=25, deadline=None)
    @pytest.mark.property
    def test_perp_duality(self, seed: int):
        """Property: |H| |H-perp| = |G| and (H-perp)-perp = H."""
        H = random_subgroup(MIXED, seed)
        perp = orthogonal_subgroup(MIXED, H)
        assert H.order * perp.order == MIXED.order
        assert orthogonal_subgroup(MIXED, perp) == H

    def test_group_qft_unitary(self):
        """Test F_G is unitary."""
        F = group_qft(MIXED)
        assert np.max(np.abs(F @ F.conj().T - np.eye(24))) < 1e-12

    def test_fourier_of_subgroup_state(self):
        """Test F_G |H> = |H-perp>."""
        H = Subgroup.generated_by(Z4xZ2, [(2, 1)])
        out = StateVector(group_qft(Z4xZ2) @ subgroup_state(H).amplitudes)
        assert state_distance(out, subgroup_state(orthogonal_subgroup(Z4xZ2, H))) < 1e-12

    def test_translation_phase_intertwine(self):
        """Test F_G tau_t = phi_t F_G."""
        F = group_qft(MIXED)
        t = (1, 3, 2)
        np.testing.assert_allclose(F @ translation_op(MIXED, t), phase_op(MIXED, t) @ F, atol=1e-12)

    def test_dense_cap(self):
        """Test dense operators refuse huge groups."""
        with pytest.raises(CapabilityError):
            group_qft(AbelianGroup((8193,)))


class TestOracleAndSampler:
    """Test coset oracles and the exact HSP distribution."""

    def test_oracle_separates_hidden(self):
        """Test the canonical oracle separates exactly its subgroup."""
        H = Subgroup.generated_by(Z4xZ2, [(2, 1)])
        oracle = CosetOracle.for_subgroup(Z4xZ2, H)
        assert oracle.separates(H)
        assert not oracle.separates(Subgroup.generated_by(Z4xZ2, [(2, 0)]))
        assert oracle((0, 0)) == oracle((2, 1))

    def test_oracle_shape_checked(self):
        """Test the label table covers every element."""
        with pytest.raises(DomainError):
            CosetOracle(Z4, np.arange(3))

    def test_from_function(self):
        """Test a parity oracle hides <2>."""
        oracle = CosetOracle.from_function(Z4, lambda g: g[0] % 2)
        assert oracle.separates(parse_subgroup(Z4, "[(2)]"))

    def test_distribution_uniform_on_perp(self):
        """Test the measurement is uniform over H-perp."""
        H = Subgroup.generated_by(Z2_3, [(1, 1, 0)])
        sampler = HspSampler(Z2_3, CosetOracle.for_subgroup(Z2_3, H))
        perp = orthogonal_subgroup(Z2_3, H)
        expected = np.where(perp.mask, 1 / perp.order, 0.0)
        np.testing.assert_allclose(sampler.distribution, expected, atol=1e-12)

    def test_trivial_subgroup_gives_uniform(self):
        """Test hiding {0} yields the uniform distribution."""
        sampler = HspSampler(MIXED, CosetOracle.for_subgroup(MIXED, Subgroup.trivial(MIXED)))
        np.testing.assert_allclose(sampler.distribution, np.full(24, 1 / 24), atol=1e-12)

    def test_samples_in_perp(self):
        """Test every sample lies in H-perp."""
        H = parse_subgroup(Z4, "[(2)]")
        oracle = CosetOracle.for_subgroup(Z4, H)
        assert {hsp_sample(Z4, oracle, seed) for seed in range(30)} <= {(0,), (2,)}

    def test_sampler_group_mismatch(self):
        """Test oracle and sampler must share a group."""
        with pytest.raises(DomainError):
            HspSampler(Z4xZ2, CosetOracle.for_subgroup(Z4, Subgroup.trivial(Z4)))


class TestLinearSystems:
    """Test Smith normal form and solution sampling."""

    def test_smith_normal_form(self):
        """Test U A V = D mod d with D diagonal."""
        A = np.array([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
        D, U, V = smith_normal_form(A, 12)
        np.testing.assert_array_equal((U @ np.mod(A, 12) @ V - D) % 12, 0)
        assert np.count_nonzero(D - np.diag(np.diag(D))) == 0

    def test_bad_modulus(self):
        """Test d must be positive."""
        with pytest.raises(DomainError):
            smith_normal_form(np.eye(2), 0)

    def test_solutions_satisfy_system(self):
        """Test sampled X solve A X = 0 mod d."""
        system = LinearSystemModD.from_samples(MIXED, [(1, 2, 0), (0, 2, 1)])
        assert system.residual() == 0
        rng = make_rng(0)
        for _ in range(50):
            X = system.sample_solution(rng)
            np.testing.assert_array_equal((system.A @ X) % system.d, 0)

    def test_empty_samples(self):
        """Test no samples leaves every element a solution."""
        system = LinearSystemModD.from_samples(Z4xZ2, [])
        assert system.steps.tolist() == [1, 1]
        assert Z4xZ2.contains(uniform_solution_sample(system, 3))

    def test_wrong_unknown_count(self):
        """Test A must have rank-many columns."""
        with pytest.raises(DomainError):
            LinearSystemModD.build(Z4xZ2, np.ones((2, 3)))


class TestSolveHsp:
    """Test the full abelian algorithm."""

    def test_confidence_defaults(self):
        """Test ceil(log |G|) + 1 and the product bound."""
        assert default_confidence(Z4) == 3
        assert success_bound(3, 3) == pytest.approx((7 / 8) ** 2)

    @pytest.mark.parametrize(
        ("group", "hidden"),
        [(Z4, "[(2)]"), (Z4xZ2, "[(2,1)]"), (Z2_3, "[(1,1,0),(0,1,1)]"), (MIXED, "[(0,2,1)]"), (MIXED, "[]")],
    )
    def test_recovers_hidden(self, group, hidden):
        """Test generous confidence recovers H on every seed."""
        H = parse_subgroup(group, hidden)
        oracle = CosetOracle.for_subgroup(group, H)
        sampler = HspSampler(group, oracle)
        for seed in range(10):
            run = solve_hsp(group, oracle, t1=20, t2=20, seed=seed, sampler=sampler)
            assert run.success
            assert run.recovered == H

    def test_default_success_rate(self):
        """Test default confidence succeeds well above its bound."""
        H = parse_subgroup(Z4, "[(2)]")
        oracle = CosetOracle.for_subgroup(Z4, H)
        wins = sum(bool(solve_hsp(Z4, oracle, seed=seed).success) for seed in range(50))
        assert wins >= 40

    def test_run_report(self):
        """Test the serialized run."""
        H = parse_subgroup(Z4, "[(2)]")
        run = solve_hsp(Z4, CosetOracle.for_subgroup(Z4, H), t1=1, t2=1, seed=0)
        data = run.to_dict()
        assert data["hidden"] == "[(2)]"
        assert len(data["samples"]) == 1 + 2
        assert data["success_bound"] == pytest.approx(0.25)

    def test_unknown_hidden(self):
        """Test success is unknown without a hidden subgroup."""
        oracle = CosetOracle.from_function(Z4, lambda g: g[0] % 2)
        assert solve_hsp(Z4, oracle, seed=1).success is None


def _abelian_groups(max_order: int) -> list[AbelianGroup]:
    """Every abelian group up to isomorphism, as products of prime-power cyclic factors."""
    groups = [AbelianGroup((1,))]
    for order in range(2, max_order + 1):
        choices = [
            [tuple(p**part for part, count in sorted(split.items()) for _ in range(count)) for split in partitions(e)]
            for p, e in factorint(order).items()
        ]
        for combo in itertools.product(*choices):
            groups.append(AbelianGroup(tuple(m for factors in combo for m in factors)))
    return groups


def _random_group(index: int, max_order: int = 1024) -> AbelianGroup:
    rng = np.random.default_rng(index)
    while True:
        moduli = tuple(int(m) for m in rng.integers(2, 33, size=int(rng.integers(1, 4))))
        if math.prod(moduli) <= max_order:
            return AbelianGroup(moduli)


def _rate_report(group: AbelianGroup, subgroups: list[Subgroup], trials: int, seed: int) -> TrialReport:
    samplers: dict[int, HspSampler] = {}
    outcomes = []
    for k in range(trials):
        slot = k % len(subgroups)
        if slot not in samplers:
            samplers[slot] = HspSampler(group, CosetOracle.for_subgroup(group, subgroups[slot]))
        run = solve_hsp(group, samplers[slot].oracle, seed=trial_rng(seed, k), sampler=samplers[slot])
        outcomes.append(run.recovered == subgroups[slot])
    return TrialReport.from_outcomes(f"hsp {group}", outcomes, 1 - 1 / group.order, seed=seed)


@pytest.mark.slow
class TestSuccessRateOnCorpus:
    """Test default confidence meets 1 - 1/|G| across many groups."""

    def test_corpus_enumeration(self):
        """Test the group list has the known isomorphism-class counts."""
        orders = [g.order for g in _abelian_groups(64)]
        assert orders.count(16) == 5
        assert orders.count(64) == 11
        assert orders.count(36) == 4

    @pytest.mark.timeout(1200)
    def test_small_groups(self):
        """Test every subgroup of every group of order at most 64."""
        for group in _abelian_groups(64):
            subgroups = all_subgroups(group)
            report = _rate_report(group, subgroups, max(500, len(subgroups)), seed=group.order)
            assert report.passes, report

    @pytest.mark.timeout(600)
    @pytest.mark.parametrize("index", range(20))
    def test_random_groups(self, index):
        """Test a random hidden subgroup of a random group up to order 1024."""
        group = _random_group(index)
        hidden = random_subgroup(group, seed=index)
        report = _rate_report(group, [hidden], 500, seed=index)
        assert report.passes, report

    @pytest.mark.parametrize("group", [Z4, Z4xZ2, MIXED, AbelianGroup((3, 3)), AbelianGroup((2, 2, 2, 2))])
    def test_distribution_support(self, group):
        """Test every subgroup's measurement is uniform on its annihilator."""
        for hidden in all_subgroups(group):
            perp = orthogonal_subgroup(group, hidden)
            probs = HspSampler(group, CosetOracle.for_subgroup(group, hidden)).distribution
            expected = np.where(perp.mask, 1 / perp.order, 0.0)
            np.testing.assert_allclose(probs, expected, atol=1e-12)
