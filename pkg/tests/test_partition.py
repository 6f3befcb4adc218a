import itertools
import math
import random

import numpy as np
import pytest
from scipy.stats import chisquare

from pmeans import _kernels
from pmeans.discrete import AlphaTheta
from pmeans.partition import (
    BlockState,
    Composition,
    compositions,
    consistency_residual,
    crp_sample,
    crp_seating_probs,
    ecpf,
    ecpf_uniform,
    eppf,
    eppf_uniform,
    ewens_permutation_prob,
    kn_distribution,
    partitions_with_multiplicity,
)
from pmeans.sampling import RngStream

# the parameter grid spanning all three regimes
GRID = (
    [AlphaTheta(-1.0, float(m)) for m in (2, 3, 4)]
    + [AlphaTheta(0.0, t) for t in (0.5, 1.0, 2.0)]
    + [AlphaTheta(a, t) for a in (0.25, 0.5, 0.75) for t in (-a / 2, 0.5, 2.0)]
)


class TestComposition:
    def test_fields(self):
        c = Composition((2, 1, 3))
        assert c.n == 6 and c.k == 3

    def test_rejects(self):
        with pytest.raises(ValueError):
            Composition(())
        with pytest.raises(ValueError):
            Composition((2, 0))

    def test_block_state(self):
        assert BlockState([2, 1]).total == 3
        with pytest.raises(ValueError):
            BlockState([0])


class TestEnumeration:
    def test_composition_count(self):
        for n in range(1, 9):
            assert len(list(compositions(n))) == 2 ** (n - 1)
            for k in range(1, n + 1):
                assert len(list(compositions(n, k))) == math.comb(n - 1, k - 1)

    def test_partition_multiplicities_cover_compositions(self):
        for n in range(1, 10):
            for k in range(1, n + 1):
                total = sum(m for _, m in partitions_with_multiplicity(n, k))
                assert total == math.comb(n - 1, k - 1)


class TestEppf:
    def test_hand_values(self):
        assert eppf(AlphaTheta(0.0, 1.0), Composition((1, 1))) == pytest.approx(0.5)
        assert eppf(AlphaTheta(0.5, 0.5), Composition((2,))) == pytest.approx(1 / 3)
        assert eppf(AlphaTheta(0.0, 3.0), Composition((2,))) == pytest.approx(0.25)

    def test_symmetry_under_shuffles(self):
        rnd = random.Random(7)
        for params in GRID:
            for _ in range(5):
                n = rnd.randint(2, 12)
                parts = []
                left = n
                while left > 0:
                    p = rnd.randint(1, left)
                    parts.append(p)
                    left -= p
                shuffled = parts[:]
                rnd.shuffle(shuffled)
                assert eppf(params, Composition(parts)) == eppf(
                    params, Composition(shuffled)
                )

    def test_finite_regime_block_budget(self):
        params = AlphaTheta(-1.0, 2.0)
        assert eppf(params, Composition((1, 1, 1))) == 0.0
        assert eppf(params, Composition((1, 1))) > 0.0


class TestEcpf:
    def test_hand_values(self):
        assert ecpf(AlphaTheta(0.0, 1.0), Composition((1, 1))) == pytest.approx(0.5)
        assert ecpf(AlphaTheta(0.0, 1.0), Composition((2,))) == pytest.approx(0.5)

    @pytest.mark.parametrize("params", GRID, ids=str)
    def test_normalization(self, params):
        for n in (2, 6, 10):
            total = sum(ecpf(params, Composition(c)) for c in compositions(n))
            assert total == pytest.approx(1.0, abs=1e-12)

    def test_uniform_hand_values(self):
        assert ecpf_uniform(2, Composition((2,))) == pytest.approx(0.5)
        assert ecpf_uniform(2, Composition((1, 1))) == pytest.approx(0.5)
        assert ecpf_uniform(1, Composition((7,))) == 1.0
        assert ecpf_uniform(2, Composition((1, 1, 1))) == 0.0

    @pytest.mark.parametrize("m", [1, 2, 3, 5])
    def test_uniform_normalization(self, m):
        for n in (2, 5, 7):
            total = sum(ecpf_uniform(m, Composition(c)) for c in compositions(n))
            assert total == pytest.approx(1.0, abs=1e-12)


class TestKnDistribution:
    def test_hand_values(self):
        assert kn_distribution(
            lambda c: ecpf(AlphaTheta(0.0, 1.0), c), 2
        ) == pytest.approx([0.5, 0.5])
        assert kn_distribution(lambda c: ecpf_uniform(2, c), 2) == pytest.approx(
            [0.5, 0.5]
        )
        assert kn_distribution(lambda c: ecpf_uniform(3, c), 1) == pytest.approx([1.0])

    def test_partition_aggregation_matches_direct_sum(self):
        params = AlphaTheta(0.5, 2.0)
        n = 9
        direct = [
            sum(ecpf(params, Composition(c)) for c in compositions(n, k))
            for k in range(1, n + 1)
        ]
        assert kn_distribution(lambda c: ecpf(params, c), n) == pytest.approx(
            direct, abs=1e-14
        )

    def test_uniform_matches_balls_in_boxes_enumeration(self):
        # exact oracle: all 3^5 color assignments, count distinct colors
        m, n = 3, 5
        counts = np.zeros(n)
        for colors in itertools.product(range(m), repeat=n):
            counts[len(set(colors)) - 1] += 1
        expected = counts / m**n
        assert kn_distribution(lambda c: ecpf_uniform(m, c), n) == pytest.approx(
            list(expected), abs=1e-12
        )

    def test_guard(self):
        with pytest.raises(ValueError):
            kn_distribution(lambda c: 0.0, 26)


class TestConsistency:
    def test_hand_cases(self):
        assert consistency_residual(
            AlphaTheta(0.0, 1.0), Composition((1,))
        ) == pytest.approx(0.0, abs=1e-15)
        assert consistency_residual(
            AlphaTheta(0.5, 0.5), Composition((2, 1))
        ) == pytest.approx(0.0, abs=1e-12)
        assert consistency_residual(
            AlphaTheta(-1.0, 2.0), Composition((1, 1))
        ) == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("params", GRID, ids=str)
    def test_grid(self, params):
        for c in compositions(6):
            assert abs(consistency_residual(params, Composition(c))) <= 1e-12


class TestCrp:
    def test_single_customer(self):
        state = crp_sample(AlphaTheta(0.5, 0.5), 1, RngStream(50))
        assert state.block_sizes == [1]

    def test_seating_probs_are_eppf_ratios(self):
        rnd = random.Random(3)
        for params in GRID:
            m = params.finite_atoms
            for _ in range(5):
                k = rnd.randint(1, m if m else 4)
                sizes = [rnd.randint(1, 4) for _ in range(k)]
                probs = crp_seating_probs(params, BlockState(sizes))
                base = eppf(params, Composition(sizes))
                for j in range(k):
                    grown = sizes.copy()
                    grown[j] += 1
                    ratio = eppf(params, Composition(grown)) / base
                    assert probs[j] == pytest.approx(ratio, rel=1e-12)
                new_ratio = eppf(params, Composition(sizes + [1])) / base
                assert probs[-1] == pytest.approx(new_ratio, rel=1e-12, abs=1e-15)
                assert sum(probs) == pytest.approx(1.0, abs=1e-12)

    def test_new_block_probability_dirichlet_case(self):
        probs = crp_seating_probs(AlphaTheta(0.0, 1.0), BlockState([1]))
        assert probs == pytest.approx([0.5, 0.5])

    def test_pair_merge_probability(self):
        rng = RngStream(51)
        merged = [
            len(crp_sample(AlphaTheta(0.5, 0.5), 2, rng).block_sizes) == 1
            for _ in range(20_000)
        ]
        x = np.array(merged, dtype=float)
        se = x.std() / math.sqrt(x.size)
        assert abs(x.mean() - 1 / 3) <= 3 * se

    def test_kn_chi_square(self):
        # empirical block counts against the exact enumeration, n = 8
        params = AlphaTheta(0.5, 0.5)
        n, reps = 8, 100_000
        rng = RngStream(52)
        ks = np.array(
            [len(crp_sample(params, n, rng).block_sizes) for _ in range(reps)]
        )
        expected = np.array(kn_distribution(lambda c: ecpf(params, c), n)) * reps
        observed = np.bincount(ks, minlength=n + 1)[1:]
        keep = expected > 5.0
        stat, pvalue = chisquare(observed[keep], expected[keep])
        assert pvalue > 0.01

    def test_batch_kernel_matches_exact_law(self):
        params = AlphaTheta(0.0, 2.0)
        n, reps = 8, 100_000
        ks = _kernels.crp_kn_batch(0.0, 2.0, n, reps, RngStream(53).generator)
        expected = np.array(kn_distribution(lambda c: ecpf(params, c), n)) * reps
        observed = np.bincount(ks, minlength=n + 1)[1:]
        keep = expected > 5.0
        stat, pvalue = chisquare(observed[keep], expected[keep])
        assert pvalue > 0.01

    def test_finite_regime_block_cap(self):
        rng = RngStream(54)
        for _ in range(200):
            state = crp_sample(AlphaTheta(-1.0, 2.0), 10, rng)
            assert len(state.block_sizes) <= 2


class TestEwens:
    def test_single_element(self):
        out = ewens_permutation_prob(1.7, [1])
        assert out.per_permutation == pytest.approx(1.0)
        assert out.cycle_type == pytest.approx(1.0)

    def test_two_elements_uniform_at_theta_one(self):
        ident = ewens_permutation_prob(1.0, [2, 0])  # two fixed points
        swap = ewens_permutation_prob(1.0, [0, 1])  # one 2-cycle
        assert ident.per_permutation == pytest.approx(0.5)
        assert swap.per_permutation == pytest.approx(0.5)

    @pytest.mark.parametrize("theta", [0.5, 1.0, 2.0])
    def test_cycle_types_sum_to_one(self, theta):
        n = 4
        total = 0.0
        count_perms = 0
        for lam, _ in [
            (lam, m) for k in range(1, n + 1)
            for lam, m in partitions_with_multiplicity(n, k)
        ]:
            c = [lam.count(i) for i in range(1, n + 1)]
            out = ewens_permutation_prob(theta, c)
            total += out.cycle_type
            count_perms += round(out.cycle_type / out.per_permutation)
        assert total == pytest.approx(1.0, abs=1e-12)
        assert count_perms == math.factorial(n)

    def test_rejects(self):
        with pytest.raises(ValueError):
            ewens_permutation_prob(1.0, [])
        with pytest.raises(ValueError):
            ewens_permutation_prob(1.0, [-1, 1])
        with pytest.raises(ValueError):
            ewens_permutation_prob(0.0, [1])


class TestUniformEppf:
    def test_consistency_of_uniform_family(self):
        # the uniform-boxes EPPF is sampling consistent as well
        m = 3
        for c in compositions(5):
            comp = Composition(c)
            if comp.k > m:
                continue
            base = eppf_uniform(m, comp)
            total = 0.0
            for i in range(comp.k):
                grown = list(comp.parts)
                grown[i] += 1
                total += eppf_uniform(m, Composition(grown))
            total += eppf_uniform(m, Composition((*comp.parts, 1)))
            assert base == pytest.approx(total, abs=1e-12)
