from fractions import Fraction

import numpy as np
import pytest

from capax import oracles
from capax.capacity import capacity_from_mobius, lower_envelope, mobius_from_capacity, validate_capacity
from capax.errors import (
    NegativeScore,
    NotBelief,
    NotSymmetric,
    ScoreOutOfRange,
    ZeroBlockMeasure,
)
from capax.generators import random_belief_psym, random_capacity, random_psym, random_scores, random_symmetric
from capax.integral import (
    belief_decompose,
    capacity_to_owa,
    choquet,
    choquet_mobius,
    choquet_psym,
    choquet_psym_batch,
    decompose,
    increment_tables,
    interaction_degree,
    owa,
    owa_to_capacity,
    star_matrix,
    subset_minima,
    vanishing_degree_check,
)
from capax.psym import compress, expand, mobius_matrix
from capax.setcore import Partition

from conftest import COUNTER_SCORES


class TestDenseChoquet:
    def test_counterexample(self, counter_mu, counter_m):
        assert choquet(counter_mu, COUNTER_SCORES) == pytest.approx(0.6)
        assert choquet_mobius(counter_m, COUNTER_SCORES) == pytest.approx(0.6)

    def test_additive_is_expectation(self):
        p = [0.2, 0.3, 0.5]
        vals = [sum(p[i] for i in range(3) if s >> i & 1) for s in range(8)]
        f = [4.0, 1.0, 2.0]
        assert choquet(validate_capacity(vals), f) == pytest.approx(0.8 + 0.3 + 1.0)

    def test_unanimity_is_min(self):
        vals = np.zeros(8)
        vals[-1] = 1
        assert choquet(validate_capacity(vals), [0.7, 0.2, 0.9]) == pytest.approx(0.2)

    def test_constant(self, jury):
        assert choquet(jury, [0.4] * 4) == pytest.approx(0.4)

    def test_indicator(self, jury):
        # integral of the indicator of A is mu(A)
        for a in range(16):
            f = [float(a >> i & 1) for i in range(4)]
            assert choquet(jury, f) == pytest.approx(jury.values[a])

    def test_exact(self, jury_exact):
        f = [Fraction(1, 3), Fraction(2, 3), Fraction(1, 2), Fraction(0)]
        got = choquet(jury_exact, f)
        assert isinstance(got, Fraction)
        assert got == oracles.choquet_sorted_sum(jury_exact.values, f)

    @pytest.mark.parametrize("n", [2, 5, 8])
    def test_against_oracles(self, rng, n):
        mu = random_capacity(n, rng)
        m = mobius_from_capacity(mu)
        for ties in (False, True):
            f = random_scores(n, rng, ties=ties)
            ref = oracles.choquet_sorted_sum(mu.values, list(f))
            assert choquet(mu, f) == pytest.approx(ref, abs=1e-12)
            assert choquet_mobius(m, f) == pytest.approx(oracles.choquet_by_min_sum(m.coeffs, list(f)), abs=1e-12)
            assert choquet_mobius(m, f) == pytest.approx(ref, abs=1e-12)

    def test_negative_scores(self, jury):
        with pytest.raises(NegativeScore):
            choquet(jury, [0.1, -0.1, 0.2, 0.3])

    def test_wrong_length(self, jury):
        with pytest.raises(ValueError):
            choquet(jury, [0.1, 0.2])


class TestMobiusForm:
    def test_range_guard(self, counter_m):
        with pytest.raises(ScoreOutOfRange):
            choquet_mobius(counter_m, [2.0, 1.0, 0.0])

    def test_homogeneous_extension(self, counter_m, counter_mu):
        f = [2.0, 1.0, 0.0]
        assert choquet_mobius(counter_m, f, check_range=False) == pytest.approx(choquet(counter_mu, f))

    def test_subset_minima(self):
        mins = subset_minima([0.5, 0.2, 0.9])
        assert mins[0b101] == 0.5 and mins[0b111] == 0.2 and mins[0b100] == 0.9


class TestCompressedChoquet:
    def test_counterexample(self, counter_mu):
        assert choquet_psym(compress(counter_mu), COUNTER_SCORES) == pytest.approx(0.6)

    @pytest.mark.parametrize("sizes", [(1,), (4,), (2, 2), (1, 3, 2), (1, 1, 1, 1)])
    def test_matches_dense(self, rng, sizes):
        ps = random_psym(sizes, rng)
        mu = expand(ps)
        for ties in (False, True):
            f = random_scores(ps.n, rng, ties=ties)
            assert choquet_psym(ps, f) == pytest.approx(choquet(mu, f), abs=1e-12)

    def test_exact(self, rng):
        ps = random_psym((2, 3), rng, rational=True)
        f = [Fraction(int(k), 7) for k in rng.integers(0, 7, 5)]
        assert choquet_psym(ps, f) == choquet(expand(ps), f)

    def test_increment_tables_are_gains(self, rng):
        ps = random_psym((2, 2), rng)
        d = increment_tables(mobius_matrix(ps.matrix))
        mu = ps.matrix
        for j in range(2):
            for b in np.ndindex(*ps.extents):
                if b[j] < ps.sizes[j]:
                    up = list(b)
                    up[j] += 1
                    assert d[j][b] == pytest.approx(mu[tuple(up)] - mu[b], abs=1e-12)

    def test_batch(self, rng):
        ps = random_psym((3, 2, 1), rng)
        scores = rng.random((40, ps.n))
        scores[:5] = np.round(scores[:5] * 2) / 2  # some ties
        got = choquet_psym_batch(ps, scores)
        ref = [choquet_psym(ps, row) for row in scores]
        assert np.allclose(got, ref, atol=1e-12)

    def test_batch_negative(self, rng):
        ps = random_psym((2,), rng)
        with pytest.raises(NegativeScore):
            choquet_psym_batch(ps, np.array([[0.1, -0.2]]))

    def test_large_without_dense(self, rng):
        ps = random_psym((10, 10), rng)
        f = rng.random(20)
        top = sorted(range(20), key=lambda i: -f[i])
        # walk by hand through the compressed matrix
        comp = [0, 0]
        total = 0.0
        for pos, i in enumerate(top):
            comp[0 if i < 10 else 1] += 1
            nxt = f[top[pos + 1]] if pos + 1 < 20 else 0.0
            total += (f[i] - nxt) * ps.matrix[tuple(comp)]
        # binomial weights up to C(10, 5) cost a few digits
        assert choquet_psym(ps, f) == pytest.approx(total, abs=1e-9)


class TestOWA:
    def test_value(self):
        assert owa([0.2, 0.3, 0.5], [3.0, 1.0, 2.0]) == pytest.approx(2.3)

    def test_extremes(self):
        f = [0.3, 0.9, 0.1]
        assert owa([1, 0, 0], f) == pytest.approx(0.1)
        assert owa([0, 0, 1], f) == pytest.approx(0.9)

    def test_capacity_profile(self):
        ps = owa_to_capacity([0.2, 0.3, 0.5])
        assert ps.matrix.tolist() == pytest.approx([0, 0.5, 0.8, 1.0])

    def test_choquet_equals_owa(self, rng):
        w = rng.random(5)
        w /= w.sum()
        ps = owa_to_capacity(w)
        for _ in range(5):
            f = rng.random(5)
            assert choquet(expand(ps), f) == pytest.approx(owa(w, f), abs=1e-12)
            assert choquet_psym(ps, f) == pytest.approx(owa(w, f), abs=1e-12)

    def test_roundtrip(self, rng):
        ps = random_symmetric(6, rng, rational=True)
        assert owa_to_capacity(capacity_to_owa(ps)).matrix.tolist() == ps.matrix.tolist()
        w = [Fraction(1, 6), Fraction(1, 3), Fraction(1, 2)]
        assert capacity_to_owa(owa_to_capacity(w)) == w

    def test_from_dense(self, rng):
        ps = random_symmetric(4, rng)
        assert capacity_to_owa(expand(ps)) == pytest.approx(capacity_to_owa(ps))

    def test_not_symmetric(self, jury):
        with pytest.raises(NotSymmetric):
            capacity_to_owa(jury)

    def test_bad_weights(self):
        with pytest.raises(ValueError):
            owa([0.5, 0.6], [1, 2])
        with pytest.raises(ValueError):
            owa([1.5, -0.5], [1, 2])


class TestDecompose:
    def test_counterexample(self, counter_mu):
        res = decompose(compress(counter_mu), COUNTER_SCORES)
        assert res.block_terms == pytest.approx([0.4, 0.15])
        assert res.residual == pytest.approx(0.05)
        assert res.total == pytest.approx(0.6)
        assert res.identity_gap < 1e-12

    def test_counterexample_exact(self):
        from conftest import counter_mobius

        mu = capacity_from_mobius(counter_mobius(rational=True))
        res = decompose(compress(mu), [Fraction(1), Fraction(1, 2), Fraction(0)])
        assert res.block_terms == [Fraction(2, 5), Fraction(3, 20)]
        assert res.residual == Fraction(1, 20)
        assert res.identity_gap == 0

    def test_block_measures(self, counter_mu):
        res = decompose(compress(counter_mu), COUNTER_SCORES)
        assert res.block_masses == pytest.approx([0.4, 0.6])
        inner = res.block_measures[1]
        # normalised measure on {x2, x3}
        assert inner.matrix.tolist() == pytest.approx([0, 0.5, 1.0])

    @pytest.mark.parametrize("sizes", [(2, 3), (1, 1, 2), (3, 1)])
    def test_residual_against_dense(self, rng, sizes):
        ps = random_psym(sizes, rng)
        mu = expand(ps)
        m = mobius_from_capacity(mu).coeffs.copy()
        for b in ps.partition.blocks:
            for t in range(1 << ps.n):
                if t and t & b == t:
                    m[t] = 0
        f = rng.random(ps.n)
        res = decompose(ps, f)
        # cross-block Moebius mass integrated by the min-over-subsets form
        assert res.residual == pytest.approx(oracles.choquet_by_min_sum(m, list(f)), abs=1e-12)
        assert res.total == pytest.approx(choquet(mu, f), abs=1e-12)

    def test_zero_block(self):
        # mu({x1}) = 0
        vals = [0, 0, 0.5, 1.0]
        with pytest.raises(ZeroBlockMeasure) as exc:
            decompose(compress(validate_capacity(vals), Partition.singletons(2)), [0.3, 0.4])
        assert exc.value.block_index == 0

    def test_symmetric_single_block(self, rng):
        ps = random_symmetric(4, rng)
        f = rng.random(4)
        res = decompose(ps, f)
        assert res.residual == 0
        assert res.block_terms[0] == pytest.approx(owa(capacity_to_owa(ps), f))


class TestBeliefDecompose:
    def test_not_belief(self, counter_mu):
        with pytest.raises(NotBelief):
            belief_decompose(compress(counter_mu), COUNTER_SCORES)

    @pytest.mark.parametrize("sizes", [(2, 2), (1, 2, 2)])
    def test_residual_is_choquet_of_star(self, rng, sizes):
        ps = random_belief_psym(sizes, rng)
        f = rng.random(ps.n)
        res = belief_decompose(ps, f)
        star = res.residual_measure
        assert res.residual == pytest.approx(oracles.choquet_sorted_sum(star.values, list(f)), abs=1e-12)
        assert res.residual == pytest.approx(decompose(ps, f).residual, abs=1e-12)
        assert res.degree == pytest.approx(interaction_degree(ps))
        assert res.degree > 0

    def test_star_values(self, rng):
        ps = random_belief_psym((2, 1), rng, rational=True)
        star = star_matrix(ps)
        mu = ps.matrix
        assert star[1, 1] == mu[1, 1] - mu[1, 0] - mu[0, 1]
        assert star[0, 2] == 0 and star[1, 0] == 0

    def test_exact(self, rng):
        ps = random_belief_psym((2, 2), rng, rational=True)
        f = [Fraction(k, 5) for k in (1, 4, 2, 3)]
        res = belief_decompose(ps, f)
        assert res.identity_gap == 0
        assert isinstance(res.residual, Fraction)


class TestDegree:
    def test_lower_envelope_zero(self):
        part = Partition.from_indices(3, [[0, 1], [2]])
        ps = compress(lower_envelope(part, [0.4, 0.6]), part)
        assert interaction_degree(ps) == pytest.approx(0)
        assert vanishing_degree_check(ps)
        assert decompose(ps, [0.2, 0.9, 0.5]).residual == pytest.approx(0)

    def test_diagnostic_for_non_belief(self, counter_mu):
        ps = compress(counter_mu)
        with pytest.raises(NotBelief):
            interaction_degree(ps)
        assert interaction_degree(ps, diagnostic=True) == pytest.approx(0)

    def test_positive(self, rng):
        ps = random_belief_psym((2, 3), rng)
        assert interaction_degree(ps) > 0
        assert not vanishing_degree_check(ps)

    @pytest.mark.parametrize("seed", range(4))
    def test_vanishing(self, seed):
        ps = random_belief_psym((2, 1, 3), np.random.default_rng(seed), cross_mass=False)
        assert interaction_degree(ps) == pytest.approx(0, abs=1e-12)
        assert vanishing_degree_check(ps, trials=20, seed=seed)

    def test_vanishing_compressed_route(self, rng):
        ps = random_belief_psym((9, 9), rng, cross_mass=False)
        assert vanishing_degree_check(ps, trials=5)
