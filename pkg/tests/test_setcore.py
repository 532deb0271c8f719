import itertools
import math
from fractions import Fraction

import pytest

from capax.errors import GuardExceeded, PartitionError
from capax.setcore import (
    GroundSet,
    Partition,
    bernoulli,
    bernoulli_table,
    composition_of,
    composition_table,
    enumerate_paths,
    path_count,
)


def bernoulli_by_series(kmax):
    """Coefficients of x / (e^x - 1) by exact power-series inversion."""
    # denominator series (e^x - 1)/x = sum x^k / (k+1)!
    d = [Fraction(1, math.factorial(k + 1)) for k in range(kmax + 1)]
    inv = [Fraction(0)] * (kmax + 1)
    inv[0] = 1 / d[0]
    for k in range(1, kmax + 1):
        inv[k] = -sum(d[j] * inv[k - j] for j in range(1, k + 1)) / d[0]
    return [inv[k] * math.factorial(k) for k in range(kmax + 1)]


def shapes_up_to(n):
    """All block-size multisets (integer partitions) of n, as tuples."""
    def parts(m, largest):
        if m == 0:
            yield ()
            return
        for first in range(min(m, largest), 0, -1):
            for rest in parts(m - first, first):
                yield (first,) + rest
    return list(parts(n, n))


class TestGroundSet:
    def test_duplicate_labels_rejected(self):
        with pytest.raises(ValueError):
            GroundSet(("a", "a"))

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            GroundSet(())

    def test_masks_and_names(self):
        g = GroundSet(("M1", "M2", "P1", "P2"))
        assert g.mask(["M1", "P2"]) == 0b1001
        assert g.names(0b0110) == ["M2", "P1"]


class TestPartition:
    def test_canonical_order(self):
        p = Partition.from_indices(5, [[2, 3, 4], [0], [1]])
        assert p.blocks == (0b1, 0b10, 0b11100)
        same = Partition.from_indices(5, [[1], [4, 3, 2], [0]])
        assert p == same

    @pytest.mark.parametrize("blocks", [[[0], [0, 1]], [[0]], [[0, 1], []]])
    def test_invalid(self, blocks):
        with pytest.raises(PartitionError):
            Partition.from_indices(2, blocks)


class TestComposition:
    def test_empty_set(self):
        assert composition_of(0, Partition.from_sizes((2, 2))) == (0, 0)

    def test_full_set(self):
        assert composition_of(0b1111, Partition.from_sizes((2, 2))) == (2, 2)

    def test_jury_pair(self):
        g = GroundSet(("M1", "M2", "P1", "P2"))
        part = Partition.from_labels(g, [["M1", "M2"], ["P1", "P2"]])
        assert composition_of(g.mask(["M1", "P2"]), part) == (1, 1)

    @pytest.mark.parametrize("sizes", [(1, 2, 3), (4, 4), (2, 2, 2, 2), (12,), (5, 7)])
    def test_counts_per_composition(self, sizes):
        part = Partition.from_sizes(sizes)
        table = composition_table(part)
        assert (table.sum(axis=1) == [bin(s).count("1") for s in range(1 << part.n)]).all()
        counts = {}
        for row in map(tuple, table):
            counts[row] = counts.get(row, 0) + 1
        expected = {c: math.prod(math.comb(a, k) for a, k in zip(sizes, c))
                    for c in itertools.product(*(range(a + 1) for a in sizes))}
        assert counts == expected


class TestBernoulli:
    def test_base(self):
        assert bernoulli(0) == 1

    def test_first(self):
        assert bernoulli(1) == Fraction(-1, 2)

    def test_third(self):
        assert bernoulli(3) == 0

    def test_against_generating_function(self):
        assert bernoulli_table(24) == bernoulli_by_series(24)

    def test_odd_vanish(self):
        assert all(bernoulli(k) == 0 for k in range(3, 25, 2))

    def test_exact_type(self):
        assert all(isinstance(b, Fraction) for b in bernoulli_table(10))


class TestPaths:
    def test_three_three(self):
        assert path_count(Partition.from_sizes((3, 3))) == 20

    def test_single_block(self):
        assert path_count(Partition.from_sizes((7,))) == 1

    def test_one_four(self):
        part = Partition.from_sizes((1, 4))
        assert path_count(part) == 5
        assert len(enumerate_paths(part)) == 5

    def test_small_enumerations(self):
        assert len(enumerate_paths(Partition.from_sizes((1, 1)))) == 2
        assert enumerate_paths(Partition.from_sizes((2,))) == [[(0,), (1,), (2,)]]
        assert len(enumerate_paths(Partition.from_sizes((1, 2)))) == 3

    def test_paths_are_unit_steps(self):
        part = Partition.from_sizes((2, 1, 2))
        for path in enumerate_paths(part):
            assert path[0] == (0, 0, 0) and path[-1] == part.sizes
            for a, b in zip(path, path[1:]):
                diff = [y - x for x, y in zip(a, b)]
                assert sorted(diff) == [0, 0, 1]

    @pytest.mark.parametrize("n", range(1, 9))
    def test_count_matches_distinct_orderings(self, n):
        # independent oracle: distinct orderings of the multiset of block tags
        for shape in shapes_up_to(n):
            tags = [k for k, s in enumerate(shape) for _ in range(s)]
            distinct = len(set(itertools.permutations(tags)))
            assert path_count(Partition.from_sizes(shape)) == distinct

    def test_guard(self):
        with pytest.raises(GuardExceeded):
            enumerate_paths(Partition.from_sizes((5, 5, 5)), guard=1000)
