"""Ground sets, subset bitmasks, partitions and the combinatorics around them.

Subsets are plain ``int`` bitmasks: bit ``i`` set means ``labels[i]`` is a
member. Dense arrays of set-function values are indexed by that integer.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from capax.config import DENSE_MAX_N, ENUMERATION_GUARD
from capax.errors import GuardExceeded, PartitionError


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def members(mask: int) -> list[int]:
    """Element indices contained in ``mask``, ascending."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def popcounts(n: int) -> np.ndarray:
    """Cardinality of every subset mask ``0 .. 2**n - 1``."""
    counts = np.zeros(1 << n, dtype=np.int64)
    for i in range(n):
        counts[1 << i : 1 << (i + 1)] = counts[: 1 << i] + 1
    return counts


@dataclass(frozen=True)
class GroundSet:
    labels: tuple[str, ...]

    def __post_init__(self):
        labels = tuple(str(x) for x in self.labels)
        object.__setattr__(self, "labels", labels)
        if not labels:
            raise ValueError("ground set needs at least one element")
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate labels in {labels}")

    @classmethod
    def of_size(cls, n: int) -> "GroundSet":
        return cls(tuple(f"x{i + 1}" for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown label {label!r}") from None

    def mask(self, labels: Iterable[str]) -> int:
        return mask_of(self.index(lab) for lab in labels)

    def names(self, mask: int) -> list[str]:
        return [self.labels[i] for i in members(mask)]

    def check_dense(self) -> None:
        if self.n > DENSE_MAX_N:
            raise GuardExceeded(f"dense representation limited to n <= {DENSE_MAX_N}, got {self.n}")


def _canonical_key(block: int) -> tuple[int, int]:
    return (popcount(block), (block & -block).bit_length())


@dataclass(frozen=True)
class Partition:
    """Ordered blocks A_1..A_p covering ``{0..n-1}``.

    Blocks are always kept in canonical order: ascending size, ties broken
    by the smallest member index.
    """

    n: int
    blocks: tuple[int, ...]

    def __post_init__(self):
        blocks = tuple(sorted((int(b) for b in self.blocks), key=_canonical_key))
        object.__setattr__(self, "blocks", blocks)
        if self.n < 1:
            raise PartitionError("partition of an empty ground set")
        seen = 0
        for b in blocks:
            if b == 0:
                raise PartitionError("empty block")
            if b & seen:
                raise PartitionError(f"blocks overlap on {members(b & seen)}")
            seen |= b
        if seen != (1 << self.n) - 1:
            raise PartitionError(
                f"blocks do not cover the ground set (missing {members(((1 << self.n) - 1) & ~seen)})"
            )

    @classmethod
    def from_indices(cls, n: int, blocks: Iterable[Iterable[int]]) -> "Partition":
        return cls(n, tuple(mask_of(b) for b in blocks))

    @classmethod
    def from_labels(cls, ground: GroundSet, blocks: Iterable[Iterable[str]]) -> "Partition":
        return cls(ground.n, tuple(ground.mask(b) for b in blocks))

    @classmethod
    def from_sizes(cls, sizes: Sequence[int]) -> "Partition":
        """Contiguous blocks of the given sizes: ``(2, 3)`` -> {0,1}, {2,3,4}."""
        blocks, start = [], 0
        for s in sizes:
            if s < 1:
                raise PartitionError(f"block sizes must be positive, got {list(sizes)}")
            blocks.append(((1 << s) - 1) << start)
            start += s
        return cls(start, tuple(blocks))

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls(n, tuple(1 << i for i in range(n)))

    @property
    def p(self) -> int:
        return len(self.blocks)

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(popcount(b) for b in self.blocks)

    @property
    def extents(self) -> tuple[int, ...]:
        return tuple(s + 1 for s in self.sizes)

    def block_of(self) -> list[int]:
        """``block_of()[i]`` is the block index holding element ``i``."""
        out = [0] * self.n
        for k, b in enumerate(self.blocks):
            for i in members(b):
                out[i] = k
        return out

    def labels(self, ground: GroundSet) -> list[list[str]]:
        return [ground.names(b) for b in self.blocks]


def composition_of(subset: int, partition: Partition) -> tuple[int, ...]:
    """Number of elements of ``subset`` in each block."""
    if subset >> partition.n:
        raise ValueError(f"subset {subset:#b} outside a ground set of size {partition.n}")
    return tuple(popcount(subset & b) for b in partition.blocks)


def composition_table(partition: Partition) -> np.ndarray:
    """Row ``S`` holds ``composition_of(S, partition)`` for every mask ``S``."""
    n = partition.n
    table = np.zeros((1 << n, partition.p), dtype=np.int64)
    block_of = partition.block_of()
    for i in range(n):
        half = 1 << i
        table[half : 2 * half] = table[:half]
        table[half : 2 * half, block_of[i]] += 1
    return table


def flat_composition_index(partition: Partition) -> np.ndarray:
    """Row-major flat matrix index for every subset mask (last block fastest)."""
    table = composition_table(partition)
    return np.ravel_multi_index(tuple(table.T), partition.extents)


def all_compositions(extents: Sequence[int]):
    return itertools.product(*(range(e) for e in extents))


@lru_cache(maxsize=None)
def bernoulli(k: int) -> Fraction:
    """Exact Bernoulli number B_k from the recurrence
    ``B_0 = 1``, ``B_k = -sum_{l<k} C(k, l) B_l / (k - l + 1)``.

    This convention gives ``B_1 = -1/2``.
    """
    if k < 0:
        raise ValueError("Bernoulli index must be nonnegative")
    if k == 0:
        return Fraction(1)
    total = Fraction(0)
    for l in range(k):
        total += Fraction(math.comb(k, l), k - l + 1) * bernoulli(l)
    return -total


def bernoulli_table(kmax: int) -> list[Fraction]:
    return [bernoulli(k) for k in range(kmax + 1)]


def path_count(partition: Partition) -> int:
    """Multinomial n! / prod |A_i|! : monotone lattice paths from 0 to the top composition."""
    total = math.factorial(partition.n)
    for s in partition.sizes:
        total //= math.factorial(s)
    return total


def enumerate_paths(partition: Partition, guard: int = ENUMERATION_GUARD) -> list[list[tuple[int, ...]]]:
    """All maximal chains of composition vectors from the origin to the top.

    Each step raises exactly one coordinate by one.
    """
    count = path_count(partition)
    if count > guard:
        raise GuardExceeded(f"{count} paths exceed the enumeration guard {guard}")
    sizes = partition.sizes
    origin = (0,) * len(sizes)
    paths: list[list[tuple[int, ...]]] = []
    stack = [[origin]]
    while stack:
        path = stack.pop()
        last = path[-1]
        if last == sizes:
            paths.append(path)
            continue
        for k in reversed(range(len(sizes))):
            if last[k] < sizes[k]:
                nxt = last[:k] + (last[k] + 1,) + last[k + 1 :]
                stack.append(path + [nxt])
    return paths
