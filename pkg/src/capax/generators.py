"""Random capacities for test batteries and benchmarks."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from capax.capacity import (
    Capacity,
    MobiusRepr,
    SetFunction,
    mobius_from_capacity,
    validate_capacity,
)
from capax.psym import PSymmetricCapacity, _binom_weights, block_only_mask, zeta_matrix
from capax.setcore import GroundSet, Partition, popcounts


def _draw(rng: np.random.Generator, size: int, rational: bool):
    if rational:
        return [Fraction(int(k), 97) for k in rng.integers(0, 97, size)]
    return rng.random(size)


def random_capacity(n: int, rng: np.random.Generator, rational: bool = False) -> Capacity:
    """Monotone by construction: each set exceeds its largest lower cover by a
    random increment, then everything is scaled so mu(X) = 1."""
    counts = popcounts(n)
    idx = np.arange(1 << n)
    # rational draws are k/97, so integer numerators carry the exact values
    vals = np.zeros(1 << n, dtype=np.int64 if rational else np.float64)
    for k in range(1, n + 1):
        level = idx[counts == k]
        lower = None
        for i in range(n):
            has = (level >> i) & 1 == 1
            cand = np.where(has, vals[level & ~(1 << i)], 0)
            lower = cand if lower is None else np.maximum(lower, cand)
        inc = rng.integers(0, 97, level.size) if rational else rng.random(level.size)
        vals[level] = lower + inc
    top = vals[-1]
    if top == 0:
        vals[-1] = top = 1
    if rational:
        out = np.empty(1 << n, dtype=object)
        out[:] = [Fraction(int(v), int(top)) for v in vals]
    else:
        out = vals / top
    return validate_capacity(SetFunction._make(GroundSet.of_size(n), out))


def random_mobius(n: int, rng: np.random.Generator, rational: bool = False) -> MobiusRepr:
    """Moebius transform of a random capacity."""
    return mobius_from_capacity(random_capacity(n, rng, rational))


def random_psym_matrix(sizes, rng: np.random.Generator, rational: bool = False) -> np.ndarray:
    """Axis-monotone matrix with 0 at the origin and 1 at the top."""
    ext = tuple(s + 1 for s in sizes)
    m = np.zeros(ext, dtype=object if rational else np.float64)
    if rational:
        m[...] = Fraction(0)
    for comp in np.ndindex(*ext):
        if not any(comp):
            continue
        lower = max(m[comp[:k] + (comp[k] - 1,) + comp[k + 1 :]] for k in range(len(ext)) if comp[k])
        m[comp] = lower + _draw(rng, 1, rational)[0] + (Fraction(1, 97) if rational else 1e-3)
    return m / m[tuple(sizes)]


def random_psym(sizes, rng: np.random.Generator, rational: bool = False) -> PSymmetricCapacity:
    partition = Partition.from_sizes(sizes)
    return PSymmetricCapacity(partition, random_psym_matrix(partition.sizes, rng, rational), "capacity")


def random_symmetric(n: int, rng: np.random.Generator, rational: bool = False) -> PSymmetricCapacity:
    return random_psym((n,), rng, rational)


def random_belief_psym(
    sizes,
    rng: np.random.Generator,
    *,
    cross_mass: bool = True,
    rational: bool = False,
) -> PSymmetricCapacity:
    """Nonnegative Moebius mass per composition, normalised to total 1.

    With ``cross_mass=False`` only subsets inside a single block carry mass,
    so the interaction degree is zero.
    """
    partition = Partition.from_sizes(sizes)
    ext = partition.extents
    size = math.prod(ext)
    m = np.asarray(_draw(rng, size, rational), dtype=object if rational else np.float64).reshape(ext)
    m[(0,) * len(ext)] = 0
    if not cross_mass:
        m[~block_only_mask(ext)] = 0
    # every block needs positive mass
    for k in range(len(ext)):
        idx = [0] * len(ext)
        idx[k] = 1
        m[tuple(idx)] += Fraction(1, 97) if rational else 1e-3
    total = (m * _binom_weights(ext)).sum()
    m = m / total
    if not rational:
        m = m.astype(np.float64)
    return PSymmetricCapacity(partition, zeta_matrix(m), "capacity")


def random_scores(n: int, rng: np.random.Generator, ties: bool = False) -> np.ndarray:
    if ties:
        return rng.integers(0, 4, n) / 3.0
    return rng.random(n)
