"""p-symmetric capacities stored as a p-dimensional matrix over composition vectors.

If A_1..A_p are sets of indifference, the value of a subset depends only on
how many of its elements fall in each block, so the measure is a matrix with
extents ``(|A_1|+1, ..., |A_p|+1)``. The same layout holds Moebius and
interaction coefficients. Flattening is row-major with the last block fastest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from capax.capacity import (
    Capacity,
    SetFunction,
    are_indifferent,
    as_array,
    indifference_witness,
    is_rational,
    validate_capacity,
)
from capax.config import COMPRESSED_GUARD, get_tolerance
from capax.errors import (
    GuardExceeded,
    InvariantViolation,
    NotIndifferent,
    PartitionError,
)
from capax.setcore import GroundSet, Partition, bernoulli, flat_composition_index

KINDS = ("capacity", "mobius", "interaction")


def _binom_weights(extents) -> np.ndarray:
    """Number of subsets per composition: prod_k C(|A_k|, c_k)."""
    w = np.ones(tuple(extents), dtype=object)
    for k, e in enumerate(extents):
        shape = [1] * len(extents)
        shape[k] = e
        col = np.array([math.comb(e - 1, c) for c in range(e)], dtype=object).reshape(shape)
        w = w * col
    return w


@dataclass(frozen=True, eq=False)
class PSymmetricCapacity:
    """Compressed measure in one of three representations (``kind``).

    ``matrix[c_1, ..., c_p]`` is the common value of every subset with that
    composition. ``coarsest_p`` is filled in by :func:`compress` when the
    supplied partition turned out finer than necessary.
    """

    partition: Partition
    matrix: np.ndarray
    kind: str = "capacity"
    ground: GroundSet | None = None
    coarsest_p: int | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        ext = self.partition.extents
        if math.prod(ext) > COMPRESSED_GUARD:
            raise GuardExceeded(f"compressed matrix of {math.prod(ext)} entries exceeds {COMPRESSED_GUARD}")
        if self.ground is None:
            object.__setattr__(self, "ground", GroundSet.of_size(self.partition.n))
        elif self.ground.n != self.partition.n:
            raise PartitionError("ground set and partition sizes differ")
        raw = self.matrix
        arr = as_array(np.asarray(raw, dtype=object).ravel() if not isinstance(raw, np.ndarray) else raw.ravel())
        if arr.size != math.prod(ext):
            raise ValueError(f"matrix has {arr.size} entries, extents {ext} need {math.prod(ext)}")
        arr = arr.reshape(ext)
        arr.flags.writeable = False
        object.__setattr__(self, "matrix", arr)
        self._check(get_tolerance())

    def _check(self, tol: float) -> None:
        m = self.matrix
        origin = (0,) * self.p
        if self.kind == "capacity":
            if abs(m[origin]) > tol:
                raise InvariantViolation(f"value at the origin is {m[origin]}, expected 0")
            if abs(m[self.top] - 1) > tol:
                raise InvariantViolation(f"value at the top is {m[self.top]}, expected 1")
            for k in range(self.p):
                steps = np.diff(m, axis=k)
                bad = np.argwhere(steps < -tol)
                if bad.size:
                    at = tuple(int(x) for x in bad[0])
                    raise InvariantViolation(f"matrix decreases along block {k} at composition {at}")
        elif self.kind == "mobius":
            if abs(m[origin]) > tol:
                raise InvariantViolation(f"Moebius coefficient at the origin is {m[origin]}")
            total = (m * _binom_weights(self.extents)).sum()
            if abs(total - 1) > tol:
                raise InvariantViolation(f"weighted Moebius total is {total}, expected 1")

    @property
    def p(self) -> int:
        return self.partition.p

    @property
    def n(self) -> int:
        return self.partition.n

    @property
    def sizes(self) -> tuple[int, ...]:
        return self.partition.sizes

    @property
    def extents(self) -> tuple[int, ...]:
        return self.partition.extents

    @property
    def top(self) -> tuple[int, ...]:
        return self.sizes

    @property
    def rational(self) -> bool:
        return is_rational(self.matrix)

    def __getitem__(self, comp):
        return self.matrix[tuple(comp)]

    def block_measure(self, k: int):
        """Value at the composition of block k alone, i.e. mu(A_k)."""
        idx = [0] * self.p
        idx[k] = self.sizes[k]
        return self.matrix[tuple(idx)]

    def with_matrix(self, matrix: np.ndarray, kind: str) -> "PSymmetricCapacity":
        return PSymmetricCapacity(self.partition, matrix, kind, self.ground)

    def to_rational(self) -> "PSymmetricCapacity":
        arr = as_array(self.matrix.ravel(), rational=True).reshape(self.extents)
        return PSymmetricCapacity(self.partition, arr, self.kind, self.ground, self.coarsest_p)

    def allclose(self, other: "PSymmetricCapacity", tol: float | None = None) -> bool:
        if self.extents != other.extents:
            return False
        diff = np.abs((self.matrix - other.matrix).astype(np.float64))
        return bool(diff.max(initial=0.0) <= get_tolerance(tol))


def storage_count(partition: Partition) -> int:
    """Free values of a p-symmetric measure: prod(|A_i| + 1) - 2."""
    return math.prod(partition.extents) - 2


# -- partition detection ------------------------------------------------------


def coarsest_partition(mu: SetFunction, tol: float | None = None) -> Partition:
    """Coarsest partition of X into sets of indifference.

    Blocks are the classes of pairwise indifference. Each block is
    re-checked as a set of indifference; a failure there means the pairwise
    relation was not an equivalence under the tolerance, and is an error.
    """
    tol = get_tolerance(tol)
    n = mu.n
    assigned = [-1] * n
    blocks: list[int] = []
    for i in range(n):
        if assigned[i] >= 0:
            continue
        assigned[i] = len(blocks)
        block = 1 << i
        for j in range(i + 1, n):
            if assigned[j] < 0 and are_indifferent(mu, i, j, tol):
                assigned[j] = assigned[i]
                block |= 1 << j
        blocks.append(block)
    for b in blocks:
        witness = indifference_witness(mu, b, tol)
        if witness is not None:
            raise PartitionError(
                f"pairwise indifference classes are not sets of indifference (block {b:#b}, "
                f"witness {witness[0]:#b} vs {witness[1]:#b}); tolerance {tol} too loose?"
            )
    return Partition(n, tuple(blocks))


def compress(mu: SetFunction, partition: Partition | None = None, tol: float | None = None) -> PSymmetricCapacity:
    """Matrix representation of ``mu`` under ``partition`` (default: the coarsest)."""
    tol = get_tolerance(tol)
    coarsest = coarsest_partition(mu, tol)
    if partition is None:
        partition = coarsest
    if partition.n != mu.n:
        raise PartitionError("partition and measure sizes differ")
    for b in partition.blocks:
        witness = indifference_witness(mu, b, tol)
        if witness is not None:
            raise NotIndifferent(b, *witness)
    flat_idx = flat_composition_index(partition)
    size = math.prod(partition.extents)
    flat = np.empty(size, dtype=mu.values.dtype)
    flat[flat_idx] = mu.values
    # every subset of a composition class must agree with the stored entry
    if not np.all(np.abs(flat[flat_idx] - mu.values) <= tol):
        raise InvariantViolation("composition classes are not constant")
    return PSymmetricCapacity(
        partition,
        flat.reshape(partition.extents),
        "capacity",
        mu.ground,
        coarsest_p=coarsest.p if coarsest.p != partition.p else None,
    )


def dense_values(ps: PSymmetricCapacity) -> np.ndarray:
    """Length-2**n array of the stored representation, any kind."""
    ps.ground.check_dense()
    return ps.matrix.ravel()[flat_composition_index(ps.partition)].copy()


def expand(ps: PSymmetricCapacity) -> Capacity:
    """Dense capacity with ``mu(S) = M[composition(S)]``."""
    if ps.kind != "capacity":
        raise ValueError(f"expand needs a capacity-kind matrix, got {ps.kind!r}")
    try:
        return validate_capacity(SetFunction._make(ps.ground, dense_values(ps)))
    except ValueError as exc:
        raise InvariantViolation(str(exc)) from exc


# -- separable and graded transforms over composition space -------------------


def _along_axis(arr: np.ndarray, axis: int, mat: np.ndarray) -> np.ndarray:
    """Apply ``out[..., b, ...] = sum_c mat[b, c] arr[..., c, ...]`` on one axis."""
    moved = np.moveaxis(arr, axis, -1)
    out = moved @ mat.T
    return np.moveaxis(out, -1, axis)


def _axis_matrix(e: int, signed: bool, rational: bool) -> np.ndarray:
    mat = np.zeros((e, e), dtype=object)
    for b in range(e):
        for c in range(b + 1):
            coef = math.comb(b, c)
            mat[b, c] = -coef if signed and (b - c) % 2 else coef
    return mat if rational else mat.astype(np.float64)


def _binomial_lower(arr: np.ndarray, signed: bool) -> np.ndarray:
    rational = is_rational(arr)
    out = arr
    for k, e in enumerate(arr.shape):
        out = _along_axis(out, k, _axis_matrix(e, signed, rational))
    return out


def graded_superset_sum(arr: np.ndarray, sizes) -> np.ndarray:
    """``G[g, b] = sum over d >= 0 with sum(d) = g of prod_k C(a_k - b_k, d_k) arr[b + d]``.

    Counts every superset C of a subset with composition b, graded by
    ``|C - B|``.
    """
    n = sum(sizes)
    rational = is_rational(arr)
    zero = Fraction(0) if rational else 0.0
    g = np.empty((n + 1,) + arr.shape, dtype=arr.dtype)
    g[:] = zero
    g[0] = arr
    for k, a in enumerate(sizes):
        src = np.moveaxis(g, k + 1, -1)
        out = np.empty_like(src)
        out[:] = zero
        for d in range(a + 1):
            coef = np.array([math.comb(a - b, d) for b in range(a - d + 1)], dtype=object)
            if not rational:
                coef = coef.astype(np.float64)
            if d == 0:
                out[..., :] += src * coef
            else:
                out[d:, ..., : a - d + 1] += src[:-d, ..., d:] * coef
        g = np.moveaxis(out, -1, k + 1)
    return g


def _grade_weights(n: int, rational: bool, kind: str) -> np.ndarray:
    if kind == "shapley":
        ws = [Fraction(1, k + 1) for k in range(n + 1)]
    else:
        ws = [bernoulli(k) for k in range(n + 1)]
    w = np.empty(n + 1, dtype=object)
    w[:] = ws
    return w if rational else w.astype(np.float64)


def _graded_weighted(arr: np.ndarray, sizes, kind: str) -> np.ndarray:
    g = graded_superset_sum(arr, sizes)
    w = _grade_weights(sum(sizes), is_rational(arr), kind)
    return (g * w.reshape((-1,) + (1,) * arr.ndim)).sum(axis=0)


def _require(ps: PSymmetricCapacity, kind: str) -> None:
    if ps.kind != kind:
        raise ValueError(f"expected a {kind}-kind matrix, got {ps.kind!r}")


def mobius_matrix(mu_matrix: np.ndarray) -> np.ndarray:
    """``m(b) = sum_{i<=b} (-1)^{|b|-|i|} prod C(b_k, i_k) mu(i)`` on a raw matrix."""
    return _binomial_lower(mu_matrix, signed=True)


def zeta_matrix(m_matrix: np.ndarray) -> np.ndarray:
    """``mu(b) = sum_{c<=b} prod C(b_k, c_k) m(c)`` on a raw matrix."""
    return _binomial_lower(m_matrix, signed=False)


def psym_mobius(ps: PSymmetricCapacity) -> PSymmetricCapacity:
    _require(ps, "capacity")
    return ps.with_matrix(mobius_matrix(ps.matrix), "mobius")


def psym_capacity_from_mobius(pm: PSymmetricCapacity) -> PSymmetricCapacity:
    _require(pm, "mobius")
    return pm.with_matrix(zeta_matrix(pm.matrix), "capacity")


def psym_interaction_from_mobius(pm: PSymmetricCapacity) -> PSymmetricCapacity:
    """``I(b) = sum_{c>=b} prod C(a_k-b_k, c_k-b_k) m(c) / (|c|-|b|+1)``."""
    _require(pm, "mobius")
    return pm.with_matrix(_graded_weighted(pm.matrix, pm.sizes, "shapley"), "interaction")


def psym_mobius_from_interaction(pi: PSymmetricCapacity) -> PSymmetricCapacity:
    """``m(b) = sum_{c<=a-b} prod C(a_k-b_k, c_k) B_{|c|} I(b+c)``."""
    _require(pi, "interaction")
    return pi.with_matrix(_graded_weighted(pi.matrix, pi.sizes, "bernoulli"), "mobius")


def psym_interaction_from_capacity(ps: PSymmetricCapacity) -> PSymmetricCapacity:
    return psym_interaction_from_mobius(psym_mobius(ps))


def psym_capacity_from_interaction(pi: PSymmetricCapacity) -> PSymmetricCapacity:
    return psym_capacity_from_mobius(psym_mobius_from_interaction(pi))


def convert(ps: PSymmetricCapacity, target: str) -> PSymmetricCapacity:
    """Change representation between capacity, mobius and interaction."""
    if target not in KINDS:
        raise ValueError(f"unknown representation {target!r}")
    if ps.kind == target:
        return ps
    routes = {
        ("capacity", "mobius"): psym_mobius,
        ("mobius", "capacity"): psym_capacity_from_mobius,
        ("mobius", "interaction"): psym_interaction_from_mobius,
        ("interaction", "mobius"): psym_mobius_from_interaction,
        ("capacity", "interaction"): psym_interaction_from_capacity,
        ("interaction", "capacity"): psym_capacity_from_interaction,
    }
    return routes[(ps.kind, target)](ps)


def dual_psym(ps: PSymmetricCapacity) -> PSymmetricCapacity:
    """Dual on the same partition: ``1 - M[a - i]``."""
    _require(ps, "capacity")
    one = Fraction(1) if ps.rational else 1.0
    flipped = ps.matrix[(slice(None, None, -1),) * ps.p]
    return ps.with_matrix(one - flipped, "capacity")


def is_belief_psym(ps: PSymmetricCapacity, tol: float | None = None) -> bool:
    """Nonnegative Moebius coefficients, checked without densifying."""
    m = psym_mobius(ps).matrix if ps.kind == "capacity" else convert(ps, "mobius").matrix
    return bool(np.all(m >= -get_tolerance(tol)))


def block_only_mask(extents) -> np.ndarray:
    """True at compositions touching at most one block (subsets inside some A_j)."""
    grids = np.indices(tuple(extents))
    return (grids > 0).sum(axis=0) <= 1


def is_interadditive_psym(ps: PSymmetricCapacity, tol: float | None = None) -> bool:
    """``mu(c) == sum_k mu(c_k e_k)`` at every composition."""
    _require(ps, "capacity")
    m = ps.matrix
    total = np.zeros_like(m)
    total[...] = Fraction(0) if ps.rational else 0.0
    for k in range(ps.p):
        idx = [0] * ps.p
        idx[k] = slice(None)
        line = m[tuple(idx)]
        shape = [1] * ps.p
        shape[k] = -1
        total = total + line.reshape(shape)
    return bool(np.all(np.abs(total - m) <= get_tolerance(tol)))
