"""Choquet integral against dense, Moebius and compressed capacities, OWA
operators, and the block decomposition of the integral over a partition."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from capax.capacity import (
    MobiusRepr,
    SetFunction,
    is_interadditive,
    is_rational,
    is_set_of_indifference,
)
from capax.config import get_tolerance
from capax.errors import (
    InvariantViolation,
    NegativeScore,
    NotBelief,
    NotSymmetric,
    ScoreOutOfRange,
    ZeroBlockMeasure,
)
from capax.psym import (
    PSymmetricCapacity,
    block_only_mask,
    expand,
    is_belief_psym,
    is_interadditive_psym,
    mobius_matrix,
    zeta_matrix,
)
from capax.setcore import GroundSet, Partition, flat_composition_index


def _scores(f, n: int, *, unit: bool = False) -> list:
    vals = list(f.tolist() if isinstance(f, np.ndarray) else f)
    if len(vals) != n:
        raise ValueError(f"expected {n} scores, got {len(vals)}")
    if any(v < 0 for v in vals):
        raise NegativeScore(f"scores must be nonnegative: {vals}")
    if unit and any(v > 1 for v in vals):
        raise ScoreOutOfRange(f"Moebius-form integral needs scores in [0, 1]: {vals}")
    return vals


def _ascending(f: Sequence) -> list[int]:
    """Ascending order of scores; ties broken by element index."""
    return sorted(range(len(f)), key=lambda i: (f[i], i))


def choquet(mu: SetFunction, f, tol: float | None = None):
    """Discrete Choquet integral of nonnegative scores ``f``.

    Both sorted-sum expressions are evaluated; they must agree.
    """
    f = _scores(f, mu.n)
    v = mu.values
    order = _ascending(f)
    n = len(order)
    upper = [0] * (n + 1)  # upper[i] = {x_(i+1), ..., x_(n)} in 0-based positions
    for pos in range(n - 1, -1, -1):
        upper[pos] = upper[pos + 1] | (1 << order[pos])
    by_level = 0
    by_jump = 0
    prev = 0
    for pos, i in enumerate(order):
        by_level += (f[i] - prev) * v[upper[pos]]
        by_jump += f[i] * (v[upper[pos]] - v[upper[pos + 1]])
        prev = f[i]
    if abs(by_level - by_jump) > get_tolerance(tol):
        raise InvariantViolation(f"Choquet expressions disagree: {by_level} vs {by_jump}")
    return by_level


def subset_minima(f: Sequence, rational: bool = False) -> np.ndarray:
    """``out[T] = min_{i in T} f[i]``; ``out[0]`` is +inf."""
    n = len(f)
    out = np.empty(1 << n, dtype=object if rational else np.float64)
    out[0] = float("inf")
    for i in range(n):
        half = 1 << i
        out[half : 2 * half] = np.minimum(out[:half], f[i])
    return out


def choquet_mobius(m: MobiusRepr, f, *, check_range: bool = True):
    """``sum_T m(T) min_{i in T} f_i``.

    The identity is stated for scores in [0, 1]; ``check_range=False``
    skips that guard (it extends by homogeneity to any nonnegative scores).
    """
    f = _scores(f, m.n, unit=check_range)
    rational = is_rational(m.coeffs)
    mins = subset_minima(f, rational)
    return (m.coeffs[1:] * mins[1:]).sum()


# -- compressed integration ---------------------------------------------------


def increment_tables(m_matrix: np.ndarray) -> np.ndarray:
    """``D[j][b] = sum_{c<=b} m(c + e_j) prod_k C(b_k, c_k)``.

    This is the gain ``mu(B + x) - mu(B)`` for any x in block j added to a
    subset B of composition b. Entries with ``b_j = |A_j|`` are zero padding.
    """
    p = m_matrix.ndim
    tables = np.zeros((p,) + m_matrix.shape, dtype=m_matrix.dtype)
    if is_rational(m_matrix):
        tables[...] = Fraction(0)
    for j in range(p):
        shifted = np.take(m_matrix, range(1, m_matrix.shape[j]), axis=j)
        idx = [j] + [slice(None)] * p
        idx[1 + j] = slice(0, m_matrix.shape[j] - 1)
        tables[tuple(idx)] = zeta_matrix(shifted)
    return tables


def _integrate(tables: np.ndarray, partition: Partition, f: list):
    """Walk elements from largest to smallest score, tracking the composition
    of the strict upper set."""
    block_of = partition.block_of()
    order = _ascending(f)
    b = [0] * partition.p
    total = 0
    for i in reversed(order):
        j = block_of[i]
        total += f[i] * tables[(j, *b)]
        b[j] += 1
    return total


def choquet_psym(ps: PSymmetricCapacity, f):
    """Choquet integral straight from the compressed matrix (no 2**n array)."""
    if ps.kind != "capacity":
        raise ValueError(f"expected a capacity-kind matrix, got {ps.kind!r}")
    f = _scores(f, ps.n)
    return _integrate(increment_tables(mobius_matrix(ps.matrix)), ps.partition, f)


def choquet_psym_batch(ps: PSymmetricCapacity, scores: np.ndarray) -> np.ndarray:
    """Vectorised :func:`choquet_psym` over the rows of ``scores`` (float only)."""
    scores = np.asarray(scores, dtype=np.float64)
    if scores.ndim != 2 or scores.shape[1] != ps.n:
        raise ValueError(f"scores must have shape (k, {ps.n})")
    if (scores < 0).any():
        raise NegativeScore("scores must be nonnegative")
    tables = increment_tables(mobius_matrix(ps.matrix.astype(np.float64)))
    block_of = np.asarray(ps.partition.block_of())
    order = np.argsort(scores, axis=1, kind="stable")
    blocks = block_of[order]  # (k, n) block id of each sorted position
    onehot = np.zeros(blocks.shape + (ps.p,), dtype=np.int64)
    np.put_along_axis(onehot, blocks[..., None], 1, axis=2)
    # composition of elements strictly above each position
    above = np.cumsum(onehot[:, ::-1, :], axis=1)[:, ::-1, :] - onehot
    idx = (blocks,) + tuple(above[..., k] for k in range(ps.p))
    gains = tables[idx]
    return (np.take_along_axis(scores, order, axis=1) * gains).sum(axis=1)


# -- OWA ---------------------------------------------------------------------


def _check_weights(w, tol: float | None = None) -> list:
    w = list(w.tolist() if isinstance(w, np.ndarray) else w)
    tol = get_tolerance(tol)
    if any(x < -tol or x > 1 + tol for x in w):
        raise ValueError(f"OWA weights must lie in [0, 1]: {w}")
    if abs(sum(w) - 1) > tol:
        raise ValueError(f"OWA weights must sum to 1, got {sum(w)}")
    return w


def owa(w, f):
    """``sum_i w_i f_(i)`` with scores sorted ascending (w_1 weights the minimum)."""
    w = _check_weights(w)
    f = list(f.tolist() if isinstance(f, np.ndarray) else f)
    if len(w) != len(f):
        raise ValueError("weights and scores differ in length")
    return sum(wi * fi for wi, fi in zip(w, sorted(f)))


def owa_to_capacity(w, ground: GroundSet | None = None) -> PSymmetricCapacity:
    """Symmetric capacity with ``v(k) = w_{n-k+1} + ... + w_n``."""
    w = _check_weights(w)
    n = len(w)
    zero = Fraction(0) if any(isinstance(x, Fraction) for x in w) else 0.0
    v = [zero]
    for k in range(1, n + 1):
        v.append(v[-1] + w[n - k])
    return PSymmetricCapacity(Partition(n, ((1 << n) - 1,)), v, "capacity", ground)


def symmetric_profile(mu) -> list:
    """Values ``v(0..n)`` of a symmetric capacity by cardinality."""
    if isinstance(mu, PSymmetricCapacity):
        if mu.kind != "capacity":
            raise ValueError("expected a capacity-kind matrix")
        if mu.p == 1:
            return list(mu.matrix.tolist())
        # a finer partition may still describe a symmetric measure
        mu = expand(mu)
    if not is_set_of_indifference(mu, mu.ground.full):
        raise NotSymmetric("capacity is not symmetric (X is not a set of indifference)")
    return [mu.values[(1 << k) - 1] for k in range(mu.n + 1)]


def capacity_to_owa(mu) -> list:
    """OWA weights ``w_i = v(n-i+1) - v(n-i)`` of a symmetric capacity."""
    v = symmetric_profile(mu)
    n = len(v) - 1
    return [v[n - i + 1] - v[n - i] for i in range(1, n + 1)]


# -- decomposition over the partition ----------------------------------------


@dataclass(frozen=True, eq=False)
class DecompositionResult:
    """``total = sum(block_terms) + residual``.

    ``block_measures[i]`` is the normalised capacity on block i (a one-block
    compressed capacity). ``residual_matrix`` holds mu* by composition when
    the belief route produced it.
    """

    block_terms: list
    residual: object
    total: object
    block_masses: list
    block_measures: list
    degree: object = None
    residual_matrix: np.ndarray | None = field(default=None, repr=False)
    partition: Partition | None = field(default=None, repr=False)
    ground: GroundSet | None = field(default=None, repr=False)

    @property
    def identity_gap(self) -> float:
        return float(abs(self.total - (sum(self.block_terms) + self.residual)))

    @property
    def residual_measure(self) -> SetFunction | None:
        """mu* as a dense set function (only for grounds within the dense cap)."""
        if self.residual_matrix is None:
            return None
        self.ground.check_dense()
        vals = self.residual_matrix.ravel()[flat_composition_index(self.partition)]
        return SetFunction(self.ground, vals)


def _block_masses(ps: PSymmetricCapacity, tol: float) -> list:
    masses = [ps.block_measure(k) for k in range(ps.p)]
    for k, mass in enumerate(masses):
        if mass <= tol:
            raise ZeroBlockMeasure(k, ps.ground.names(ps.partition.blocks[k]))
    return masses


def _block_capacity(ps: PSymmetricCapacity, m: np.ndarray, k: int, mass) -> PSymmetricCapacity:
    """Normalised measure on block k: Moebius mass m(C)/mu(A_k) for C inside A_k."""
    idx = [0] * ps.p
    idx[k] = slice(None)
    line = m[tuple(idx)] / mass
    v = zeta_matrix(line)
    size = ps.sizes[k]
    sub_ground = GroundSet(tuple(ps.ground.names(ps.partition.blocks[k])))
    return PSymmetricCapacity(Partition(size, ((1 << size) - 1,)), v, "capacity", sub_ground)


def decompose(ps: PSymmetricCapacity, f, tol: float | None = None) -> DecompositionResult:
    """Split the integral into per-block OWA terms plus the cross-block residual.

    The residual is the Moebius sum over subsets meeting two or more blocks,
    computed directly (never as a difference), so the identity with the
    total is a real check.
    """
    if ps.kind != "capacity":
        raise ValueError(f"expected a capacity-kind matrix, got {ps.kind!r}")
    tol = get_tolerance(tol)
    f = _scores(f, ps.n)
    masses = _block_masses(ps, tol)
    m = mobius_matrix(ps.matrix)

    measures, terms = [], []
    for k, block in enumerate(ps.partition.blocks):
        sub = _block_capacity(ps, m, k, masses[k])
        weights = capacity_to_owa(sub)
        local = [f[i] for i in range(ps.n) if block >> i & 1]
        measures.append(sub)
        terms.append(masses[k] * owa(weights, local))

    cross = m.copy()
    cross[block_only_mask(ps.extents)] = Fraction(0) if ps.rational else 0.0
    residual = _integrate(increment_tables(cross), ps.partition, f)
    total = choquet_psym(ps, f)
    result = DecompositionResult(terms, residual, total, masses, measures, partition=ps.partition, ground=ps.ground)
    if result.identity_gap > tol:
        raise InvariantViolation(f"decomposition identity off by {result.identity_gap}")
    return result


def star_matrix(ps: PSymmetricCapacity) -> np.ndarray:
    """mu*(c) = mu(c) - sum_k mu(c_k e_k) on composition space."""
    m = ps.matrix
    out = m.copy()
    for k in range(ps.p):
        idx = [0] * ps.p
        idx[k] = slice(None)
        shape = [1] * ps.p
        shape[k] = -1
        out = out - m[tuple(idx)].reshape(shape)
    return out


def belief_decompose(ps: PSymmetricCapacity, f, tol: float | None = None) -> DecompositionResult:
    """Decomposition for belief measures, where the residual is itself a
    Choquet integral against the non-normalised measure mu*."""
    tol = get_tolerance(tol)
    if not is_belief_psym(ps, tol):
        raise NotBelief("measure has a negative Moebius coefficient")
    base = decompose(ps, f, tol)
    star = star_matrix(ps)
    m_star = mobius_matrix(star)
    m = mobius_matrix(ps.matrix)
    expected = np.where(block_only_mask(ps.extents), 0, m)
    if np.abs((m_star - expected).astype(np.float64)).max() > tol:
        raise InvariantViolation("Moebius transform of mu* differs from the cross-block masses")
    residual = _integrate(increment_tables(m_star), ps.partition, _scores(f, ps.n))
    degree = star[ps.top]
    result = DecompositionResult(
        base.block_terms,
        residual,
        base.total,
        base.block_masses,
        base.block_measures,
        degree=degree,
        residual_matrix=star,
        partition=ps.partition,
        ground=ps.ground,
    )
    if result.identity_gap > tol:
        raise InvariantViolation(f"belief decomposition identity off by {result.identity_gap}")
    return result


def interaction_degree(ps: PSymmetricCapacity, *, diagnostic: bool = False, tol: float | None = None):
    """``mu(X) - mu(A_1) - ... - mu(A_p)``.

    Only meaningful (and guaranteed nonnegative) for belief measures; pass
    ``diagnostic=True`` to get the raw difference for any capacity.
    """
    if ps.kind != "capacity":
        raise ValueError(f"expected a capacity-kind matrix, got {ps.kind!r}")
    if not diagnostic and not is_belief_psym(ps, tol):
        raise NotBelief("interaction degree requires a belief function")
    return ps.matrix[ps.top] - sum(ps.block_measure(k) for k in range(ps.p))


def vanishing_degree_check(
    ps: PSymmetricCapacity,
    *,
    trials: int = 50,
    seed: int = 0,
    tol: float | None = None,
) -> bool:
    """True when the interaction degree is zero.

    In that case the residual must vanish for random scores and the
    partition must be interadditive; violations raise InvariantViolation.
    """
    tol = get_tolerance(tol)
    degree = interaction_degree(ps, tol=tol)
    _block_masses(ps, tol)
    if degree > tol:
        return False
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        res = decompose(ps, rng.random(ps.n), tol)
        if abs(res.residual) > tol:
            raise InvariantViolation(f"degree is zero but residual is {res.residual}")
    if ps.n <= 16:
        additive = is_interadditive(expand(ps), ps.partition, tol)
    else:
        additive = is_interadditive_psym(ps, tol)
    if not additive:
        raise InvariantViolation("degree is zero but the partition is not interadditive")
    return True
