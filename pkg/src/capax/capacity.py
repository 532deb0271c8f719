"""Dense set functions over a finite ground set and their representations.

Values live in a 1-d numpy array of length ``2**n`` indexed by subset
bitmask. Two arithmetic backends share the same code: ``float64`` arrays,
and ``object`` arrays of :class:`fractions.Fraction` for exact work.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from capax.config import get_tolerance
from capax.errors import (
    BoundaryViolation,
    InvalidProbabilities,
    MonotonicityViolation,
    PartitionError,
)
from capax.setcore import GroundSet, Partition, bernoulli, popcounts


def as_array(values, rational: bool | None = None) -> np.ndarray:
    """Coerce to a float64 array, or to an object array of Fractions.

    ``rational=None`` keeps Fractions if the input already holds them.
    """
    if isinstance(values, np.ndarray) and values.dtype != object and not rational:
        return values.astype(np.float64, copy=True)
    if isinstance(values, np.ndarray) and values.dtype == object and rational is not False:
        flat = values.ravel()
        if all(type(v) is Fraction for v in flat):
            return flat.copy()
    seq = list(np.asarray(values, dtype=object).ravel()) if isinstance(values, np.ndarray) else list(values)
    if rational is None:
        rational = any(isinstance(v, Fraction) for v in seq)
    if rational:
        out = np.empty(len(seq), dtype=object)
        out[:] = [_to_fraction(v) for v in seq]
        return out
    return np.asarray([float(v) for v in seq], dtype=np.float64)


def _to_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (float, np.floating)):
        # shortest decimal that round-trips, so 0.3 becomes 3/10
        return Fraction(str(float(v)))
    return Fraction(v)


def is_rational(arr: np.ndarray) -> bool:
    return arr.dtype == object


def _zero_like(arr: np.ndarray):
    return Fraction(0) if is_rational(arr) else 0.0


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class SetFunction:
    """A set function with ``values[0] == 0``; no monotonicity assumed."""

    ground: GroundSet
    values: np.ndarray

    def __post_init__(self):
        self.ground.check_dense()
        arr = as_array(self.values)
        if arr.shape != (1 << self.ground.n,):
            raise ValueError(f"expected {1 << self.ground.n} values for n={self.ground.n}, got {arr.size}")
        object.__setattr__(self, "values", _frozen(arr))
        if abs(arr[0]) > get_tolerance():
            raise BoundaryViolation("emptyset", arr[0])

    @property
    def n(self) -> int:
        return self.ground.n

    @property
    def rational(self) -> bool:
        return is_rational(self.values)

    def __getitem__(self, mask: int):
        return self.values[mask]

    def value(self, labels) -> float:
        return self.values[self.ground.mask(labels)]

    def to_rational(self) -> "SetFunction":
        return type(self)._make(self.ground, as_array(self.values, rational=True))

    def to_float(self) -> "SetFunction":
        return type(self)._make(self.ground, self.values.astype(np.float64))

    @classmethod
    def _make(cls, ground: GroundSet, values: np.ndarray):
        """Build without re-running validation (caller guarantees invariants)."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "ground", ground)
        object.__setattr__(obj, "values", _frozen(values))
        return obj

    def allclose(self, other: "SetFunction", tol: float | None = None) -> bool:
        diff = np.abs((self.values - other.values).astype(np.float64))
        return bool(diff.max(initial=0.0) <= get_tolerance(tol))


def _monotonicity_witness(values: np.ndarray, n: int, tol: float):
    """First covering pair (A, A+x_i) with values[A] > values[A+x_i] + tol."""
    idx = np.arange(1 << n)
    if is_rational(values):
        values, den = _scaled(values)
        tol = tol * den
    for i in range(n):
        lo = idx[(idx >> i) & 1 == 0]
        hi = lo | (1 << i)
        bad = np.nonzero((values[lo] - values[hi]) > tol)[0]
        if bad.size:
            k = bad[0]
            return int(lo[k]), int(hi[k])
    return None


def _check_capacity(values: np.ndarray, n: int, tol: float) -> None:
    if abs(values[0]) > tol:
        raise BoundaryViolation("emptyset", values[0])
    if abs(values[-1] - 1) > tol:
        raise BoundaryViolation("X", values[-1])
    witness = _monotonicity_witness(values, n, tol)
    if witness is not None:
        a, b = witness
        raise MonotonicityViolation(a, b, values[a], values[b])


class Capacity(SetFunction):
    """Normalized monotone set function (fuzzy measure).

    Construction validates boundary conditions and monotonicity on the
    ``n * 2**(n-1)`` covering pairs.
    """

    def __post_init__(self):
        super().__post_init__()
        _check_capacity(self.values, self.n, get_tolerance())


def validate_capacity(values, ground: GroundSet | None = None, tol: float | None = None) -> Capacity:
    """Check ``values`` (a SetFunction or raw sequence) and return a Capacity.

    Raises BoundaryViolation or MonotonicityViolation with a witness.
    """
    if isinstance(values, SetFunction):
        ground = values.ground
        arr = values.values.copy()
    else:
        arr = as_array(values)
        if ground is None:
            n = int(arr.size).bit_length() - 1
            ground = GroundSet.of_size(n)
    ground.check_dense()
    if arr.shape != (1 << ground.n,):
        raise ValueError(f"expected {1 << ground.n} values, got {arr.size}")
    _check_capacity(arr, ground.n, get_tolerance(tol))
    return Capacity._make(ground, arr)


def dual(mu: Capacity) -> Capacity:
    """Conjugate measure ``1 - mu(complement)``."""
    full = mu.ground.full
    comp = full ^ np.arange(1 << mu.n)
    one = Fraction(1) if mu.rational else 1.0
    out = one - mu.values[comp]
    out[0] = _zero_like(out)
    return Capacity._make(mu.ground, out)


@dataclass(frozen=True, eq=False)
class MobiusRepr:
    ground: GroundSet
    coeffs: np.ndarray

    def __post_init__(self):
        arr = as_array(self.coeffs)
        if arr.shape != (1 << self.ground.n,):
            raise ValueError(f"expected {1 << self.ground.n} coefficients, got {arr.size}")
        object.__setattr__(self, "coeffs", _frozen(arr))

    @property
    def n(self) -> int:
        return self.ground.n


@dataclass(frozen=True, eq=False)
class InteractionRepr:
    ground: GroundSet
    coeffs: np.ndarray

    def __post_init__(self):
        arr = as_array(self.coeffs)
        if arr.shape != (1 << self.ground.n,):
            raise ValueError(f"expected {1 << self.ground.n} coefficients, got {arr.size}")
        object.__setattr__(self, "coeffs", _frozen(arr))

    @property
    def n(self) -> int:
        return self.ground.n


# -- fast lattice transforms -------------------------------------------------
#
# View a length-2**n array as shape (2**(n-i-1), 2, 2**i): the middle axis is
# bit i. Each pass costs 2**(n-1) operations.


def _scaled(arr: np.ndarray) -> tuple[np.ndarray, int]:
    """Fractions as integer numerators over one common denominator."""
    den = math.lcm(*{x.denominator for x in arr}) if arr.size else 1
    nums = np.empty(arr.size, dtype=object)
    nums[:] = [x.numerator * (den // x.denominator) for x in arr]
    return nums, den


def _machine_ints(nums: np.ndarray, growth: int) -> np.ndarray:
    """int64 copy of ``nums`` when values grown by ``growth`` cannot overflow."""
    peak = max((abs(int(x)) for x in nums), default=0)
    if peak * growth < 2**62:
        return nums.astype(np.int64)
    return nums


def _unscaled(nums: np.ndarray, den: int) -> np.ndarray:
    out = np.empty(nums.size, dtype=object)
    out[:] = [Fraction(x, den) for x in nums.tolist()]
    return out


def _subset_sum_raw(values: np.ndarray, n: int, sign: int) -> np.ndarray:
    out = values.copy()
    for i in range(n):
        v = out.reshape(-1, 2, 1 << i)
        if sign > 0:
            v[:, 1, :] += v[:, 0, :]
        else:
            v[:, 1, :] -= v[:, 0, :]
    return out


def subset_sum(values: np.ndarray, n: int, sign: int = 1) -> np.ndarray:
    """``out[A] = sum_{B <= A} sign**|A-B| values[B]``."""
    if is_rational(values):
        # integer arithmetic is far cheaper than normalising Fractions
        nums, den = _scaled(values)
        return _unscaled(_subset_sum_raw(_machine_ints(nums, 1 << n), n, sign), den)
    return _subset_sum_raw(values, n, sign)


def graded_superset_sum(values: np.ndarray, n: int) -> np.ndarray:
    """``out[k, A] = sum of values[B]`` over supersets B of A with ``|B - A| = k``."""
    out = np.empty((n + 1, values.size), dtype=values.dtype)
    out[:] = 0
    out[0] = values
    for i in range(n):
        v = out.reshape(n + 1, -1, 2, 1 << i)
        v[1:, :, 0, :] += v[:-1, :, 1, :]
    return out


def mobius_from_capacity(mu: SetFunction) -> MobiusRepr:
    """Alternating subset sum ``m(A) = sum_{B<=A} (-1)^{|A-B|} mu(B)``."""
    return MobiusRepr(mu.ground, subset_sum(mu.values, mu.n, sign=-1))


def capacity_from_mobius(m: MobiusRepr) -> SetFunction:
    """Zeta transform ``mu(A) = sum_{B<=A} m(B)``."""
    return SetFunction(m.ground, subset_sum(m.coeffs, m.n, sign=1))


def _grade_weights(n: int, rational: bool, kind: str) -> np.ndarray:
    if kind == "shapley":
        ws = [Fraction(1, k + 1) for k in range(n + 1)]
    else:
        ws = [bernoulli(k) for k in range(n + 1)]
    if rational:
        out = np.empty(n + 1, dtype=object)
        out[:] = ws
        return out
    return np.array([float(w) for w in ws])


def _weighted_grades(coeffs: np.ndarray, n: int, kind: str) -> np.ndarray:
    w = _grade_weights(n, is_rational(coeffs), kind)
    if not is_rational(coeffs):
        return (graded_superset_sum(coeffs, n) * w[:, None]).sum(axis=0)
    nums, den = _scaled(coeffs)
    wnums, wden = _scaled(w)
    growth = (1 << n) * sum(abs(int(x)) for x in wnums)
    nums = _machine_ints(nums, growth)
    if nums.dtype != object:
        wnums = wnums.astype(np.int64)
    out = (graded_superset_sum(nums, n) * wnums[:, None]).sum(axis=0)
    return _unscaled(out, den * wden)


def interaction_from_mobius(m: MobiusRepr) -> InteractionRepr:
    """``I(A) = sum_{B <= X-A} m(A+B) / (|B|+1)``."""
    return InteractionRepr(m.ground, _weighted_grades(m.coeffs, m.n, "shapley"))


def mobius_from_interaction(interaction: InteractionRepr) -> MobiusRepr:
    """``m(A) = sum_{B <= X-A} B_{|B|} I(A+B)`` with Bernoulli numbers B_k."""
    return MobiusRepr(interaction.ground, _weighted_grades(interaction.coeffs, interaction.n, "bernoulli"))


def interaction_from_capacity(mu: SetFunction) -> InteractionRepr:
    """Shapley interaction index of every subset; singletons give Shapley values."""
    return interaction_from_mobius(mobius_from_capacity(mu))


def capacity_from_interaction(interaction: InteractionRepr) -> SetFunction:
    return capacity_from_mobius(mobius_from_interaction(interaction))


def shapley_values(mu: SetFunction) -> np.ndarray:
    inter = interaction_from_capacity(mu)
    return np.array([inter.coeffs[1 << i] for i in range(mu.n)], dtype=inter.coeffs.dtype)


def is_valid_mobius(m: MobiusRepr, tol: float | None = None) -> tuple[bool, object]:
    """Check the monotonicity conditions on Moebius coefficients.

    Returns ``(True, None)`` or ``(False, witness)``; the witness is
    ``"emptyset"``, ``"total"``, or a pair ``(A, i)`` where
    ``sum_{x_i in B <= A} m(B) < 0``.
    """
    tol = get_tolerance(tol)
    c = m.coeffs
    if abs(c[0]) > tol:
        return False, "emptyset"
    if abs(c.sum() - 1) > tol:
        return False, "total"
    # sum_{x_i in B <= A} m(B) equals mu(A) - mu(A - x_i)
    witness = _monotonicity_witness(subset_sum(c, m.n), m.n, tol)
    if witness is not None:
        lo, hi = witness
        return False, (hi, (hi ^ lo).bit_length() - 1)
    return True, None


def is_belief(mu: SetFunction, tol: float | None = None) -> bool:
    """Belief function: every Moebius coefficient is nonnegative."""
    m = mobius_from_capacity(mu).coeffs
    return bool(np.all(m >= -get_tolerance(tol)))


def _close(a: np.ndarray, b: np.ndarray, tol: float) -> np.ndarray:
    return np.abs(a - b) <= tol


def is_null_set(mu: SetFunction, subset: int, tol: float | None = None) -> bool:
    """``mu(A + B) == mu(B)`` for every B disjoint from A."""
    idx = np.arange(1 << mu.n)
    rest = idx[(idx & subset) == 0]
    return bool(np.all(_close(mu.values[rest | subset], mu.values[rest], get_tolerance(tol))))


def are_indifferent(mu: SetFunction, i: int, j: int, tol: float | None = None) -> bool:
    """Elements i and j can be swapped in every coalition without changing mu."""
    if i == j:
        raise ValueError("indifference needs two distinct elements")
    pair = (1 << i) | (1 << j)
    idx = np.arange(1 << mu.n)
    rest = idx[(idx & pair) == 0]
    return bool(np.all(_close(mu.values[rest | (1 << i)], mu.values[rest | (1 << j)], get_tolerance(tol))))


def indifference_witness(mu: SetFunction, subset: int, tol: float | None = None) -> tuple[int, int] | None:
    """Two sets ``B1 + C``, ``B2 + C`` (B1, B2 <= A, equal size, C outside A)
    with different values, or None when A is a set of indifference."""
    tol = get_tolerance(tol)
    n = mu.n
    idx = np.arange(1 << n)
    counts = popcounts(n)
    key = (idx & ~subset) * (n + 1) + counts[idx & subset]
    _, inverse = np.unique(key, return_inverse=True)
    inverse = inverse.ravel()
    vals = mu.values
    # compare the extremes of each group, not just a representative, so a
    # loose tolerance cannot chain x ~ y ~ z past a large x-z gap
    order = np.argsort(inverse, kind="stable")
    starts = np.r_[0, np.nonzero(np.diff(inverse[order]))[0] + 1]
    seg = vals[order]
    spread = np.maximum.reduceat(seg, starts) - np.minimum.reduceat(seg, starts)
    bad = np.nonzero(spread > tol)[0]
    if bad.size:
        g = int(bad[0])
        stop = starts[g + 1] if g + 1 < starts.size else seg.size
        part, ids = seg[starts[g]:stop], order[starts[g]:stop]
        a, b = sorted((int(ids[np.argmin(part)]), int(ids[np.argmax(part)])))
        return a, b
    return None


def is_set_of_indifference(mu: SetFunction, subset: int, tol: float | None = None) -> bool:
    """Equal-size parts of ``subset`` are interchangeable in every coalition
    drawn from outside ``subset``."""
    if subset == 0:
        raise ValueError("set of indifference must be nonempty")
    return indifference_witness(mu, subset, tol) is None


def lower_envelope(
    partition: Partition,
    probs: Sequence,
    ground: GroundSet | None = None,
    tol: float | None = None,
) -> Capacity:
    """Lower probability when only block probabilities are known:
    ``mu(A) = sum of P(B_i) over blocks B_i contained in A``.

    ``probs`` follows ``partition.blocks`` (canonical order)."""
    tol = get_tolerance(tol)
    ground = ground or GroundSet.of_size(partition.n)
    if ground.n != partition.n:
        raise PartitionError("partition and ground set sizes differ")
    probs = list(probs)
    if len(probs) != partition.p:
        raise InvalidProbabilities(f"need {partition.p} probabilities, got {len(probs)}")
    if any(p < 0 for p in probs):
        raise InvalidProbabilities(f"negative probability in {probs}")
    if abs(sum(probs) - 1) > tol:
        raise InvalidProbabilities(f"probabilities sum to {sum(probs)}, not 1")
    rational = any(isinstance(p, Fraction) for p in probs)
    idx = np.arange(1 << partition.n)
    out = as_array(np.zeros(1 << partition.n), rational=rational)
    for block, p in zip(partition.blocks, probs):
        out[(idx & block) == block] += p
    return validate_capacity(SetFunction._make(ground, out), tol=tol)


def is_interadditive(mu: SetFunction, partition: Partition, tol: float | None = None) -> bool:
    """``mu(A) == sum_P mu(P & A)`` for every A."""
    if partition.n != mu.n:
        raise PartitionError("partition and measure sizes differ")
    idx = np.arange(1 << mu.n)
    total = np.zeros_like(mu.values)
    total[:] = _zero_like(mu.values)
    for block in partition.blocks:
        total = total + mu.values[idx & block]
    return bool(np.all(_close(total, mu.values, get_tolerance(tol))))
