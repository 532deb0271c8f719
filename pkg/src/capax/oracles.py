"""Direct, definition-level evaluations used to cross-check the fast paths.

Everything here loops over subsets explicitly and is only meant for small n.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np

from capax.capacity import InteractionRepr, MobiusRepr, SetFunction, as_array
from capax.setcore import bernoulli, members, popcount


def subsets_of(mask: int):
    """All submasks of ``mask`` including 0 and ``mask`` itself."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def _fill(n: int, fn, rational: bool) -> np.ndarray:
    vals = [fn(a) for a in range(1 << n)]
    return as_array(vals, rational=rational)


def mobius_naive(mu: SetFunction) -> MobiusRepr:
    v = mu.values

    def m(a):
        return sum(((-1) ** popcount(a ^ b)) * v[b] for b in subsets_of(a))

    return MobiusRepr(mu.ground, _fill(mu.n, m, mu.rational))


def zeta_naive(m: MobiusRepr) -> SetFunction:
    c = m.coeffs
    return SetFunction(m.ground, _fill(m.n, lambda a: sum(c[b] for b in subsets_of(a)), c.dtype == object))


def interaction_from_mobius_naive(m: MobiusRepr) -> InteractionRepr:
    c, full = m.coeffs, m.ground.full

    def inter(a):
        return sum(Fraction(1, popcount(b) + 1) * c[a | b] for b in subsets_of(full ^ a))

    vals = _fill(m.n, inter, True)
    return InteractionRepr(m.ground, vals if c.dtype == object else vals.astype(np.float64))


def mobius_from_interaction_naive(interaction: InteractionRepr) -> MobiusRepr:
    c, full = interaction.coeffs, interaction.ground.full

    def mob(a):
        return sum(bernoulli(popcount(b)) * c[a | b] for b in subsets_of(full ^ a))

    vals = _fill(interaction.n, mob, True)
    return MobiusRepr(interaction.ground, vals if c.dtype == object else vals.astype(np.float64))


def interaction_from_capacity_naive(mu: SetFunction) -> InteractionRepr:
    """Shapley interaction straight from its double-sum definition."""
    n, v, full = mu.n, mu.values, mu.ground.full

    def inter(a):
        na = popcount(a)
        total = 0
        for b in subsets_of(full ^ a):
            nb = popcount(b)
            w = Fraction(math.factorial(n - nb - na) * math.factorial(nb), math.factorial(n - na + 1))
            inner = sum(((-1) ** (na - popcount(c))) * v[b | c] for c in subsets_of(a))
            total += w * inner
        return total

    vals = _fill(n, inter, True)
    return InteractionRepr(mu.ground, vals if mu.rational else vals.astype(np.float64))


def shapley_by_permutations(mu: SetFunction) -> list:
    """Average marginal contribution over all n! orderings."""
    n, v = mu.n, mu.values
    totals = [0] * n
    perms = 0
    for order in itertools.permutations(range(n)):
        coalition = 0
        for i in order:
            totals[i] += v[coalition | (1 << i)] - v[coalition]
            coalition |= 1 << i
        perms += 1
    return [t / perms for t in totals]


def is_set_of_indifference_naive(mu: SetFunction, subset: int, tol: float) -> bool:
    """Literal check: all equal-size B1, B2 <= A and every C outside A."""
    v, full = mu.values, mu.ground.full
    subs = list(subsets_of(subset))
    outside = list(subsets_of(full ^ subset))
    for b1, b2 in itertools.combinations(subs, 2):
        if popcount(b1) != popcount(b2):
            continue
        for c in outside:
            if abs(v[b1 | c] - v[b2 | c]) > tol:
                return False
    return True


def is_set_of_indifference_altdef(mu: SetFunction, subset: int, tol: float) -> bool:
    """Variant where C ranges over everything outside ``B1 + B2``."""
    v, full = mu.values, mu.ground.full
    subs = list(subsets_of(subset))
    for b1, b2 in itertools.combinations(subs, 2):
        if popcount(b1) != popcount(b2):
            continue
        for c in subsets_of(full ^ (b1 | b2)):
            if abs(v[b1 | c] - v[b2 | c]) > tol:
                return False
    return True


def choquet_sorted_sum(values, f) -> object:
    """``sum f(x_(i)) (mu(B_i) - mu(B_{i+1}))`` with B_i the i-th upper set."""
    order = sorted(range(len(f)), key=lambda i: (f[i], i))
    upper = [0] * (len(f) + 2)
    mask = 0
    for pos in range(len(order) - 1, -1, -1):
        mask |= 1 << order[pos]
        upper[pos] = mask
    total = 0
    for pos, i in enumerate(order):
        nxt = upper[pos + 1] if pos + 1 < len(order) else 0
        total += f[i] * (values[upper[pos]] - values[nxt])
    return total


def choquet_by_min_sum(m_coeffs, f) -> object:
    """``sum_T m(T) min_{i in T} f_i`` over all nonempty T."""
    return sum(m_coeffs[t] * min(f[i] for i in members(t)) for t in range(1, len(m_coeffs)))


def _compositions(extents):
    return itertools.product(*(range(e) for e in extents))


def _binom_prod(top, bottom) -> int:
    return math.prod(math.comb(a, b) for a, b in zip(top, bottom))


def psym_mobius_naive(matrix: np.ndarray) -> np.ndarray:
    """``m(c) = sum_{d<=c} (-1)^{|c-d|} prod C(c_k, d_k) mu(d)``, entry by entry."""
    out = np.empty(matrix.shape, dtype=object)
    for c in _compositions(matrix.shape):
        total = 0
        for d in itertools.product(*(range(ck + 1) for ck in c)):
            sign = -1 if (sum(c) - sum(d)) % 2 else 1
            total += sign * _binom_prod(c, d) * matrix[d]
        out[c] = total
    return out


def psym_zeta_naive(m: np.ndarray) -> np.ndarray:
    out = np.empty(m.shape, dtype=object)
    for c in _compositions(m.shape):
        out[c] = sum(_binom_prod(c, d) * m[d] for d in itertools.product(*(range(ck + 1) for ck in c)))
    return out


def psym_interaction_naive(m: np.ndarray) -> np.ndarray:
    """``I(c) = sum_{d>=c} prod C(a_k-c_k, d_k-c_k) m(d) / (|d-c|+1)``."""
    sizes = [e - 1 for e in m.shape]
    out = np.empty(m.shape, dtype=object)
    rational = any(isinstance(x, Fraction) for x in m.ravel())
    for c in _compositions(m.shape):
        total = 0
        for d in itertools.product(*(range(ck, a + 1) for ck, a in zip(c, sizes))):
            k = sum(d) - sum(c)
            w = Fraction(1, k + 1) if rational else 1.0 / (k + 1)
            total += w * _binom_prod([a - ck for a, ck in zip(sizes, c)], [dk - ck for dk, ck in zip(d, c)]) * m[d]
        out[c] = total
    return out
