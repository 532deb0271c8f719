import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from capax.capacity import dual, interaction_from_capacity, mobius_from_capacity
from capax.generators import random_capacity, random_psym
from capax.integral import choquet, choquet_mobius, choquet_psym
from capax.psym import convert, dual_psym, expand

unit = st.floats(0, 1, allow_nan=False, allow_infinity=False)
settings.register_profile("capax", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("capax")


@st.composite
def capacities(draw, max_n=6):
    n = draw(st.integers(1, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_capacity(n, np.random.default_rng(seed))


@st.composite
def capacity_and_scores(draw):
    mu = draw(capacities())
    f = draw(st.lists(unit, min_size=mu.n, max_size=mu.n))
    return mu, f


@st.composite
def psym_and_scores(draw):
    sizes = draw(st.lists(st.integers(1, 3), min_size=1, max_size=3))
    seed = draw(st.integers(0, 2**32 - 1))
    ps = random_psym(sizes, np.random.default_rng(seed))
    f = draw(st.lists(unit, min_size=ps.n, max_size=ps.n))
    return ps, f


@given(capacity_and_scores(), st.floats(0, 5))
def test_positive_homogeneity(data, c):
    mu, f = data
    assert choquet(mu, [c * x for x in f]) == pytest.approx(c * choquet(mu, f), abs=1e-9)


@given(capacity_and_scores(), unit)
def test_translation(data, c):
    mu, f = data
    assert choquet(mu, [x + c for x in f]) == pytest.approx(choquet(mu, f) + c, abs=1e-9)


@given(capacity_and_scores(), st.data())
def test_comonotone_additivity(data, more):
    mu, f = data
    # g sorted the same way as f: a nondecreasing function of f
    bumps = more.draw(st.lists(unit, min_size=mu.n, max_size=mu.n))
    order = sorted(range(mu.n), key=lambda i: f[i])
    g = [0.0] * mu.n
    acc = 0.0
    for pos, i in enumerate(order):
        if pos and f[i] > f[order[pos - 1]]:
            acc += bumps[pos]
        g[i] = acc
    h = [a + b for a, b in zip(f, g)]
    assert choquet(mu, h) == pytest.approx(choquet(mu, f) + choquet(mu, g), abs=1e-9)


@given(capacity_and_scores(), st.data())
def test_monotone_in_scores(data, more):
    mu, f = data
    g = [x + more.draw(unit) for x in f]
    assert choquet(mu, g) >= choquet(mu, f) - 1e-12


@given(capacity_and_scores())
def test_between_min_and_max(data):
    mu, f = data
    val = choquet(mu, f)
    assert min(f) - 1e-12 <= val <= max(f) + 1e-12


@given(capacities(), unit)
def test_idempotent(mu, c):
    assert choquet(mu, [c] * mu.n) == pytest.approx(c, abs=1e-12)


@given(capacity_and_scores())
def test_ties_agree_across_forms(data):
    # the Moebius form has no ordering step, so any tie-break must match it
    mu, f = data
    f = [round(x * 2) / 2 for x in f]
    assert choquet(mu, f) == pytest.approx(choquet_mobius(mobius_from_capacity(mu), f), abs=1e-9)


@given(capacity_and_scores())
def test_dual_relation(data):
    # on [0, 1]: C_dual(f) = 1 - C(1 - f)
    mu, f = data
    assert choquet(dual(mu), f) == pytest.approx(1 - choquet(mu, [1 - x for x in f]), abs=1e-9)


@given(capacities())
def test_dual_involution(mu):
    assert dual(dual(mu)).allclose(mu, 1e-12)


@given(capacities())
def test_shapley_efficiency(mu):
    i = interaction_from_capacity(mu).coeffs
    assert sum(i[1 << k] for k in range(mu.n)) == pytest.approx(1.0, abs=1e-9)


@given(capacities())
def test_shapley_nonnegative(mu):
    i = interaction_from_capacity(mu).coeffs
    assert all(i[1 << k] >= -1e-12 for k in range(mu.n))


@given(psym_and_scores())
def test_compressed_matches_dense(data):
    ps, f = data
    assert choquet_psym(ps, f) == pytest.approx(choquet(expand(ps), f), abs=1e-9)


@given(psym_and_scores())
def test_compressed_dual_and_roundtrip(data):
    ps, _ = data
    assert dual_psym(dual_psym(ps)).allclose(ps, 1e-12)
    assert convert(convert(ps, "interaction"), "capacity").allclose(ps, 1e-9)
