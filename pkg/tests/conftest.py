from fractions import Fraction

import numpy as np
import pytest

from capax.capacity import MobiusRepr, capacity_from_mobius, validate_capacity
from capax.setcore import GroundSet

JURY_LABELS = ("M1", "M2", "P1", "P2")
# value by (mathematicians, physicists) in the coalition
JURY_TABLE = {
    (0, 0): 0, (1, 0): 0.3, (0, 1): 0.2,
    (2, 0): 0.5, (0, 2): 0.3, (1, 1): 0.8,
    (2, 1): 0.9, (1, 2): 0.85, (2, 2): 1,
}

# Moebius table of the 3-element counterexample, order x1 x2 x3 x1x2 x1x3 x2x3 X
COUNTER_MOBIUS = {0b001: 0.4, 0b010: 0.3, 0b100: 0.3, 0b011: 0.1, 0b101: 0.1, 0b110: 0.0, 0b111: -0.2}
COUNTER_SCORES = [1.0, 0.5, 0.0]


def jury_values(rational=False):
    vals = []
    for mask in range(16):
        key = (bin(mask & 0b11).count("1"), bin(mask >> 2).count("1"))
        v = JURY_TABLE[key]
        vals.append(Fraction(str(v)) if rational else float(v))
    return vals


@pytest.fixture
def jury():
    return validate_capacity(jury_values(), GroundSet(JURY_LABELS))


@pytest.fixture
def jury_exact():
    return validate_capacity(jury_values(rational=True), GroundSet(JURY_LABELS))


def counter_mobius(rational=False):
    coeffs = [0.0] * 8
    for mask, v in COUNTER_MOBIUS.items():
        coeffs[mask] = v
    if rational:
        coeffs = [Fraction(str(c)) for c in coeffs]
    return MobiusRepr(GroundSet.of_size(3), coeffs)


@pytest.fixture
def counter_m():
    return counter_mobius()


@pytest.fixture
def counter_mu():
    return validate_capacity(capacity_from_mobius(counter_mobius()))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
