"""Numerical tolerance shared by all equality and monotonicity checks."""

from __future__ import annotations

import os

DEFAULT_TOLERANCE = 1e-9
DENSE_MAX_N = 24
ENUMERATION_GUARD = 10**6
COMPRESSED_GUARD = 2**24


def get_tolerance(tol: float | None = None) -> float:
    """Resolve a tolerance: explicit argument, then ``CAPAX_TOLERANCE``, then default."""
    if tol is not None:
        return float(tol)
    env = os.environ.get("CAPAX_TOLERANCE")
    if env:
        try:
            return float(env)
        except ValueError:
            raise ValueError(f"CAPAX_TOLERANCE is not a number: {env!r}") from None
    return DEFAULT_TOLERANCE
