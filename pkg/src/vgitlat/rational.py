"""Helpers for exact rationals: parsing and the "p/q" wire format."""
from __future__ import annotations

from fractions import Fraction as Q


def to_q(x) -> Q:
    """Coerce ints, Fractions and "p/q" strings to a Fraction."""
    if isinstance(x, Q):
        return x
    if isinstance(x, int):
        return Q(x)
    if isinstance(x, str):
        return Q(x.strip())
    raise TypeError(f"cannot read {x!r} as an exact rational")


def fmt(x: Q) -> str:
    """Serialize as "p/q", or just "p" for integers."""
    x = Q(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"
