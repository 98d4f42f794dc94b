"""Monomials of a fixed degree, the weight pairing, dominance and supports.

A diagonal one-parameter subgroup of SL(3) with weights (1, r, -1-r), r in
[-1/2, 1], pairs with x0^a x1^b x2^c as a + b*r - c*(1+r).  Everything here is
exact; r is always a Fraction.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction as Q
from typing import Iterable, NamedTuple

R_MIN = Q(-1, 2)
R_MAX = Q(1)

VARS = ("x0", "x1", "x2")


class Monomial(NamedTuple):
    a: int
    b: int
    c: int

    @property
    def degree(self) -> int:
        return self.a + self.b + self.c

    def permuted(self, perm: tuple[int, int, int]) -> "Monomial":
        """Exponents after renaming coordinate x_i to x_perm[i]."""
        out = [0, 0, 0]
        for i, e in enumerate(self):
            out[perm[i]] = e
        return Monomial(*out)

    def text(self) -> str:
        parts = []
        for name, e in zip(VARS, self):
            if e == 1:
                parts.append(name)
            elif e > 1:
                parts.append(f"{name}^{e}")
        return "*".join(parts) if parts else "1"


def monomial(a: int, b: int, c: int, d: int | None = None) -> Monomial:
    if min(a, b, c) < 0:
        raise ValueError(f"negative exponent in {(a, b, c)}")
    m = Monomial(int(a), int(b), int(c))
    if d is not None and m.degree != d:
        raise ValueError(f"{m.text()} has degree {m.degree}, expected {d}")
    return m


_FACTOR = re.compile(r"^(x[012])(?:\^(\d+))?$")


def parse_monomial(text: str) -> Monomial:
    """Read "x0^a*x1^b*x2^c"; factors may repeat, be omitted or carry no exponent."""
    text = text.strip()
    if text == "1":
        return Monomial(0, 0, 0)
    exps = [0, 0, 0]
    for factor in text.split("*"):
        m = _FACTOR.match(factor.strip())
        if not m:
            raise ValueError(f"bad monomial factor {factor!r} in {text!r}")
        exps[int(m.group(1)[1])] += int(m.group(2) or 1)
    return Monomial(*exps)


def all_monomials(d: int) -> list[Monomial]:
    """All degree-d monomials, lexicographically descending (x0^d first)."""
    return [Monomial(a, b, d - a - b) for a in range(d, -1, -1) for b in range(d - a, -1, -1)]


def pairing(m: Monomial, r) -> Q:
    r = Q(r)
    return m.a + m.b * r - m.c * (1 + r)


def dominates(m: Monomial, n: Monomial) -> bool:
    """m > n: distinct and at least as large at both ends of the weight range.

    The pairing is affine in r, so the two endpoints decide it.
    """
    if m.degree != n.degree:
        raise ValueError(f"degree mismatch: {m.text()} vs {n.text()}")
    if m == n:
        return False
    return pairing(m, R_MIN) >= pairing(n, R_MIN) and pairing(m, R_MAX) >= pairing(n, R_MAX)


def support(monos: Iterable[Monomial]) -> tuple[Monomial, ...]:
    """The antichain of dominance-maximal members, in canonical order."""
    s = set(monos)
    if not s:
        raise ValueError("support of an empty monomial set")
    # with a+b+c fixed, m dominates n iff a >= a' and c <= c'
    keep = [m for m in s if not any(n != m and n.a >= m.a and n.c <= m.c for n in s)]
    return tuple(sorted(keep, reverse=True))


def line_value(i: int, r) -> Q:
    """Weight of the coordinate form x_i: 1, r, -(1+r)."""
    r = Q(r)
    return (Q(1), r, -(1 + r))[i]


@dataclass(frozen=True)
class Configuration:
    """Monomials present in a pair's equations: curve part of degree d, line part."""

    d: int
    curve: tuple[Monomial, ...]
    line: tuple[int, ...]

    def __post_init__(self):
        if not self.curve:
            raise ValueError("empty curve part")
        if not self.line:
            raise ValueError("empty line part")
        curve = tuple(sorted({monomial(*m, d=self.d) for m in self.curve}, reverse=True))
        line = tuple(sorted(set(self.line)))
        if any(i not in (0, 1, 2) for i in line):
            raise ValueError(f"line coordinates must be among 0,1,2, got {self.line}")
        object.__setattr__(self, "curve", curve)
        object.__setattr__(self, "line", line)

    @classmethod
    def of(cls, curve, line, d: int | None = None) -> "Configuration":
        """Build from exponent triples / monomial strings and x-names or indices."""
        ms = [parse_monomial(m) if isinstance(m, str) else Monomial(*m) for m in curve]
        if d is None:
            if not ms:
                raise ValueError("empty curve part")
            d = ms[0].degree
        idx = []
        for v in ([line] if isinstance(line, (str, int)) else line):
            idx.append(VARS.index(v) if isinstance(v, str) else int(v))
        return cls(d, tuple(ms), tuple(idx))

    @property
    def curve_support(self) -> tuple[Monomial, ...]:
        return support(self.curve)

    @property
    def line_support(self) -> int:
        # x0 > x1 > x2 is a total order
        return min(self.line)

    def reduced(self) -> "Configuration":
        return Configuration(self.d, self.curve_support, (self.line_support,))

    def permuted(self, perm: tuple[int, int, int]) -> "Configuration":
        return Configuration(
            self.d,
            tuple(m.permuted(perm) for m in self.curve),
            tuple(perm[i] for i in self.line),
        )

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "curve": [list(m) for m in self.curve],
            "line": [VARS[i] for i in self.line],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Configuration":
        try:
            d = int(obj["d"])
            curve = [Monomial(*map(int, m)) for m in obj["curve"]]
            line = [VARS.index(v) if isinstance(v, str) else int(v) for v in obj["line"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed configuration JSON: {exc}") from exc
        return cls(d, tuple(curve), tuple(line))

    def text(self) -> str:
        curve = " + ".join(m.text() for m in self.curve)
        return f"C: {curve}; L: {' + '.join(VARS[i] for i in self.line)}"
