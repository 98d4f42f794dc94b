"""Support enumeration and critical slopes (walls) for degree-d pairs."""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction as Q
from functools import lru_cache
from typing import Iterator

from .monoform import Configuration, Monomial, all_monomials
from .rational import fmt
from .stability import constraints, interval_for_configuration


@lru_cache(maxsize=None)
def _chains_from(d: int, a: int, c: int) -> tuple[tuple[Monomial, ...], ...]:
    """Antichains whose first member (largest x0-exponent) is x0^a x1^(d-a-c) x2^c.

    Two monomials are incomparable iff one has both a larger x0- and a larger
    x2-exponent, so antichains are sequences strictly decreasing in both.
    """
    head = Monomial(a, d - a - c, c)
    out = [(head,)]
    for a2 in range(a - 1, -1, -1):
        for c2 in range(min(c - 1, d - a2), -1, -1):
            for tail in _chains_from(d, a2, c2):
                out.append((head,) + tail)
    return tuple(out)


def curve_antichains(d: int) -> list[tuple[Monomial, ...]]:
    """Every non-empty antichain of the degree-d dominance order, canonically ordered."""
    if d < 1:
        raise ValueError("degree must be positive")
    out = []
    for m in all_monomials(d):
        out.extend(_chains_from(d, m.a, m.c))
    return out


def enumerate_supports(d: int) -> Iterator[Configuration]:
    """Curve antichains times the three possible line supports x0, x1, x2."""
    for chain in curve_antichains(d):
        for i in range(3):
            yield Configuration(d, chain, (i,))


@dataclass(frozen=True)
class Wall:
    t: Q
    witness: Configuration
    r: Q
    side: str  # "+"/"-": where mu^t at (witness, r) turns negative; "end" for range ends

    def to_json(self) -> dict:
        w = self.witness.to_json()
        w["side"] = self.side
        w["interval"] = interval_for_configuration(self.witness).to_json()
        return {"t": fmt(self.t), "witness": w, "r": fmt(self.r)}


@dataclass
class WallReport:
    d: int
    raw: list[Q]
    realized: list[Wall]
    surplus: list[dict] = field(default_factory=list)
    supports: int = 0
    elapsed: float = 0.0

    @property
    def realized_slopes(self) -> list[Q]:
        return [w.t for w in self.realized]

    def to_json(self, timing: bool = False) -> dict:
        out = {
            "d": self.d,
            "raw": [fmt(t) for t in self.raw],
            "realized": [w.to_json() for w in self.realized],
            "surplus": self.surplus,
            "supports": self.supports,
        }
        if timing:
            out["elapsed_s"] = round(self.elapsed, 3)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "WallReport":
        walls = []
        for w in obj["realized"]:
            conf = Configuration.from_json(w["witness"])
            walls.append(Wall(Q(w["t"]), conf, Q(w["r"]), w["witness"]["side"]))
        return cls(
            int(obj["d"]),
            [Q(t) for t in obj["raw"]],
            walls,
            list(obj.get("surplus", [])),
            int(obj.get("supports", 0)),
        )


def _witnesses(conf: Configuration, t: Q) -> list[tuple[Q, str]]:
    """Critical r where mu^t vanishes and stability is lost on a slope side inside t >= 0."""
    out = []
    for r, a, b in constraints(conf):
        if a + t * b != 0 or b == 0:
            continue
        if b < 0:
            out.append((r, "+"))
        elif t > 0:
            out.append((r, "-"))
    return out


def candidate_walls(d: int, order: list[Configuration] | None = None) -> WallReport:
    """Raw candidate slopes and the realized walls with witnesses.

    raw: finite endpoints of all configuration intervals, clipped to [0, d/2].
    realized: those t that bound some non-empty configuration interval with
    semistability actually lost on one side of t (within t >= 0).
    """
    start = time.perf_counter()
    top = Q(d, 2)
    confs = list(enumerate_supports(d)) if order is None else list(order)
    raw: set[Q] = set()
    found: dict[Q, Wall] = {}
    for conf in confs:
        iv = interval_for_configuration(conf)
        for e in iv.endpoints():
            if not 0 <= e <= top:
                continue
            raw.add(e)
            if e in found:
                continue
            hits = _witnesses(conf, e)
            if hits:
                r, side = hits[0]
                found[e] = Wall(e, conf, r, side)
    # 0 and d/2 end the slope range and count as walls whenever some
    # configuration interval stops there, even without a sign change inside it
    for end in (Q(0), top):
        if end in raw and end not in found:
            for conf in confs:
                iv = interval_for_configuration(conf)
                if end in iv.endpoints():
                    r = min(constraints(conf), key=lambda c: (c[1] + end * c[2], c[0]))[0]
                    found[end] = Wall(end, conf, r, "end")
                    break
    surplus = [
        {"t": fmt(t), "note": "endpoint never bounds a change of semistability inside t >= 0"}
        for t in sorted(raw - set(found))
    ]
    return WallReport(
        d,
        sorted(raw),
        [found[t] for t in sorted(found)],
        surplus,
        len(confs),
        time.perf_counter() - start,
    )
