"""The numerical function mu^t, stability intervals, thresholds and lct formulas.

For a configuration (curve monomials, line monomials) and normalized weight r,

    mu^t(r) = max_{m in curve} <m, r>  +  t * (weight of the line support),

and the configuration is semistable at slope t iff min_r mu^t(r) >= 0.  Both
summands are convex and piecewise linear in r, with breakpoints that do not
depend on t, so every minimization below is a finite exact check.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction as Q
from itertools import combinations, permutations
from math import gcd
from typing import Iterable, Sequence

from .monoform import (
    R_MAX,
    R_MIN,
    Configuration,
    Monomial,
    line_value,
    pairing,
    support,
)
from .rational import fmt

PERMUTATIONS = tuple(permutations(range(3)))


@dataclass(frozen=True)
class StabilityInterval:
    """Closed interval of slopes [lo, hi]; hi=None means unbounded above."""

    lo: Q | None
    hi: Q | None
    empty: bool = False

    @classmethod
    def empty_set(cls) -> "StabilityInterval":
        return cls(None, None, True)

    @classmethod
    def closed(cls, lo, hi=None) -> "StabilityInterval":
        lo = Q(lo)
        hi = None if hi is None else Q(hi)
        if hi is not None and hi < lo:
            return cls.empty_set()
        return cls(lo, hi)

    def __contains__(self, t) -> bool:
        if self.empty:
            return False
        t = Q(t)
        return self.lo <= t and (self.hi is None or t <= self.hi)

    def intersect(self, other: "StabilityInterval") -> "StabilityInterval":
        if self.empty or other.empty:
            return StabilityInterval.empty_set()
        lo = max(self.lo, other.lo)
        his = [x for x in (self.hi, other.hi) if x is not None]
        return StabilityInterval.closed(lo, min(his) if his else None)

    @property
    def is_point(self) -> bool:
        return not self.empty and self.hi is not None and self.lo == self.hi

    def endpoints(self) -> list[Q]:
        if self.empty:
            return []
        return [self.lo] + ([] if self.hi is None else [self.hi])

    def to_json(self) -> dict:
        if self.empty:
            return {"empty": True}
        return {"lo": fmt(self.lo), "hi": "inf" if self.hi is None else fmt(self.hi)}

    def __str__(self) -> str:
        if self.empty:
            return "empty"
        return f"[{fmt(self.lo)}, {'inf' if self.hi is None else fmt(self.hi)}]"


def _conf(xi) -> Configuration:
    if not isinstance(xi, Configuration):
        raise TypeError("expected a Configuration")
    return xi


def curve_max(curve: Iterable[Monomial], r) -> Q:
    return max(pairing(m, r) for m in curve)


def mu(xi: Configuration, r, t) -> Q:
    """mu^t(xi, r), read off the supports only."""
    t = Q(t)
    if t < 0:
        raise ValueError("slope t must be non-negative")
    r = Q(r)
    if not R_MIN <= r <= R_MAX:
        raise ValueError(f"normalized weight {r} outside [-1/2, 1]")
    return curve_max(xi.curve_support, r) + t * line_value(xi.line_support, r)


def critical_r_values(curve: Configuration | Iterable[Monomial]) -> list[Q]:
    """Endpoints of the weight range plus interior crossings of support pieces."""
    ms = curve.curve_support if isinstance(curve, Configuration) else support(curve)
    rs = {R_MIN, R_MAX}
    # <m, r> = (a - c) + (b - c) r
    for m, n in combinations(ms, 2):
        ds = (m.b - m.c) - (n.b - n.c)
        if ds:
            r = Q((n.a - n.c) - (m.a - m.c), ds)
            if R_MIN < r < R_MAX:
                rs.add(r)
    return sorted(rs)


def min_mu_over_r(xi: Configuration, t) -> Q:
    return min(mu(xi, r, t) for r in critical_r_values(xi))


def constraints(xi: Configuration) -> list[tuple[Q, Q, Q]]:
    """(r, curve value A, line value B): semistable at t iff A + t*B >= 0 at every r."""
    curve = xi.curve_support
    i = xi.line_support
    return [(r, curve_max(curve, r), line_value(i, r)) for r in critical_r_values(xi)]


def interval_for_configuration(xi: Configuration) -> StabilityInterval:
    """The exact set {t >= 0 : min_r mu^t >= 0}."""
    lo, hi = Q(0), None
    for _, a, b in constraints(_conf(xi)):
        if b > 0:
            lo = max(lo, -a / b)
        elif b < 0:
            hi = -a / b if hi is None else min(hi, -a / b)
        elif a < 0:
            return StabilityInterval.empty_set()
    return StabilityInterval.closed(lo, hi)


def binding_weights(xi: Configuration, t) -> list[Q]:
    """Critical r at which mu^t vanishes (the witnesses for an endpoint t)."""
    t = Q(t)
    return [r for r, a, b in constraints(xi) if a + t * b == 0]


def diagonal_interval(xi: Configuration) -> StabilityInterval:
    """Intersection over the six coordinate orderings of the configuration interval.

    Only one-parameter subgroups diagonal in the given coordinates are seen, so
    the result contains the true stability interval of the pair.
    """
    if len(xi.line) != 1:
        raise ValueError("diagonal_interval needs the line to be a single coordinate form")
    out = StabilityInterval.closed(0)
    for perm in PERMUTATIONS:
        out = out.intersect(interval_for_configuration(xi.permuted(perm)))
        if out.empty:
            break
    return out


def stabilizer_weights(curve: Sequence[Monomial]) -> tuple[int, int, int] | None:
    """Primitive integer weights (sum 0) making every curve monomial equal weight.

    None when no non-trivial diagonal C* fixes the curve.
    """
    ms = list(curve)
    if len(ms) < 2:
        raise ValueError("need at least two monomials to pin down a stabilizer")
    base = ms[0]
    w = None
    for m in ms[1:]:
        diff = (m.a - base.a, m.b - base.b, m.c - base.c)
        cand = (diff[1] - diff[2], diff[2] - diff[0], diff[0] - diff[1])  # (1,1,1) x diff
        if any(cand):
            w = cand
            break
    if w is None:
        return None
    g = gcd(*w)
    w = tuple(x // g for x in w)
    if any(sum(wi * e for wi, e in zip(w, m)) != sum(wi * e for wi, e in zip(w, base)) for m in ms):
        return None
    return w


def eigenline_slopes(curve: Sequence[Monomial]) -> dict[int, Q]:
    """For each coordinate line x_i, the slope t where the stabilizer balances mu^t = 0.

    With stabilizer weights w, the curve weight is w.m and the line x_i has
    weight w_i; balance means w.m + t*w_i = 0.  Only t >= 0 is returned.
    """
    w = stabilizer_weights(curve)
    if w is None:
        return {}
    wm = sum(wi * e for wi, e in zip(w, curve[0]))
    out = {}
    for i, wi in enumerate(w):
        if wi:
            t = Q(-wm, wi)
            if t >= 0:
                out[i] = t
    return out


def balancing_line(curve: Sequence[Monomial], t) -> int | None:
    """The coordinate eigenline balancing the stabilizer at slope t, if any."""
    t = Q(t)
    hits = [i for i, s in eigenline_slopes(curve).items() if s == t]
    return hits[0] if hits else None


def stability_threshold(curve: Iterable[Monomial]) -> Q:
    """t_p = -min_r max_m <m, r> for monomials written in coordinates adapted to p."""
    ms = support(curve)
    return -min(curve_max(ms, r) for r in critical_r_values(ms))


def lct_quasihomogeneous(w1: int, w2: int, monomials: Iterable[tuple[int, int]]) -> Q:
    """(w1 + w2) / w(f), with w(f) the least weighted degree i*w1 + j*w2 over x^i y^j."""
    if w1 <= 0 or w2 <= 0:
        raise ValueError("weights must be positive")
    if gcd(w1, w2) != 1:
        raise ValueError(f"weights {w1}, {w2} are not coprime")
    ms = list(monomials)
    if not ms:
        raise ValueError("empty monomial list")
    wf = min(i * w1 + j * w2 for i, j in ms)
    if wf <= 0:
        raise ValueError("f must vanish at the origin")
    return Q(w1 + w2, wf)


def discrepancy(w1: int, w2: int, d, t, wf) -> Q:
    """w1 + w2 - 1 - 3*w(f)/(d + t); below -1 signals a destabilizing weighted blowup."""
    d, t, wf = Q(d), Q(t), Q(wf)
    if d + t == 0:
        raise ZeroDivisionError("d + t = 0")
    return w1 + w2 - 1 - 3 * wf / (d + t)


def multiplicity_bounds(k: int, d: int) -> tuple[Q, Q]:
    """Range (3k/2 - d, 3k - d) for t_p at a point of multiplicity k."""
    if not 1 <= k <= d:
        raise ValueError(f"multiplicity {k} out of range for degree {d}")
    return Q(3 * k, 2) - d, Q(3 * k - d)


@dataclass(frozen=True)
class BetaBound:
    """Bounds on the upper endpoint beta; None where a side is unconstrained."""

    lo: Q | None
    hi: Q | None

    @property
    def exact(self) -> bool:
        return self.lo is not None and self.lo == self.hi

    def admits(self, beta) -> bool:
        beta = Q(beta)
        return (self.lo is None or self.lo <= beta) and (self.hi is None or beta <= self.hi)


def beta_bounds(k: int, d: int, line_component: bool = False) -> BetaBound:
    """Bounds on beta from the highest intersection multiplicity k of C and L."""
    if not 0 <= k <= d:
        raise ValueError(f"intersection multiplicity {k} out of range for degree {d}")
    if line_component:
        return BetaBound(None, Q(d - 3, 2))
    if 2 * k <= d:
        return BetaBound(Q(d, 2), Q(d, 2))
    e = 2 * k - d
    return BetaBound(Q(d, 2) - Q(3 * e, 2), Q(d, 2) - Q(3 * e, 2 * (2 * k - 1)))
