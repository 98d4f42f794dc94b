"""Built-in degree-5 data: representative configurations for the stability tables,
the C*-fixed minimal orbits, and singularity normal forms in adapted coordinates.

Monomials are exponent triples (a, b, c) of x0^a x1^b x2^c.  For thresholds the
singular point is p = (1:0:0); an affine germ x^i y^j (x = x2, y = x1) becomes
x0^(d-i-j) x1^j x2^i.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction as Q

from .monoform import Configuration, Monomial
from .rational import fmt
from .stability import (
    StabilityInterval,
    balancing_line,
    beta_bounds,
    diagonal_interval,
    interval_for_configuration,
    stability_threshold,
)


@dataclass(frozen=True)
class TableRow:
    table: str
    case: str
    curve: tuple[tuple[int, int, int], ...]
    line: int
    endpoint: str  # "alpha", "beta" or "diagonal"
    expected: Q | tuple[Q, Q]
    note: str = ""
    tangency: int | None = None  # highest multiplicity of C.L, for the beta bounds

    @property
    def configuration(self) -> Configuration:
        return Configuration(5, tuple(Monomial(*m) for m in self.curve), (self.line,))


def _row(table, case, curve, line, endpoint, expected, note="", tangency=None):
    exp = tuple(map(Q, expected)) if isinstance(expected, tuple) else Q(expected)
    return TableRow(table, case, tuple(curve), line, endpoint, exp, note, tangency)


X0, X1, X2 = 0, 1, 2

# C = 2D + R with the line L = (x0 = 0) through the relevant point; alpha is the
# lower end of the interval of the representative configuration.
TABLE1 = [
    _row("1", "D conic, R secant", [(3, 0, 2), (2, 2, 1), (1, 4, 0), (0, 5, 0)], X0, "alpha", 0,
         "double conic x0x2 - x1^2 with a general line"),
    _row("1", "D conic, R tangent", [(2, 0, 3), (1, 2, 2), (0, 4, 1)], X0, "alpha", 1,
         "R = (x2 = 0) tangent to the double conic"),
    _row("1", "D line, |D.R| >= 2", [(3, 0, 2)], X0, "alpha", 1, "double line x2^2 times a cubic"),
    _row("1", "D line, D.R = {p}, p smooth on R", [(2, 0, 3), (0, 3, 2)], X0, "alpha", "7/4"),
    _row("1", "D line, D.R = {p}, p an A1 of R", [(1, 1, 3), (0, 3, 2)], X0, "alpha", 2),
    _row("1", "D line, D.R = {p}, p an A2 of R", [(1, 0, 4), (0, 3, 2)], X0, "alpha", "11/5"),
    _row("1", "D line, p a triple point of R", [(0, 3, 2)], X0, "alpha", "5/2"),
]

# p in C with L = (x2 = 0) meeting C with multiplicity k at p; beta is the upper end.
TABLE2 = [
    _row("2", "p smooth, k=1", [(4, 0, 1), (4, 1, 0)], X2, "beta", "5/2", tangency=1),
    _row("2", "p smooth, k=2 (A3 on C+L)", [(4, 0, 1), (3, 2, 0)], X2, "beta", "5/2", tangency=2),
    _row("2", "p smooth, k=3 (A5 on C+L)", [(4, 0, 1), (2, 3, 0)], X2, "beta", "11/5", tangency=3),
    _row("2", "p smooth, k=4 (A7 on C+L)", [(4, 0, 1), (1, 4, 0)], X2, "beta", "13/7", tangency=4),
    _row("2", "p smooth, k=5 (A9 on C+L)", [(4, 0, 1), (0, 5, 0)], X2, "beta", "5/3", tangency=5),
    _row("2", "p an A1, k=2 (D4 on C+L)", [(3, 1, 1), (3, 2, 0)], X2, "beta", "5/2", tangency=2),
    _row("2", "p an A1, k=3 (D6 on C+L)", [(3, 1, 1), (2, 3, 0)], X2, "beta", 2, tangency=3),
    _row("2", "p an A1, k=4 (D8 on C+L)", [(3, 1, 1), (1, 4, 0)], X2, "beta", "8/5", tangency=4),
    _row("2", "p an A1, k=5 (D10 on C+L)", [(3, 1, 1), (0, 5, 0)], X2, "beta", "10/7", tangency=5),
    _row("2", "p an A2, k=3 (E7 on C+L)", [(3, 0, 2), (2, 3, 0)], X2, "beta", "7/4", tangency=3),
    _row("2", "p an An, k=2 (Dn+2 on C+L)", [(3, 2, 0)], X2, "beta", "5/2", tangency=2,
         note="support of x0^3x1^2 + x0^3x2^2 + ...; x0^3x2^2 is dominated"),
]

# Intersections of C and L that destabilize before slope 1.
TABLE3 = [
    _row("3", "A7 at p, L the special tangent", [(3, 0, 2), (0, 4, 1)], X2, "beta", "1/7"),
    _row("3", "D5 at p, L the special tangent", [(2, 1, 2), (1, 4, 0)], X2, "beta", "1/4"),
    _row("3", "A5 at p, L the special tangent", [(3, 0, 2), (1, 3, 1)], X2, "beta", "2/5"),
    _row("3", "A4 at p, L the special tangent", [(3, 0, 2), (0, 5, 0)], X2, "beta", "5/8"),
]

LINE_COMPONENT = [
    _row("line", "L a component of C of multiplicity <= 2", [(3, 0, 2), (2, 2, 1)], X2, "beta", 1,
         "every curve monomial contains x2"),
]

# x1 (x0x2 - x1^2)^2: double conic plus the secant line L = (x1 = 0)
STRICTLY_SEMISTABLE = [
    _row("ex", "double conic plus secant line, L the secant", [(2, 1, 2), (1, 3, 1), (0, 5, 0)], X1,
         "diagonal", ("0", "1"), "monomials of x1*(x0*x2 - x1^2)^2"),
]

ALL_ROWS = TABLE1 + TABLE2 + TABLE3 + LINE_COMPONENT + STRICTLY_SEMISTABLE


@dataclass
class RowCheck:
    row: TableRow
    got: StabilityInterval
    value: Q | StabilityInterval | None
    ok: bool
    bounds_ok: bool | None = None

    def to_json(self) -> dict:
        return {
            "table": self.row.table,
            "case": self.row.case,
            "endpoint": self.row.endpoint,
            "expected": str(StabilityInterval.closed(*self.row.expected))
            if isinstance(self.row.expected, tuple)
            else fmt(self.row.expected),
            "interval": self.got.to_json(),
            "ok": self.ok,
            **({} if self.bounds_ok is None else {"beta_bounds_ok": self.bounds_ok}),
        }


def check_row(row: TableRow) -> RowCheck:
    conf = row.configuration
    if row.endpoint == "diagonal":
        iv = diagonal_interval(conf)
        return RowCheck(row, iv, iv, iv == StabilityInterval.closed(*row.expected))
    iv = interval_for_configuration(conf)
    if iv.empty:
        return RowCheck(row, iv, None, False)
    value = iv.lo if row.endpoint == "alpha" else iv.hi
    bounds_ok = None
    if row.tangency is not None and value is not None:
        bounds_ok = beta_bounds(row.tangency, 5).admits(value)
    return RowCheck(row, iv, value, value == row.expected and bounds_ok is not False, bounds_ok)


def verify_degree5_tables() -> list[RowCheck]:
    return [check_row(r) for r in ALL_ROWS]


@dataclass(frozen=True)
class OrbitRow:
    t: Q
    equation: str
    curve: tuple[tuple[int, int, int], ...]
    sing_p: str
    sing_q: str
    status: str = "check"  # "check" or "flagged"
    note: str = ""


# Minimal orbits with C*-stabilizer at the walls other than 0, 1, 5/2.  The line
# is not listed; it is recovered as the stabilizer eigenline balancing at t.
MINIMAL_ORBITS = [
    OrbitRow(Q(1, 7), "x0^2*x2^3 + x0*x1^4", ((2, 0, 3), (1, 4, 0)), "E6", "A7"),
    OrbitRow(Q(1, 4), "x0^2*x1*x2^2 + x1^4*x2", ((2, 1, 2), (0, 4, 1)), "D8'", "D5"),
    OrbitRow(Q(2, 5), "x0*x1^3*x2 + x0^2*x2^3", ((1, 3, 1), (2, 0, 3)), "E7", "A5"),
    OrbitRow(Q(5, 8), "x0^2*x2^3 + x1^5", ((2, 0, 3), (0, 5, 0)), "E8", "A4"),
    OrbitRow(Q(10, 7), "x0*x1*x2^3 + x1^5", ((1, 1, 3), (0, 5, 0)), "Z11", "A1"),
    OrbitRow(Q(8, 5), "x0*x1*x2^3 + x1^4*x2", ((1, 1, 3), (0, 4, 1)), "Z12", "A1"),
    OrbitRow(Q(5, 3), "x0*x2^4 + x1^5", ((1, 0, 4), (0, 5, 0)), "W12", "smooth"),
    OrbitRow(Q(7, 4), "x0^2*x2^3 + x1^3*x2^2", ((2, 0, 3), (0, 3, 2)), "double line", "A2"),
    OrbitRow(Q(13, 7), "x0*x1*x2^3 + x1^4*x2", ((1, 1, 3), (0, 4, 1)), "W13", "smooth", "flagged",
             "printed equation repeats the Z12 row; it balances at 8/5, not 13/7"),
    OrbitRow(Q(13, 7), "x0*x2^4 + x1^4*x2", ((1, 0, 4), (0, 4, 1)), "W13", "smooth", "check",
             "W13 normal form x^4 + x*y^4 at p, used in place of the repeated equation"),
    OrbitRow(Q(2), "x0*x1*x2^3 + x1^3*x2^2", ((1, 1, 3), (0, 3, 2)), "double line", "A1"),
    OrbitRow(Q(11, 5), "x0*x2^4 + x1^3*x2^2", ((1, 0, 4), (0, 3, 2)), "double line", "smooth"),
]


@dataclass
class OrbitCheck:
    row: OrbitRow
    line: int | None
    interval: StabilityInterval | None
    status: str  # "ok", "mismatch", "flagged"

    def to_json(self) -> dict:
        return {
            "t": fmt(self.row.t),
            "equation": self.row.equation,
            "line": None if self.line is None else f"x{self.line}",
            "interval": None if self.interval is None else self.interval.to_json(),
            "status": self.status,
            **({"note": self.row.note} if self.row.note else {}),
        }


def verify_minimal_orbits() -> list[OrbitCheck]:
    """Diagonal interval of each C*-fixed pair; expected to be the point [t, t]."""
    out = []
    for row in MINIMAL_ORBITS:
        curve = [Monomial(*m) for m in row.curve]
        line = balancing_line(curve, row.t)
        if line is None:
            status = "flagged" if row.status == "flagged" else "mismatch"
            out.append(OrbitCheck(row, None, None, status))
            continue
        iv = diagonal_interval(Configuration(5, tuple(curve), (line,)))
        good = iv == StabilityInterval.closed(row.t, row.t)
        status = "flagged" if row.status == "flagged" else ("ok" if good else "mismatch")
        out.append(OrbitCheck(row, line, iv, status))
    return out


@dataclass(frozen=True)
class NormalForm:
    label: str
    curve: tuple[tuple[int, int, int], ...]
    threshold: Q
    multiplicity: int
    weights: tuple[int, int] | None = None  # quasi-homogeneous weights of (x, y)
    degree: int = 5

    def affine(self) -> list[tuple[int, int]]:
        """Exponents (i, j) of x^i y^j with x = x2, y = x1."""
        return [(c, b) for _, b, c in self.curve]


THRESHOLD_FORMS = [
    NormalForm("E6", ((2, 0, 3), (1, 4, 0)), Q(1, 7), 3, (4, 3)),
    NormalForm("D8'", ((2, 1, 2), (0, 4, 1)), Q(1, 4), 3, (3, 1)),
    NormalForm("E7", ((2, 0, 3), (1, 3, 1)), Q(2, 5), 3, (3, 2)),
    NormalForm("E8", ((2, 0, 3), (0, 5, 0)), Q(5, 8), 3, (5, 3)),
    NormalForm("T2,3,6+k", ((2, 0, 3), (1, 2, 2), (0, 4, 1)), Q(1), 3, (2, 1)),
    NormalForm("E~7", ((1, 4, 0), (1, 0, 4)), Q(1), 4, (1, 1)),
    NormalForm("T2,q,r", ((1, 2, 2), (0, 5, 0), (0, 0, 5)), Q(1), 4),
    NormalForm("Z11", ((1, 1, 3), (0, 5, 0)), Q(10, 7), 4, (4, 3)),
    NormalForm("Z12", ((1, 1, 3), (0, 4, 1)), Q(8, 5), 4, (3, 2)),
    NormalForm("W12", ((1, 0, 4), (0, 5, 0)), Q(5, 3), 4, (5, 4)),
    NormalForm("W13", ((1, 0, 4), (0, 4, 1)), Q(13, 7), 4, (4, 3)),
    NormalForm("N16", ((0, 5, 0), (0, 0, 5)), Q(5, 2), 5, (1, 1)),
    NormalForm("A4", ((3, 0, 2), (0, 5, 0)), Q(-5, 7), 2, (5, 2)),
]

# quartic germs x^2 + x*y^3 and x^2 + x*y^2 + y^4 + x^2*y^2 (x = x2, y = x1)
QUARTIC_PAIR = [
    NormalForm("C1", ((2, 0, 2), (0, 3, 1)), Q(1, 2), 2, degree=4),
    NormalForm("C2", ((2, 0, 2), (1, 2, 1), (0, 4, 0), (0, 2, 2)), Q(0), 2, degree=4),
]


def verify_thresholds(forms=None) -> list[tuple[NormalForm, Q, bool]]:
    forms = THRESHOLD_FORMS + QUARTIC_PAIR if forms is None else forms
    out = []
    for nf in forms:
        got = stability_threshold([Monomial(*m) for m in nf.curve])
        out.append((nf, got, got == nf.threshold))
    return out
