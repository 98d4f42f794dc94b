"""Even integral lattices given by Gram matrices.

Vectors are integer coordinate tuples in the lattice basis.  ADE lattices are
negative definite (roots have square -2); U and U(n) have off-diagonal 1 and n.
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction as Q
from functools import cached_property, reduce
from itertools import product
from math import gcd, isqrt, lcm
from typing import Iterable, Iterator, Sequence

from sympy import Matrix, ZZ
from sympy.matrices.normalforms import hermite_normal_form, smith_normal_decomp

Vec = tuple[int, ...]


class BudgetExceeded(RuntimeError):
    """A brute-force search would exceed its configured budget."""


class LatticeSpecError(ValueError):
    pass


# ---------------------------------------------------------------- matrices


def _mat(rows) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(int(x) for x in r) for r in rows)


def det_int(a: Sequence[Sequence[int]]) -> int:
    """Bareiss fraction-free determinant."""
    n = len(a)
    if n == 0:
        return 1
    m = [list(r) for r in a]
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def congruence_diagonal(gram) -> list[Q]:
    """Diagonal entries of a rational congruence diagonalization (zeros for the radical)."""
    a = [[Q(x) for x in r] for r in gram]
    n = len(a)
    out = []
    for k in range(n):
        if a[k][k] == 0:
            j = next((j for j in range(k + 1, n) if a[j][j] != 0), None)
            if j is not None:
                a[k], a[j] = a[j], a[k]
                for r in a:
                    r[k], r[j] = r[j], r[k]
            else:
                j = next((j for j in range(k + 1, n) if a[k][j] != 0), None)
                if j is not None:
                    # e_k <- e_k + e_j makes the pivot 2 a_kj != 0
                    for c in range(n):
                        a[k][c] += a[j][c]
                    for r in range(n):
                        a[r][k] += a[r][j]
        p = a[k][k]
        out.append(p)
        if p == 0:
            continue
        for i in range(k + 1, n):
            f = a[i][k] / p
            if f:
                for c in range(k, n):
                    a[i][c] -= f * a[k][c]
        for i in range(k + 1, n):
            a[k][i] = Q(0)
        for i in range(k + 1, n):
            a[i][k] = Q(0)
    return out


def signature_of(gram) -> tuple[int, int]:
    d = congruence_diagonal(gram)
    return sum(1 for x in d if x > 0), sum(1 for x in d if x < 0)


def smith(a: Sequence[Sequence[int]]):
    """(S, U, V) with S = U a V, as nested lists."""
    s, u, v = smith_normal_decomp(Matrix(a), domain=ZZ)
    return s.tolist(), u.tolist(), v.tolist()


def invariant_factors(a: Sequence[Sequence[int]]) -> list[int]:
    if not a or not a[0]:
        return []
    s, _, _ = smith(a)
    return [abs(s[i][i]) for i in range(min(len(s), len(s[0]))) if s[i][i] != 0]


def integer_kernel(a: Sequence[Sequence[int]], n: int) -> list[Vec]:
    """A basis of {x in Z^n : a x = 0}; automatically primitive."""
    if not a:
        return [tuple(int(i == j) for j in range(n)) for i in range(n)]
    s, _, v = smith(a)
    r = sum(1 for i in range(min(len(s), n)) if s[i][i] != 0)
    return [tuple(int(v[i][j]) for i in range(n)) for j in range(r, n)]


def inverse_q(a) -> list[list[Q]]:
    n = len(a)
    m = [[Q(x) for x in r] + [Q(int(i == j)) for j in range(n)] for i, r in enumerate(a)]
    for k in range(n):
        p = next(i for i in range(k, n) if m[i][k] != 0)
        m[k], m[p] = m[p], m[k]
        piv = m[k][k]
        m[k] = [x / piv for x in m[k]]
        for i in range(n):
            if i != k and m[i][k]:
                f = m[i][k]
                m[i] = [x - f * y for x, y in zip(m[i], m[k])]
    return [r[n:] for r in m]


def unimodular_completion(rows: Sequence[Vec], n: int) -> list[Vec]:
    """A Z-basis of Z^n whose first k vectors span the same group as the given
    (primitive) rows."""
    k = len(rows)
    if k == 0:
        return [tuple(int(i == j) for j in range(n)) for i in range(n)]
    s, _, v = smith(rows)
    if any(abs(s[i][i]) != 1 for i in range(k)):
        raise ValueError("rows do not span a primitive sublattice")
    vinv = Matrix(v).inv()
    return [tuple(int(x) for x in vinv.row(i)) for i in range(n)]


# ----------------------------------------------------------------- lattice


@dataclass(frozen=True)
class GramLattice:
    gram: tuple[tuple[int, ...], ...]
    name: str = ""

    def __post_init__(self):
        g = _mat(self.gram)
        n = len(g)
        if any(len(r) != n for r in g):
            raise LatticeSpecError("Gram matrix must be square")
        if any(g[i][j] != g[j][i] for i in range(n) for j in range(n)):
            raise LatticeSpecError("Gram matrix must be symmetric")
        object.__setattr__(self, "gram", g)

    @property
    def rank(self) -> int:
        return len(self.gram)

    @cached_property
    def det(self) -> int:
        return det_int(self.gram)

    @cached_property
    def signature(self) -> tuple[int, int]:
        return signature_of(self.gram)

    @property
    def is_even(self) -> bool:
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    @property
    def degenerate(self) -> bool:
        return self.det == 0

    def inner(self, x, y):
        g = self.gram
        return sum(x[i] * g[i][j] * y[j] for i in range(self.rank) if x[i] for j in range(self.rank) if y[j])

    def norm(self, x):
        return self.inner(x, x)

    def pairings(self, x) -> Vec:
        """(x . b_1, ..., x . b_n)."""
        return tuple(sum(x[i] * self.gram[i][j] for i in range(self.rank)) for j in range(self.rank))

    def __add__(self, other: "GramLattice") -> "GramLattice":
        return direct_sum(self, other)

    def scaled(self, k: int) -> "GramLattice":
        return GramLattice([[k * x for x in r] for r in self.gram], f"{self.name}({k})")

    def sublattice(self, basis: Sequence[Sequence[int]], name: str = "") -> "GramLattice":
        return GramLattice([[self.inner(u, v) for v in basis] for u in basis], name)

    def to_json(self) -> dict:
        return {"name": self.name, "gram": [list(r) for r in self.gram],
                "signature": list(self.signature), "det": self.det}

    def __str__(self):
        return self.name or f"<rank {self.rank} lattice>"


def direct_sum(*parts: GramLattice) -> GramLattice:
    n = sum(p.rank for p in parts)
    g = [[0] * n for _ in range(n)]
    off = 0
    for p in parts:
        for i in range(p.rank):
            for j in range(p.rank):
                g[off + i][off + j] = p.gram[i][j]
        off += p.rank
    return GramLattice(g, "+".join(p.name for p in parts if p.name))


def _from_tree(n: int, edges: Iterable[tuple[int, int]], name: str) -> GramLattice:
    g = [[0] * n for _ in range(n)]
    for i in range(n):
        g[i][i] = -2
    for i, j in edges:
        g[i][j] = g[j][i] = 1
    return GramLattice(g, name)


def A(n: int) -> GramLattice:
    if n < 1:
        raise LatticeSpecError("A_n needs n >= 1")
    return _from_tree(n, [(i, i + 1) for i in range(n - 1)], f"A{n}")


def D(n: int) -> GramLattice:
    if n < 4:
        raise LatticeSpecError("D_n needs n >= 4")
    return _from_tree(n, [(i, i + 1) for i in range(n - 2)] + [(n - 3, n - 1)], f"D{n}")


def E(n: int) -> GramLattice:
    if n not in (6, 7, 8):
        raise LatticeSpecError("E_n needs n in 6, 7, 8")
    return _from_tree(n, [(i, i + 1) for i in range(n - 2)] + [(2, n - 1)], f"E{n}")


def U(k: int = 1) -> GramLattice:
    return GramLattice([[0, k], [k, 0]], "U" if k == 1 else f"U({k})")


def rank_one(k: int) -> GramLattice:
    return GramLattice([[k]], f"<{k}>")


def T(p: int, q: int, r: int) -> GramLattice:
    """Tree with a central node and arms of p-1, q-1, r-1 further nodes."""
    if min(p, q, r) < 1:
        raise LatticeSpecError("T(p,q,r) needs positive arms")
    edges, n = [], 1
    for arm in (p, q, r):
        prev = 0
        for _ in range(arm - 1):
            edges.append((prev, n))
            prev = n
            n += 1
    return _from_tree(n, edges, f"T({p},{q},{r})")


M_BASIS_NAMES = ("l'", "e1", "e2", "e3", "e4", "e5")


def M() -> GramLattice:
    """Rank 6 with basis l', e1..e5: all squares -2, l'.e_i = 1, e_i.e_j = 0."""
    g = [[0] * 6 for _ in range(6)]
    for i in range(6):
        g[i][i] = -2
    for i in range(1, 6):
        g[0][i] = g[i][0] = 1
    return GramLattice(g, "M")


M_POLARIZATION: Vec = (2, 1, 1, 1, 1, 1)  # h = 2l' + e1 + ... + e5


def m_d4_u2_basis() -> list[Vec]:
    """The basis l', e1, e2, e3, h - e4, h - e5 of M: Gram = D4 (first four) + U(2)."""
    h = M_POLARIZATION
    f = [tuple(h[a] - int(a == i) for a in range(6)) for i in (4, 5)]
    return [tuple(int(a == i) for a in range(6)) for i in range(4)] + f


# ----------------------------------------------------------- spec language

_TERM = re.compile(
    r"""^(?P<mult>\d+)?\s*(?:
        (?P<ade>[ADE])(?P<n>\d+) |
        (?P<u>U) |
        T\((?P<p>\d+),(?P<q>\d+),(?P<r>\d+)\) |
        (?P<m>M) |
        <(?P<k>-?\d+)>
    )(?:\((?P<scale>-?\d+)\))?$""",
    re.X,
)


def _split_terms(text: str) -> list[tuple[int, str]]:
    """Split on top-level '+', remembering each term's start column."""
    terms, depth, start = [], 0, 0
    for i, ch in enumerate(text + "+"):
        if ch in "(<":
            depth += 1
        elif ch in ")>":
            depth -= 1
        elif ch == "+" and depth == 0:
            terms.append((start, text[start:i]))
            start = i + 1
    return terms


def parse_lattice(spec) -> GramLattice:
    """Lattice from "E8+D4+U(2)", "T(2,3,8)", "M", "10A1", "<-4>", "E8(-1)" or a
    JSON Gram matrix (string or nested list)."""
    if isinstance(spec, GramLattice):
        return spec
    if isinstance(spec, (list, tuple)):
        return GramLattice(spec)
    text = str(spec).strip().replace("−", "-").replace(" ", "")
    if text.startswith("["):
        try:
            return GramLattice(json.loads(text))
        except json.JSONDecodeError as exc:
            raise LatticeSpecError(f"bad JSON Gram matrix at column {exc.colno}: {exc.msg}") from exc
    if not text:
        raise LatticeSpecError("empty lattice spec")
    parts = []
    for col, term in _split_terms(text):
        m = _TERM.match(term)
        if not m:
            raise LatticeSpecError(f"cannot parse lattice term {term!r} at column {col + 1}")
        if m["ade"]:
            lat = {"A": A, "D": D, "E": E}[m["ade"]](int(m["n"]))
        elif m["u"]:
            lat = U(int(m["scale"])) if m["scale"] else U()
        elif m["p"]:
            lat = T(int(m["p"]), int(m["q"]), int(m["r"]))
        elif m["m"]:
            lat = M()
        else:
            lat = rank_one(int(m["k"]))
        if m["scale"] and not m["u"]:
            lat = lat.scaled(int(m["scale"]))
        parts.extend([lat] * int(m["mult"] or 1))
    out = direct_sum(*parts)
    return GramLattice(out.gram, text)


# --------------------------------------------------------- finite forms


@dataclass(frozen=True)
class FiniteQuadraticForm:
    """Z/d1 + ... + Z/dk with q(x) = x^T V x mod 2 and b(x,y) = x^T V y mod 1.

    V is a rational symmetric matrix: V[i][i] = q(g_i) mod 2, V[i][j] = b(g_i, g_j) mod 1.
    """

    orders: tuple[int, ...]
    values: tuple[tuple[Q, ...], ...]

    def __post_init__(self):
        k = len(self.orders)
        v = [[Q(self.values[i][j]) for j in range(k)] for i in range(k)]
        for i in range(k):
            v[i][i] %= 2
            for j in range(k):
                if i != j:
                    v[i][j] %= 1
        object.__setattr__(self, "values", tuple(tuple(r) for r in v))
        object.__setattr__(self, "orders", tuple(int(d) for d in self.orders))

    @property
    def order(self) -> int:
        return reduce(lambda a, b: a * b, self.orders, 1)

    @property
    def length(self) -> int:
        """Minimal number of generators."""
        best = 0
        primes = set()
        for d in self.orders:
            p = 2
            while p * p <= d:
                if d % p == 0:
                    primes.add(p)
                    while d % p == 0:
                        d //= p
                p += 1
            if d > 1:
                primes.add(d)
        for p in primes:
            best = max(best, sum(1 for d in self.orders if d % p == 0))
        return best

    def elements(self) -> Iterator[Vec]:
        return product(*(range(d) for d in self.orders))

    def reduce(self, x) -> Vec:
        return tuple(int(a) % d for a, d in zip(x, self.orders))

    def add(self, x, y) -> Vec:
        return tuple((a + b) % d for a, b, d in zip(x, y, self.orders))

    def scale(self, k: int, x) -> Vec:
        return tuple((k * a) % d for a, d in zip(x, self.orders))

    def q(self, x) -> Q:
        v = self.values
        k = len(x)
        s = Q(0)
        for i in range(k):
            if x[i]:
                s += x[i] * x[i] * v[i][i]
                for j in range(i + 1, k):
                    if x[j]:
                        s += 2 * x[i] * x[j] * v[i][j]
        return s % 2

    def b(self, x, y) -> Q:
        v = self.values
        return sum((x[i] * y[j] * v[i][j] for i in range(len(x)) if x[i] for j in range(len(y)) if y[j]), Q(0)) % 1

    def element_order(self, x) -> int:
        return reduce(lcm, (d // gcd(a, d) for a, d in zip(x, self.orders)), 1)

    def isotropic_elements(self, nonzero: bool = True) -> list[Vec]:
        zero = tuple(0 for _ in self.orders)
        return [x for x in self.elements() if self.q(x) == 0 and not (nonzero and x == zero)]

    def negated(self) -> "FiniteQuadraticForm":
        return FiniteQuadraticForm(self.orders, tuple(tuple(-x for x in r) for r in self.values))

    def __add__(self, other: "FiniteQuadraticForm") -> "FiniteQuadraticForm":
        k, l = len(self.orders), len(other.orders)
        v = [[Q(0)] * (k + l) for _ in range(k + l)]
        for i in range(k):
            for j in range(k):
                v[i][j] = self.values[i][j]
        for i in range(l):
            for j in range(l):
                v[k + i][k + j] = other.values[i][j]
        return FiniteQuadraticForm(self.orders + other.orders, tuple(map(tuple, v)))

    def span(self, gens: Sequence[Vec]) -> frozenset[Vec]:
        zero = tuple(0 for _ in self.orders)
        out = {zero}
        frontier = [zero]
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = self.add(x, g)
                if y not in out:
                    out.add(y)
                    frontier.append(y)
        return frozenset(out)

    def to_json(self) -> dict:
        return {
            "orders": list(self.orders),
            "q": [str(self.values[i][i]) for i in range(len(self.orders))],
            "b": [[str(x) for x in r] for r in self.values],
        }


def discriminant_form(lat: GramLattice) -> FiniteQuadraticForm:
    """A_L = L*/L with q read off from the dual basis, via Smith normal form."""
    if lat.degenerate:
        raise ValueError(f"{lat} is degenerate")
    if lat.rank == 0:
        return FiniteQuadraticForm((), ())
    s, u, _ = smith(lat.gram)
    uinv = Matrix(u).inv()
    ginv = inverse_q(lat.gram)
    n = lat.rank
    gens, orders = [], []
    for i in range(n):
        d = abs(s[i][i])
        if d > 1:
            # y = U^{-1} e_i is a functional; its dual vector is G^{-1} y
            y = [int(uinv[j, i]) for j in range(n)]
            gens.append([sum(ginv[a][c] * y[c] for c in range(n)) for a in range(n)])
            orders.append(d)
    k = len(gens)
    g = lat.gram
    vals = [[Q(0)] * k for _ in range(k)]
    for i in range(k):
        gi = [sum(gens[i][a] * g[a][c] for a in range(n)) for c in range(n)]
        for j in range(k):
            vals[i][j] = sum(gi[c] * gens[j][c] for c in range(n))
    return FiniteQuadraticForm(tuple(orders), tuple(map(tuple, vals)))


def dual_representatives(lat: GramLattice) -> list[tuple[Vec, list[Q]]]:
    """(element of discriminant_form(lat), a rational dual vector lifting it)."""
    s, u, _ = smith(lat.gram)
    uinv = Matrix(u).inv()
    ginv = inverse_q(lat.gram)
    n = lat.rank
    lifts = []
    for i in range(n):
        if abs(s[i][i]) > 1:
            y = [int(uinv[j, i]) for j in range(n)]
            lifts.append([sum(ginv[a][c] * y[c] for c in range(n)) for a in range(n)])
    return lifts


def lift(lat: GramLattice, form: FiniteQuadraticForm, x: Vec) -> list[Q]:
    """A rational vector in L* representing x (coordinates in L's basis)."""
    lifts = dual_representatives(lat)
    n = lat.rank
    return [sum(x[i] * lifts[i][a] for i in range(len(x))) for a in range(n)]


def form_isometries(q1: FiniteQuadraticForm, q2: FiniteQuadraticForm, *, first_only: bool = False,
                    budget: int = 20000) -> list[tuple[Vec, ...]]:
    """All isometries q1 -> q2, as tuples of images of q1's generators."""
    if q1.order != q2.order:
        return []
    if q1.order > budget:
        raise BudgetExceeded(f"group of order {q1.order} exceeds budget {budget}")
    if sorted(q1.orders) != sorted(q2.orders) and _canonical_orders(q1) != _canonical_orders(q2):
        return []
    elems = list(q2.elements())
    by_order: dict[int, list[Vec]] = {}
    for x in elems:
        by_order.setdefault(q2.element_order(x), []).append(x)
    k = len(q1.orders)
    gens = [tuple(int(i == j) for j in range(k)) for i in range(k)]
    cands = [[x for x in by_order.get(q1.orders[i], []) if q2.q(x) == q1.q(gens[i])] for i in range(k)]
    out: list[tuple[Vec, ...]] = []

    def rec(i, imgs):
        if i == k:
            out.append(tuple(imgs))
            return first_only
        for x in cands[i]:
            if all(q2.b(x, imgs[j]) == q1.values[i][j] for j in range(i)):
                imgs.append(x)
                if rec(i + 1, imgs):
                    return True
                imgs.pop()
        return False

    rec(0, [])
    return out


def _canonical_orders(q: FiniteQuadraticForm) -> list[tuple[int, int]]:
    """Elementary divisors as sorted (prime power) list, to compare group structure."""
    out = []
    for d in q.orders:
        p = 2
        while d > 1:
            if d % p == 0:
                e = 1
                while d % p == 0:
                    d //= p
                    e *= p
                out.append((p, e))
            p += 1
    return sorted(out)


def forms_isometric(q1: FiniteQuadraticForm, q2: FiniteQuadraticForm, budget: int = 20000) -> bool:
    if _canonical_orders(q1) != _canonical_orders(q2):
        return False
    return bool(form_isometries(q1, q2, first_only=True, budget=budget))


def orthogonal_group_order(q: FiniteQuadraticForm, budget: int = 20000) -> int:
    return len(form_isometries(q, q, budget=budget))


# ------------------------------------------------------- basic operations


def divisibility(lat: GramLattice, x) -> int:
    if not any(x):
        raise ValueError("divisibility of the zero vector")
    return reduce(gcd, (abs(v) for v in lat.pairings(x)))


def is_primitive_sublattice(vectors: Sequence[Sequence[int]]) -> bool:
    """True iff the integer coordinate vectors span a saturated sublattice."""
    rows = [list(v) for v in vectors]
    if not rows:
        return True
    fs = invariant_factors(rows)
    if len(fs) < len(rows):
        raise ValueError("vectors are linearly dependent")
    return all(f == 1 for f in fs)


def orthogonal_complement(lat: GramLattice, vectors: Sequence[Sequence[int]]) -> list[Vec]:
    """Primitive basis of the vectors of L orthogonal to all given ones."""
    rows = [list(lat.pairings(v)) for v in vectors]
    return integer_kernel(rows, lat.rank)


def quotient_by_isotropic(lat: GramLattice, e_basis: Sequence[Vec], perp_basis: Sequence[Vec],
                          name: str = "") -> GramLattice:
    """Gram of E_perp / E for an isotropic primitive E inside its orthogonal complement."""
    perp = [list(v) for v in perp_basis]
    m = len(perp)
    # coordinates of E in the perp basis
    pm = Matrix(perp).T
    coords = []
    for e in e_basis:
        sol = pm.gauss_jordan_solve(Matrix(e))[0]
        c = [Q(int(x.p), int(x.q)) for x in sol]
        if any(x.denominator != 1 for x in c):
            raise ValueError("E is not contained in the given complement basis")
        coords.append(tuple(int(x) for x in c))
    w = unimodular_completion(coords, m)
    rest = w[len(coords):]
    vecs = [tuple(sum(r[i] * perp[i][a] for i in range(m)) for a in range(lat.rank)) for r in rest]
    return lat.sublattice(vecs, name)


@dataclass
class Overlattice:
    subgroup: tuple[Vec, ...]  # generators of H in the discriminant group
    order: int
    basis: list[list[Q]]  # basis vectors in L (x) Q coordinates
    lattice: GramLattice

    def to_json(self) -> dict:
        return {"H": [list(g) for g in self.subgroup], "order": self.order,
                "gram": [list(r) for r in self.lattice.gram]}


def isotropic_subgroups(q: FiniteQuadraticForm, budget: int = 20000, max_count: int = 100000) -> list[frozenset]:
    """All subgroups H with q|H = 0 (hence b|H = 0), including {0}."""
    if q.order > budget:
        raise BudgetExceeded(f"discriminant group of order {q.order} exceeds budget {budget}")
    iso = q.isotropic_elements()
    zero = tuple(0 for _ in q.orders)
    seen = {frozenset([zero])}
    todo = [frozenset([zero])]
    while todo:
        h = todo.pop()
        for x in iso:
            if x in h:
                continue
            if any(q.b(x, y) != 0 for y in h):
                continue
            h2 = frozenset(q.add(a, q.scale(k, x)) for a in h for k in range(q.element_order(x)))
            if all(q.q(y) == 0 for y in h2) and h2 not in seen:
                seen.add(h2)
                todo.append(h2)
                if len(seen) > max_count:
                    raise BudgetExceeded("too many isotropic subgroups")
    return sorted(seen, key=lambda h: (len(h), sorted(h)))


def subgroup_generators(q: FiniteQuadraticForm, h: frozenset) -> tuple[Vec, ...]:
    zero = tuple(0 for _ in q.orders)
    gens: list[Vec] = []
    span = frozenset([zero])
    for x in sorted(h):
        if x not in span:
            gens.append(x)
            span = q.span(gens)
    return tuple(gens)


def overlattice_from_lifts(lat: GramLattice, lifts: Sequence[Sequence[Q]], order: int,
                          gens: Sequence[Vec] = (), name: str = "") -> Overlattice:
    """The lattice generated by L and the given rational vectors (glue lifts)."""
    n = lat.rank
    den = reduce(lcm, (Q(x).denominator for v in lifts for x in v), 1)
    cols = [[den * int(i == j) for i in range(n)] for j in range(n)]
    cols += [[int(Q(x) * den) for x in v] for v in lifts]
    hnf = hermite_normal_form(Matrix(cols).T)
    basis = [[Q(int(hnf[i, j]), den) for i in range(n)] for j in range(hnf.shape[1])]
    gram = [[sum(u[a] * lat.gram[a][c] * v[c] for a in range(n) if u[a] for c in range(n) if v[c])
             for v in basis] for u in basis]
    if any(x.denominator != 1 for r in gram for x in r):
        raise ValueError("subgroup is not isotropic: overlattice not integral")
    return Overlattice(tuple(gens), order, basis, GramLattice([[int(x) for x in r] for r in gram], name))


def overlattice_from(lat: GramLattice, q: FiniteQuadraticForm, gens: Sequence[Vec], name: str = "") -> Overlattice:
    lifts = [lift(lat, q, g) for g in gens]
    return overlattice_from_lifts(lat, lifts, len(q.span(list(gens))), gens, name)


def overlattices(lat: GramLattice, budget: int = 20000, proper: bool = False) -> list[Overlattice]:
    """One even overlattice per isotropic subgroup of the discriminant form."""
    q = discriminant_form(lat)
    out = []
    for h in isotropic_subgroups(q, budget):
        if proper and len(h) == 1:
            continue
        gens = subgroup_generators(q, h)
        out.append(overlattice_from(lat, q, gens))
    return out


def coordinates_in(basis: Sequence[Sequence[Q]], v: Sequence) -> list[Q]:
    """Coordinates of v with respect to a rational basis (columns)."""
    n = len(basis)
    a = [[Q(basis[j][i]) for j in range(n)] for i in range(n)]
    inv = inverse_q(a)
    return [sum(inv[i][j] * v[j] for j in range(n)) for i in range(n)]


# ---------------------------------------------------- short vectors / LLL


def lll_reduce(gram, delta: Q = Q(3, 4)) -> tuple[list[list[int]], list[list[int]]]:
    """LLL on a positive definite Gram matrix.  Returns (T, T G T^T) with rows of T
    the reduced basis in old coordinates."""
    n = len(gram)
    g = [[Q(x) for x in r] for r in gram]
    t = [[int(i == j) for j in range(n)] for i in range(n)]

    def ip(u, v):
        return sum(u[a] * g[a][c] * v[c] for a in range(n) if u[a] for c in range(n) if v[c])

    def gso():
        mu = [[Q(0)] * n for _ in range(n)]
        bstar = [Q(0)] * n
        for i in range(n):
            for j in range(i):
                s = ip(t[i], t[j])
                for k in range(j):
                    s -= mu[j][k] * mu[i][k] * bstar[k]
                mu[i][j] = s / bstar[j]
            s = ip(t[i], t[i])
            for k in range(i):
                s -= mu[i][k] ** 2 * bstar[k]
            bstar[i] = s
        return mu, bstar

    mu, bstar = gso()
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            r = round(mu[k][j])
            if r:
                t[k] = [a - r * b for a, b in zip(t[k], t[j])]
                for l in range(j + 1):
                    mu[k][l] -= r * (mu[j][l] if l < j else 1)
        if bstar[k] >= (delta - mu[k][k - 1] ** 2) * bstar[k - 1]:
            k += 1
        else:
            t[k], t[k - 1] = t[k - 1], t[k]
            mu, bstar = gso()
            k = max(k - 1, 1)
    red = [[int(ip(u, v)) for v in t] for u in t]
    return t, red


def _ldl(gram) -> tuple[list[Q], list[list[Q]]]:
    """Positive definite G = L D L^T; returns (D, mu) with mu[i][j] = L[j][i] for j > i."""
    n = len(gram)
    a = [[Q(x) for x in r] for r in gram]
    d = [Q(0)] * n
    lo = [[Q(0)] * n for _ in range(n)]
    for i in range(n):
        s = a[i][i] - sum(lo[i][k] ** 2 * d[k] for k in range(i))
        if s <= 0:
            raise ValueError("form is not positive definite")
        d[i] = s
        for j in range(i + 1, n):
            lo[j][i] = (a[j][i] - sum(lo[j][k] * lo[i][k] * d[k] for k in range(i))) / s
    mu = [[lo[j][i] for j in range(n)] for i in range(n)]
    return d, mu


def _int_range(center: Q, radius_sq: Q) -> range:
    """Integers x with (x - center)^2 <= radius_sq."""
    if radius_sq < 0:
        return range(0)
    p, q = radius_sq.numerator, radius_sq.denominator
    r = isqrt(p * q) // q + 1
    lo = (center - r).__floor__()
    hi = (center + r).__ceil__()
    while lo <= hi and (lo - center) ** 2 > radius_sq:
        lo += 1
    while hi >= lo and (hi - center) ** 2 > radius_sq:
        hi -= 1
    return range(lo, hi + 1)


def short_vectors(gram, bound, center: Sequence | None = None, limit: int | None = None) -> Iterator[tuple[Vec, Q]]:
    """Integer x with (x - c)^T G (x - c) <= bound for positive definite G (Fincke-Pohst).

    Yields (x, value); exact rational arithmetic throughout.
    """
    n = len(gram)
    bound = Q(bound)
    c = [Q(0)] * n if center is None else [Q(v) for v in center]
    d, mu = _ldl(gram)
    x = [0] * n
    count = 0

    # level i: term d_i (y_i + sum_{j>i} mu_ij y_j)^2 with y = x - c
    def rec(i, remaining):
        nonlocal count
        shift = sum((mu[i][j] * (x[j] - c[j]) for j in range(i + 1, n)), Q(0))
        centre = c[i] - shift
        for xi in _int_range(centre, remaining / d[i]):
            x[i] = xi
            used = d[i] * (xi - centre) ** 2
            if i == 0:
                yield tuple(x), bound - (remaining - used)
                count += 1
                if limit is not None and count >= limit:
                    return
            else:
                yield from rec(i - 1, remaining - used)
                if limit is not None and count >= limit:
                    return
        x[i] = 0

    if n == 0:
        yield (), Q(0)
        return
    yield from rec(n - 1, bound)


# -------------------------------------------------------------- roots/ADE


@dataclass
class RootSystemReport:
    roots: list[Vec]
    simple: list[Vec]
    components: list[str]  # sorted ADE labels, e.g. ["E8", "D4"]

    @property
    def count(self) -> int:
        return len(self.roots)

    @property
    def label(self) -> str:
        return ade_label(self.components)

    def to_json(self) -> dict:
        return {"count": self.count, "type": self.label, "components": self.components,
                "simple_roots": [list(s) for s in self.simple]}


def _ade_sort_key(lbl: str):
    return ("EDA".index(lbl[0]), -int(lbl[1:]))


def ade_label(components: Iterable[str]) -> str:
    comps = sorted(components, key=_ade_sort_key)
    if not comps:
        return "0"
    out, i = [], 0
    while i < len(comps):
        j = i
        while j < len(comps) and comps[j] == comps[i]:
            j += 1
        out.append(comps[i] if j - i == 1 else f"{j - i}{comps[i]}")
        i = j
    return "+".join(out)


def parse_ade(text: str) -> list[str]:
    """"E7+2A1+D4" -> ["E7", "D4", "A1", "A1"] (sorted)."""
    out = []
    for term in text.replace(" ", "").split("+"):
        m = re.fullmatch(r"(\d*)([ADE])(\d+)", term)
        if not m:
            raise LatticeSpecError(f"bad ADE term {term!r}")
        k = int(m[1] or 1)
        lbl = f"{m[2]}{int(m[3])}"
        {"A": A, "D": D, "E": E}[m[2]](int(m[3]))  # validates
        out.extend([lbl] * k)
    return sorted(out, key=_ade_sort_key)


def classify_dynkin(n: int, adj: dict[int, set[int]]) -> str:
    """ADE type of a connected simply-laced tree on n nodes."""
    edges = sum(len(v) for v in adj.values()) // 2
    if edges != n - 1:
        raise ValueError("Dynkin graph is not a tree")
    degs = {v: len(adj[v]) for v in adj}
    if max(degs.values(), default=0) <= 2:
        return f"A{n}"
    branch = [v for v, k in degs.items() if k == 3]
    if len(branch) != 1 or max(degs.values()) > 3:
        raise ValueError("not an ADE diagram")
    c = branch[0]
    arms = []
    for start in adj[c]:
        length, prev, cur = 1, c, start
        while True:
            nxt = [w for w in adj[cur] if w != prev]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            length += 1
        arms.append(length)
    arms.sort()
    if arms[0] == 1 and arms[1] == 1:
        return f"D{n}"
    if arms[0] == 1 and arms[1] == 2 and arms[2] in (2, 3, 4):
        return f"E{n}"
    raise ValueError(f"not an ADE diagram: arms {arms}")


def simple_roots_and_components(lat: GramLattice, roots: Sequence[Vec]) -> tuple[list[Vec], list[str]]:
    if not roots:
        return [], []
    n = lat.rank
    # generic functional: coordinates weighted by rapidly growing integers with a fixed tilt
    big = 1 + max(abs(c) for r in roots for c in r)
    weights = [big ** i + i for i in range(n)]
    while True:
        vals = {r: sum(w * c for w, c in zip(weights, r)) for r in roots}
        if all(v != 0 for v in vals.values()):
            break
        weights = [w * 2 + 1 for w in weights]
    pos = [r for r in roots if vals[r] > 0]
    posset = set(pos)
    simple = []
    for a in pos:
        if not any(tuple(x - y for x, y in zip(a, b)) in posset for b in pos if b != a):
            simple.append(a)
    simple.sort()
    adj: dict[int, set[int]] = {i: set() for i in range(len(simple))}
    for i in range(len(simple)):
        for j in range(i + 1, len(simple)):
            p = lat.inner(simple[i], simple[j])
            if p:
                if p != 1:
                    raise ValueError("simple roots pair to a value other than 0 or 1")
                adj[i].add(j)
                adj[j].add(i)
    comps, seen = [], set()
    for s in range(len(simple)):
        if s in seen:
            continue
        stack, comp = [s], set()
        while stack:
            v = stack.pop()
            if v in comp:
                continue
            comp.add(v)
            stack.extend(adj[v] - comp)
        seen |= comp
        sub = {v: adj[v] & comp for v in comp}
        comps.append(classify_dynkin(len(comp), sub))
    return simple, sorted(comps, key=_ade_sort_key)


def roots(lat: GramLattice, norm: int = -2) -> RootSystemReport:
    """All vectors of square `norm` in a negative definite lattice, with their ADE type."""
    if lat.rank == 0:
        return RootSystemReport([], [], [])
    pos, neg = lat.signature
    if pos or neg != lat.rank:
        raise ValueError(f"{lat} is not negative definite; use the hyperbolic module")
    g = [[-x for x in r] for r in lat.gram]
    t, red = lll_reduce(g)
    found = []
    for y, val in short_vectors(red, -norm):
        if val == -norm:
            x = tuple(sum(y[i] * t[i][a] for i in range(lat.rank)) for a in range(lat.rank))
            found.append(x)
    found.sort()
    simple, comps = ([], []) if norm != -2 else simple_roots_and_components(lat, found)
    return RootSystemReport(found, simple, comps)


def root_sublattice_rank(report: RootSystemReport) -> int:
    return sum(int(c[1:]) for c in report.components)


# ------------------------------------------------------------------ genus


def in_genus(l1: GramLattice, l2: GramLattice, budget: int = 20000) -> bool:
    if l1.rank != l2.rank or l1.signature != l2.signature:
        return False
    if abs(l1.det) != abs(l2.det):
        return False
    return forms_isometric(discriminant_form(l1), discriminant_form(l2), budget)


# -------------------------------------------------------- K3 embeddings

K3_SIGNATURE = (3, 19)


@dataclass
class EmbeddingVerdict:
    verdict: str  # "yes", "no", "undetermined"
    reason: str
    complement: GramLattice | None = None

    def __bool__(self):
        return self.verdict == "yes"

    def to_json(self) -> dict:
        out = {"verdict": self.verdict, "reason": self.reason}
        if self.complement is not None:
            out["complement"] = {"name": self.complement.name,
                                 "gram": [list(r) for r in self.complement.gram]}
        return out


def _divisors(n: int) -> list[int]:
    n = abs(n)
    return [d for d in range(1, n + 1) if n % d == 0]


def binary_forms(det: int, bound: int | None = None) -> Iterator[GramLattice]:
    """Even binary forms [[2a, b], [b, 2c]] with determinant `det` and bounded entries."""
    if bound is None:
        bound = isqrt(abs(det)) + 2
    for a in range(-bound, bound + 1):
        for c in range(a, bound + 1):
            for b in range(0, 2 * bound + 1):
                if 4 * a * c - b * b == det and a != 0:
                    yield GramLattice([[2 * a, b], [b, 2 * c]], f"[[{2 * a},{b}],[{b},{2 * c}]]")


def complement_catalog(rank: int, signature: tuple[int, int], det: int) -> Iterator[GramLattice]:
    """Block sums of U, U(2), <2k>, <-2k>, small ADE lattices (either sign) and even
    binary forms, with the requested rank, signature and |det|."""
    pos, neg = signature
    blocks: list[GramLattice] = [U(), U(2)]
    for k in _divisors(det):
        if abs(det) % (2 * k) == 0:
            blocks += [rank_one(2 * k), rank_one(-2 * k)]
    for n in range(1, rank + 1):
        for f in (A,):
            blocks += [f(n), f(n).scaled(-1)]
        if n >= 4:
            blocks += [D(n), D(n).scaled(-1)]
        if n in (6, 7, 8):
            blocks += [E(n), E(n).scaled(-1)]
    seen = set()
    blocks = [b for b in blocks if b.gram not in seen and not seen.add(b.gram) and abs(det) % abs(b.det) == 0]

    def rec(start, remaining_rank, sig, d, acc):
        if remaining_rank == 0:
            if sig == (pos, neg) and abs(d) == abs(det):
                yield direct_sum(*acc)
            return
        if remaining_rank == 2:
            rest = abs(det) // abs(d) if d and abs(det) % abs(d) == 0 else None
            need = (pos - sig[0], neg - sig[1])
            if rest is not None and min(need) >= 0:
                sign = (-1) ** need[1]
                for bf in binary_forms(sign * rest):
                    if bf.signature == need:
                        yield direct_sum(*acc, bf)
        for i in range(start, len(blocks)):
            b = blocks[i]
            if b.rank > remaining_rank:
                continue
            s2 = (sig[0] + b.signature[0], sig[1] + b.signature[1])
            if s2[0] > pos or s2[1] > neg:
                continue
            d2 = d * b.det
            if abs(det) % abs(d2):
                continue
            yield from rec(i, remaining_rank - b.rank, s2, d2, acc + [b])

    yield from rec(0, rank, (0, 0), 1, [])


def embeds_primitively_K3(lat: GramLattice, budget: int = 20000, catalog_limit: int = 5000) -> EmbeddingVerdict:
    """Three-valued test for a primitive embedding into the even unimodular lattice of
    signature (3, 19)."""
    if not lat.is_even:
        return EmbeddingVerdict("no", "lattice is not even")
    pos, neg = lat.signature
    if pos > K3_SIGNATURE[0] or neg > K3_SIGNATURE[1]:
        return EmbeddingVerdict("no", f"signature ({pos},{neg}) does not fit in (3,19)")
    q = discriminant_form(lat)
    room = sum(K3_SIGNATURE) - lat.rank
    l = q.length
    if l > room:
        return EmbeddingVerdict("no", f"length obstruction: l(A) = {l} > 22 - rank = {room}")
    if lat.rank + l + 2 <= sum(K3_SIGNATURE):
        return EmbeddingVerdict("yes", f"rank {lat.rank} + l(A) {l} + 2 <= 22")
    target = q.negated()
    want = (K3_SIGNATURE[0] - pos, K3_SIGNATURE[1] - neg)
    for i, k in enumerate(complement_catalog(room, want, lat.det)):
        if i >= catalog_limit:
            break
        if not k.is_even:
            continue
        if forms_isometric(discriminant_form(k), target, budget):
            return EmbeddingVerdict("yes", f"complement {k.name} has discriminant form -q", k)
    return EmbeddingVerdict("undetermined", "no complement found in the catalog")
