"""Vinberg's algorithm, Coxeter diagrams, parabolic subdiagrams and the classes of
isotropic sublattices that index Baily-Borel boundary components.

Conventions: the lattice has signature (1, n) and a vector h with h^2 > 0.  A
root of norm class k is a primitive delta with delta^2 = -k whose pairings with
the lattice are all divisible by k/2 (so the reflection in delta is integral).
Accepted roots satisfy delta.h <= 0 and pairwise delta_i.delta_j >= 0; the
chamber is {x : x.delta <= 0 for all accepted delta}.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction as Q
from functools import reduce
from itertools import combinations
from math import gcd
from typing import Iterable, Sequence

from sympy import Matrix
from sympy.matrices.normalforms import hermite_normal_form

from .lattice import (
    E,
    M,
    M_POLARIZATION,
    U,
    FiniteQuadraticForm,
    GramLattice,
    Vec,
    det_int,
    direct_sum,
    discriminant_form,
    dual_representatives,
    divisibility,
    forms_isometric,
    form_isometries,
    in_genus,
    integer_kernel,
    inverse_q,
    lift,
    lll_reduce,
    orthogonal_complement,
    parse_lattice,
    quotient_by_isotropic,
    roots,
    short_vectors,
    smith,
)

EDGE_NONE, EDGE_SIMPLE, EDGE_DOUBLE, EDGE_TRIPLE, EDGE_INF, EDGE_DOTTED = (
    "none", "simple", "double", "triple", "inf", "dotted")


def edge_type(pairing: int, norm_i: int, norm_j: int) -> str:
    """Label from g^2 = (d_i.d_j)^2 / (d_i^2 d_j^2), the squared cosine."""
    g2 = Q(pairing * pairing, norm_i * norm_j)
    if g2 == 0:
        return EDGE_NONE
    table = {Q(1, 4): EDGE_SIMPLE, Q(1, 2): EDGE_DOUBLE, Q(3, 4): EDGE_TRIPLE, Q(1): EDGE_INF}
    if g2 in table:
        return table[g2]
    if g2 > 1:
        return EDGE_DOTTED
    raise ValueError(f"non-crystallographic angle: cos^2 = {g2}")


@dataclass
class CoxeterDiagram:
    lattice: GramLattice
    roots: list[Vec]
    heights: list[int] = field(default_factory=list)  # -delta.h per root

    @property
    def norms(self) -> list[int]:
        return [self.lattice.norm(r) for r in self.roots]

    def gram(self, nodes: Iterable[int] | None = None) -> list[list[int]]:
        idx = range(len(self.roots)) if nodes is None else list(nodes)
        return [[self.lattice.inner(self.roots[i], self.roots[j]) for j in idx] for i in idx]

    def edges(self) -> dict[tuple[int, int], str]:
        out = {}
        g = self.gram()
        for i, j in combinations(range(len(self.roots)), 2):
            t = edge_type(g[i][j], g[i][i], g[j][j])
            if t != EDGE_NONE:
                out[(i, j)] = t
        return out

    def adjacency(self) -> dict[int, dict[int, str]]:
        adj: dict[int, dict[int, str]] = {i: {} for i in range(len(self.roots))}
        for (i, j), t in self.edges().items():
            adj[i][j] = t
            adj[j][i] = t
        return adj

    def to_json(self) -> dict:
        return {
            "nodes": [{"id": i, "root": list(r), "norm": n, "height": h}
                      for i, (r, n, h) in enumerate(zip(self.roots, self.norms, self.heights))],
            "edges": [{"a": i, "b": j, "type": t} for (i, j), t in sorted(self.edges().items())],
        }

    def to_dot(self) -> str:
        style = {EDGE_SIMPLE: "", EDGE_DOUBLE: ' [label="4"]', EDGE_TRIPLE: ' [label="6"]',
                 EDGE_INF: ' [style=bold, label="inf"]', EDGE_DOTTED: " [style=dotted]"}
        lines = ["graph vinberg {"]
        for i, n in enumerate(self.norms):
            shape = "circle" if n == -2 else "doublecircle"
            lines.append(f'  {i} [shape={shape}, label="{i}"];')
        for (i, j), t in sorted(self.edges().items()):
            lines.append(f"  {i} -- {j}{style[t]};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _is_root(lat: GramLattice, v: Vec, k: int) -> bool:
    if reduce(gcd, (abs(x) for x in v)) != 1:
        return False
    step = k // 2
    return all(p % step == 0 for p in lat.pairings(v))


@dataclass
class HyperplaneSlicer:
    """Enumerates lattice vectors with a prescribed pairing against h and norm."""

    lat: GramLattice
    h: Vec

    def __post_init__(self):
        lat, h = self.lat, self.h
        self.h2 = lat.norm(h)
        p = lat.pairings(h)
        self.g = reduce(gcd, (abs(x) for x in p))
        base = integer_kernel([list(p)], lat.rank)
        neg = [[-lat.inner(u, v) for v in base] for u in base]
        t, red = lll_reduce(neg)
        self.w = [tuple(sum(t[i][a] * base[a][c] for a in range(len(base))) for c in range(lat.rank))
                  for i in range(len(base))]
        self.qv = red
        # x1 with p.x1 = g, via extended gcd along the coordinates
        x1 = [0] * lat.rank
        acc = 0
        coef = []
        for i, pi in enumerate(p):
            if pi == 0:
                continue
            if acc == 0:
                acc, coef = abs(pi), [(i, 1 if pi > 0 else -1)]
                continue
            d, s, t2 = _egcd(acc, pi)
            coef = [(j, c * s) for j, c in coef] + [(i, t2)]
            acc = d
        for i, c in coef:
            x1[i] += c
        self.x1 = x1
        # z = x1 - (g/h^2) h lies in the rational span of w; store its w-coordinates
        z = [Q(x1[i]) - Q(self.g, self.h2) * h[i] for i in range(lat.rank)]
        self.zw = _solve_in_span(self.w, z)
        self.n = lat.rank

    def vectors(self, height: int, k: int) -> list[Vec]:
        """Vectors delta with delta.h = -height and delta^2 = -k."""
        if height % self.g:
            return []
        m = height // self.g
        x0 = [-m * a for a in self.x1]
        c = [-m * z for z in self.zw]
        target = k + Q(height * height, self.h2)
        out = []
        for y, val in short_vectors(self.qv, target, center=[-x for x in c]):
            if val != target:
                continue
            v = tuple(x0[a] + sum(y[i] * self.w[i][a] for i in range(len(self.w))) for a in range(self.n))
            out.append(v)
        return sorted(out)

    def coset_vectors(self, offset: Sequence, height, bound) -> list[tuple[tuple, Q]]:
        """(v, v^2) for v in offset + L with v.h = -height and v^2 >= -bound.

        offset may be rational (a dual vector); height may then be rational too.
        """
        n = self.n
        y = [Q(c) for c in offset]
        height = Q(height)
        p = self.lat.pairings(self.h)
        s = height + sum(p[a] * y[a] for a in range(n))
        if s.denominator != 1 or int(s) % self.g:
            return []
        m = int(s) // self.g
        base = [y[a] - m * self.x1[a] for a in range(n)]
        u = [base[a] + height / self.h2 * self.h[a] for a in range(n)]
        c = _solve_in_span(self.w, u)
        shift = height * height / self.h2
        out = []
        for t, val in short_vectors(self.qv, bound + shift, center=[-x for x in c]):
            v = tuple(base[a] + sum(t[i] * self.w[i][a] for i in range(len(self.w))) for a in range(n))
            out.append((v, shift - val))
        return sorted(out)


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    if b == 0:
        return (a, 1, 0) if a >= 0 else (-a, -1, 0)
    d, s, t = _egcd(b, a % b)
    return d, t, s - (a // b) * t


def _solve_in_span(basis: Sequence[Vec], v: Sequence[Q]) -> list[Q]:
    """Coefficients c with sum c_i basis_i = v (basis independent, v in the span)."""
    k, n = len(basis), len(v)
    # normal equations B B^T c = B v
    bbt = [[sum(Q(basis[i][a]) * basis[j][a] for a in range(n)) for j in range(k)] for i in range(k)]
    bv = [sum(Q(basis[i][a]) * v[a] for a in range(n)) for i in range(k)]
    inv = inverse_q(bbt)
    c = [sum(inv[i][j] * bv[j] for j in range(k)) for i in range(k)]
    if any(sum(c[i] * basis[i][a] for i in range(k)) != v[a] for a in range(n)):
        raise ValueError("vector not in the span")
    return c


@dataclass
class VinbergResult:
    diagram: CoxeterDiagram
    stopped: bool  # True when the stop condition holds
    reason: str
    max_height: int = 0
    classes: list["ParabolicClass"] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"stopped": self.stopped, "reason": self.reason, "max_height": self.max_height,
                "diagram": self.diagram.to_json(),
                "maximal_parabolic_classes": [c.to_json() for c in self.classes]}


def vinberg(lat: GramLattice, h: Sequence[int], norm_menu: Sequence[int] = (2, 4), *,
            max_roots: int = 64, max_height: int = 40) -> VinbergResult:
    """Accept roots in increasing order of (delta.h)^2 / |delta^2| until the polyhedron
    closes (stop condition) or the budget runs out.

    norm_menu lists k for root norms -k; k > 2 roots must have divisibility k/2.
    """
    h = tuple(h)
    pos, neg = lat.signature
    if pos != 1 or neg != lat.rank - 1:
        raise ValueError(f"{lat} is not hyperbolic of signature (1, n)")
    if lat.norm(h) <= 0:
        raise ValueError("h must have positive square")
    menu = sorted(set(int(k) for k in norm_menu))
    if any(k <= 0 or k % 2 for k in menu):
        raise ValueError("root norms must be -k with k positive and even")
    diag = CoxeterDiagram(lat, [], [])
    if not menu:
        return VinbergResult(diag, False, "empty norm menu")
    sl = HyperplaneSlicer(lat, h)

    # height 0: a simple system of the finite root system orthogonal to h
    zero_roots = []
    for k in menu:
        zero_roots += [v for v in sl.vectors(0, k) if _is_root(lat, v, k)]
    if zero_roots:
        simple, _ = _simple_system(lat, zero_roots)
        diag.roots.extend(simple)
        diag.heights.extend([0] * len(simple))

    shells = sorted({(Q(n * n, k), n, k) for n in range(1, max_height + 1) for k in menu})
    keys = sorted({s[0] for s in shells})
    top = 0
    for key in keys:
        batch = []
        for kk, n, k in shells:
            if kk != key:
                continue
            for v in sl.vectors(n, k):
                if not _is_root(lat, v, k):
                    continue
                if all(lat.inner(v, r) >= 0 for r in diag.roots):
                    batch.append((n, v))
        for n, v in sorted(batch):
            for r in diag.roots:
                assert lat.inner(v, r) >= 0
            diag.roots.append(v)
            diag.heights.append(n)
            top = max(top, n)
            if len(diag.roots) > max_roots:
                return VinbergResult(diag, False, f"root budget {max_roots} exhausted", top)
        if batch:
            ok, why, classes = stop_condition(diag)
            if ok:
                return VinbergResult(diag, True, why, top, classes)
    return VinbergResult(diag, False, f"height budget {max_height} exhausted", top)


def _simple_system(lat: GramLattice, rts: list[Vec]) -> tuple[list[Vec], list[Vec]]:
    """Simple roots for a generic positivity functional; works for mixed root lengths."""
    n = lat.rank
    big = 1 + max(abs(c) for r in rts for c in r)
    weights = [big ** i + i for i in range(n)]
    val = {r: sum(w * c for w, c in zip(weights, r)) for r in rts}
    assert all(v != 0 for v in val.values())
    pos = [r for r in rts if val[r] > 0]
    posset = set(pos)
    simple = [a for a in pos
              if not any(tuple(x - y for x, y in zip(a, b)) in posset for b in pos if b != a)]
    return sorted(simple), pos


# ----------------------------------------------------------- parabolics


def _connected(nodes: frozenset, adj) -> bool:
    nodes = set(nodes)
    if not nodes:
        return False
    start = next(iter(nodes))
    seen, stack = {start}, [start]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w in nodes and w not in seen:
                seen.add(w)
                stack.append(w)
    return seen == nodes


def _det_sign(m: list[list[int]]) -> int:
    d = det_int(m)
    return (d > 0) - (d < 0)


def connected_subdiagrams(diag: CoxeterDiagram) -> tuple[list[frozenset], list[frozenset]]:
    """(connected elliptic node sets, connected parabolic node sets)."""
    adj = diag.adjacency()
    g = diag.gram()
    nv = len(diag.roots)
    elliptic, parabolic = set(), set()
    frontier = []
    for i in range(nv):
        s = frozenset([i])
        elliptic.add(s)
        frontier.append(s)
    while frontier:
        nxt = []
        for s in frontier:
            nbrs = {w for v in s for w in adj[v]} - s
            for w in nbrs:
                t = s | {w}
                if t in elliptic or t in parabolic:
                    continue
                if any(adj[a].get(b) in (EDGE_INF, EDGE_DOTTED) for a in t for b in t if a < b):
                    if len(t) == 2 and adj[min(t)][max(t)] == EDGE_INF:
                        parabolic.add(t)
                    continue
                idx = sorted(t)
                sign = _det_sign([[-g[a][b] for b in idx] for a in idx])
                if sign > 0:
                    elliptic.add(t)
                    nxt.append(t)
                elif sign == 0 and _all_proper_elliptic(t, elliptic, adj):
                    parabolic.add(t)
        frontier = nxt
    return sorted(elliptic, key=sorted), sorted(parabolic, key=sorted)


def _all_proper_elliptic(t: frozenset, elliptic: set, adj) -> bool:
    """A connected semidefinite set is affine iff every connected proper subset is elliptic."""
    for v in t:
        rest = t - {v}
        # connected components of rest must each be elliptic
        comps = []
        left = set(rest)
        while left:
            s = left.pop()
            comp, stack = {s}, [s]
            while stack:
                x = stack.pop()
                for y in adj[x]:
                    if y in left:
                        left.discard(y)
                        comp.add(y)
                        stack.append(y)
            comps.append(frozenset(comp))
        if any(c not in elliptic for c in comps):
            return False
    return True


def affine_type(diag: CoxeterDiagram, nodes: frozenset) -> str:
    """Name a connected parabolic diagram (A~, D~, E~ and the non-simply-laced ones)."""
    adj = {v: {w: t for w, t in diag.adjacency()[v].items() if w in nodes} for v in nodes}
    m = len(nodes)
    kinds = [t for v in nodes for w, t in adj[v].items() if v < w]
    if EDGE_INF in kinds:
        return "A~1"
    if EDGE_TRIPLE in kinds:
        return "G~2"
    doubles = kinds.count(EDGE_DOUBLE)
    degs = {v: len(adj[v]) for v in nodes}
    edges = len(kinds)
    if doubles == 0:
        if edges == m:
            return f"A~{m - 1}"
        if max(degs.values()) == 4:
            return "D~4"
        branch = [v for v in nodes if degs[v] == 3]
        if len(branch) == 2:
            return f"D~{m - 1}"
        if len(branch) == 1:
            c = branch[0]
            arms = []
            for s in adj[c]:
                length, prev, cur = 1, c, s
                while True:
                    nx = [w for w in adj[cur] if w != prev]
                    if not nx:
                        break
                    prev, cur = cur, nx[0]
                    length += 1
                arms.append(length)
            arms.sort()
            return {(2, 2, 2): "E~6", (1, 3, 3): "E~7", (1, 2, 5): "E~8"}.get(tuple(arms), f"?{arms}")
        return f"?{m}"
    if doubles == 2:
        return f"C~{m - 1}"
    if any(d == 3 for d in degs.values()):
        return f"B~{m - 1}"
    if m == 5:
        return "F~4"
    if m == 3:
        return "A~2'"
    return f"?double{m}"


def _affine_rank(label: str) -> int:
    digits = "".join(ch for ch in label if ch.isdigit())
    return int(digits) if digits else 0


@dataclass
class ParabolicClass:
    components: tuple[str, ...]
    examples: list[tuple[frozenset, ...]]
    rank: int

    @property
    def label(self) -> str:
        """Components joined by '+', repeats collapsed: E~7+5A~1."""
        out: list[str] = []
        for c in self.components:
            if out and out[-1][1] == c:
                out[-1][0] += 1
            else:
                out.append([1, c])
        return "+".join(c if k == 1 else f"{k}{c}" for k, c in out)

    def to_json(self) -> dict:
        return {"type": self.label, "rank": self.rank, "count": len(self.examples),
                "nodes": [[sorted(c) for c in ex] for ex in self.examples]}


def _sort_affine(labels: Iterable[str]) -> tuple[str, ...]:
    order = {"E": 0, "D": 1, "A": 2}
    return tuple(sorted(labels, key=lambda s: (order.get(s[0], 3), -_affine_rank(s), s)))


def maximal_parabolics(diag: CoxeterDiagram, rank: int, connected: list[frozenset] | None = None) -> list[tuple[frozenset, ...]]:
    """Sets of mutually orthogonal connected parabolics with total rank `rank`."""
    if connected is None:
        _, connected = connected_subdiagrams(diag)
    adj = diag.adjacency()
    ranks = [len(c) - 1 for c in connected]
    comp = [[not (a & b) and not any(y in adj[x] for x in a for y in b) for b in connected] for a in connected]
    out = []

    def rec(start, chosen, total):
        if total == rank:
            out.append(tuple(connected[i] for i in chosen))
            return
        for i in range(start, len(connected)):
            if total + ranks[i] > rank:
                continue
            if all(comp[i][j] for j in chosen):
                chosen.append(i)
                rec(i + 1, chosen, total + ranks[i])
                chosen.pop()

    rec(0, [], 0)
    return out


def parabolic_subdiagrams(diag: CoxeterDiagram, rank: int | None = None) -> list[ParabolicClass]:
    """Parabolic subdiagrams of the given rank (default rank(L) - 2), grouped by type."""
    if rank is None:
        rank = diag.lattice.rank - 2
    _, conn = connected_subdiagrams(diag)
    groups: dict[tuple[str, ...], list] = {}
    for combo in maximal_parabolics(diag, rank, conn):
        key = _sort_affine(affine_type(diag, c) for c in combo)
        groups.setdefault(key, []).append(combo)
    return [ParabolicClass(k, v, rank) for k, v in sorted(groups.items())]


def stop_condition(diag: CoxeterDiagram) -> tuple[bool, str, list[ParabolicClass]]:
    """Some parabolic of rank n-1 exists and every connected parabolic is a component
    of one; n-1 = rank(L) - 2."""
    rank = diag.lattice.rank - 2
    _, conn = connected_subdiagrams(diag)
    combos = maximal_parabolics(diag, rank, conn)
    if not combos:
        return False, "no parabolic subdiagram of maximal rank yet", []
    covered = {c for combo in combos for c in combo}
    missing = [c for c in conn if c not in covered]
    if missing:
        return False, f"{len(missing)} connected parabolic(s) not in a maximal one", []
    groups: dict[tuple[str, ...], list] = {}
    for combo in combos:
        key = _sort_affine(affine_type(diag, c) for c in combo)
        groups.setdefault(key, []).append(combo)
    classes = [ParabolicClass(k, v, rank) for k, v in sorted(groups.items())]
    return True, "every connected parabolic subdiagram lies in one of maximal rank", classes


def null_vector(diag: CoxeterDiagram, nodes: Iterable[int]) -> Vec:
    """Primitive isotropic lattice vector spanning the radical of a connected parabolic."""
    idx = sorted(nodes)
    g = diag.gram(idx)
    ker = integer_kernel(g, len(idx))
    if len(ker) != 1:
        raise ValueError("parabolic subdiagram should have a one-dimensional radical")
    c = ker[0]
    if sum(c) < 0:
        c = tuple(-x for x in c)
    lat = diag.lattice
    v = [sum(c[i] * diag.roots[idx[i]][a] for i in range(len(idx))) for a in range(lat.rank)]
    d = reduce(gcd, (abs(x) for x in v))
    v = tuple(x // d for x in v)
    if lat.norm(v) != 0:
        raise AssertionError("null vector of a parabolic subdiagram is not isotropic")
    return v


def reduce_to_chamber(diag: CoxeterDiagram, v: Sequence[int], max_steps: int = 10000) -> Vec:
    """Reflect v (in the closed positive cone, v.h > 0) into the chamber."""
    lat = diag.lattice
    v = list(v)
    for _ in range(max_steps):
        for r in diag.roots:
            p = lat.inner(v, r)
            if p > 0:
                k = -lat.norm(r)
                coef = Q(2 * p, -k)
                v = [x - coef * y for x, y in zip(v, r)]
                if any(Q(x).denominator != 1 for x in v):
                    raise AssertionError("reflection left the lattice")
                v = [int(x) for x in v]
                break
        else:
            return tuple(v)
    raise RuntimeError("chamber reduction did not converge")


# ------------------------------------------------ isotropic sublattices


def subquotient_form(q: FiniteQuadraticForm, h: Iterable[Vec]) -> FiniteQuadraticForm:
    """The finite form H_perp / H for an isotropic subgroup H."""
    h = list(h)
    k = len(q.orders)
    perp = [x for x in q.elements() if all(q.b(x, y) == 0 for y in h)]
    # lattice of integer lifts of H_perp and of H inside Z^k
    def lattice_of(elems):
        cols = [list(e) for e in elems] + [[q.orders[i] * int(i == j) for j in range(k)] for i in range(k)]
        hnf = hermite_normal_form(Matrix(cols).T)
        return [[int(hnf[i, j]) for i in range(k)] for j in range(hnf.shape[1])]

    big = lattice_of(perp)
    small = lattice_of(h)
    binv = inverse_q([[Q(big[j][i]) for j in range(k)] for i in range(k)])
    rel = [[int(sum(binv[i][a] * s[a] for a in range(k))) for i in range(k)] for s in small]
    s, u, v = smith(rel)
    # quotient Z^k / rows(rel): generators are the columns of V^{-1} images
    vinv = Matrix(v).inv()
    orders, gens = [], []
    for i in range(k):
        d = abs(s[i][i]) if i < len(s) else 0
        if d > 1:
            coords = [int(x) for x in vinv.row(i)]
            vec = [sum(coords[j] * big[j][a] for j in range(k)) for a in range(k)]
            gens.append(vec)
            orders.append(d)
    vals = [[sum(Q(gi[a]) * q.values[a][b] * gj[b] for a in range(k) for b in range(k)) for gj in gens]
            for gi in gens]
    return FiniteQuadraticForm(tuple(orders), tuple(map(tuple, vals)))


@dataclass
class IsotropicClass:
    rank: int
    representative: tuple[Vec, ...]
    subgroup: tuple[Vec, ...]  # H_E inside the discriminant group of T
    label: str
    quotient: GramLattice
    divisibility: int = 1
    contains: list[str] = field(default_factory=list)  # rank-1 labels inside a rank-2 class
    orbit_size: int = 0  # size of the +-O(q_T) orbit of H_E's generator (rank 1)
    parabolic: str = ""
    form_check: bool | None = None

    def to_json(self) -> dict:
        out = {"rank": self.rank, "label": self.label, "E": [list(v) for v in self.representative],
               "H_E": [list(x) for x in self.subgroup], "divisibility": self.divisibility,
               "quotient_det": self.quotient.det, "quotient_signature": list(self.quotient.signature)}
        if self.contains:
            out["contains"] = self.contains
        if self.parabolic:
            out["parabolic"] = self.parabolic
        if self.rank == 1:
            out["orbit_size"] = self.orbit_size
        if self.form_check is not None:
            out["discriminant_form_matches_H_E"] = self.form_check
        return out


RANK1_CATALOG = ("D8+D4+U", "E8+D4+U")
RANK2_CATALOG = ("E8+D4", "D12", "D8+D4", "E7+5A1 overlattice")


def _orbits(q: FiniteQuadraticForm, elems: list[Vec], budget: int = 20000) -> list[list[Vec]]:
    isos = form_isometries(q, q, budget=budget)
    k = len(q.orders)

    def apply(phi, x):
        out = tuple(0 for _ in range(k))
        for i, xi in enumerate(x):
            out = q.add(out, q.scale(xi, phi[i]))
        return out

    left = set(elems)
    orbits = []
    for x in sorted(elems):
        if x not in left:
            continue
        orb = {apply(phi, x) for phi in isos}
        orb |= {q.scale(-1, y) for y in orb}
        orbits.append(sorted(orb))
        left -= orb
    return orbits


def _split_hyperbolic_plane(t: GramLattice) -> tuple[int, int]:
    """Indices (u1, u2) of a basis pair spanning a U summand."""
    g = t.gram
    for i in range(t.rank):
        for j in range(t.rank):
            if i != j and g[i][i] == 0 and g[j][j] == 0 and g[i][j] == 1:
                if all(g[i][c] == 0 for c in range(t.rank) if c not in (i, j)) and \
                        all(g[j][c] == 0 for c in range(t.rank) if c not in (i, j)):
                    return i, j
    raise ValueError("no U summand found in the given basis")


def _label_definite(quo: GramLattice, catalog: Sequence[str]) -> str:
    """Root type of a negative definite quotient; a root type that is not the whole
    lattice (finite index) is reported as an overlattice of its root lattice."""
    rep = roots(quo)
    root_lattice_det = abs(parse_lattice(rep.label).det) if rep.components else 1
    if root_lattice_det == abs(quo.det):
        return rep.label
    return f"{rep.label} overlattice"


def _label_by_genus(lat: GramLattice, catalog: Sequence[str]) -> str:
    for name in catalog:
        if in_genus(lat, parse_lattice(name)):
            return name
    return "?"


def isotropic_rank1_classes(t: GramLattice, catalog: Sequence[str] = RANK1_CATALOG) -> list[IsotropicClass]:
    """Primitive isotropic vectors up to O(T), via isotropic elements of q_T up to +-O(q_T).

    Surjectivity of O(T) -> O(q_T) for T with two hyperbolic summands is assumed.
    Each class is realized by an explicit primitive isotropic e and labeled by the
    genus of e_perp / e (indefinite and unique in its genus here).
    """
    q = discriminant_form(t)
    iso = q.isotropic_elements(nonzero=False)
    u1, u2 = _split_hyperbolic_plane(t)
    out = []
    for orb in _orbits(q, iso):
        x = orb[0]
        if not any(x):
            e = tuple(int(i == u1) for i in range(t.rank))
        else:
            y = lift(t, q, x)
            # a lift orthogonal to the U summand: drop its U coordinates
            y = [Q(0) if i in (u1, u2) else c for i, c in enumerate(y)]
            m = Q(sum(y[a] * t.gram[a][b] * y[b] for a in range(t.rank) for b in range(t.rank)), 2)
            f = [c for c in y]
            f[u1] -= m
            f[u2] += 1
            e = tuple(int(2 * c) for c in f)
            d = reduce(gcd, (abs(c) for c in e))
            e = tuple(c // d for c in e)
        assert t.norm(e) == 0
        perp = orthogonal_complement(t, [e])
        quo = quotient_by_isotropic(t, [e], perp)
        label = _label_by_genus(quo, catalog)
        div = divisibility(t, e)
        sub = tuple(sorted({q.scale(k, x) for k in range(q.element_order(x))}))
        check = forms_isometric(discriminant_form(quo), subquotient_form(q, sub))
        out.append(IsotropicClass(1, (e,), sub, label, quo, div, form_check=check, orbit_size=len(orb)))
    return out


def boundary_model():
    """N = M + E8 (isometric to E8+D4+U(2)) with the polarization h, and T = N + U."""
    n = direct_sum(M(), E(8))
    h = M_POLARIZATION + (0,) * 8
    t = direct_sum(n, U())
    return n, h, t


def isotropic_rank2_classes(n: GramLattice, h: Sequence[int], t: GramLattice | None = None,
                            norm_menu: Sequence[int] = (2, 4), catalog: Sequence[str] = RANK2_CATALOG,
                            rank1_catalog: Sequence[str] = RANK1_CATALOG, max_height: int = 40) -> tuple[list[IsotropicClass], VinbergResult]:
    """Rank-2 isotropic E in T = N + U, from maximal parabolic subdiagrams of N.

    E = <f, u> for the null vector f of a parabolic class and u isotropic in U, so
    E_perp / E = f_perp_N / f.  Classes are deduplicated by (H_E order, label).
    """
    res = vinberg(n, h, norm_menu, max_height=max_height)
    if not res.stopped:
        raise RuntimeError(f"Vinberg did not reach the stop condition: {res.reason}")
    if t is None:
        t = direct_sum(n, U())
    qt = discriminant_form(t)
    out: dict[tuple, IsotropicClass] = {}
    for cls in res.classes:
        combo = cls.examples[0]
        f = null_vector(res.diagram, combo[0])
        for c in combo[1:]:
            g = null_vector(res.diagram, c)
            if g != f:
                raise AssertionError("components of a parabolic subdiagram give different cusps")
        perp = orthogonal_complement(n, [f])
        quo = quotient_by_isotropic(n, [f], perp)
        label = _label_definite(quo, catalog)
        div = divisibility(n, f)
        # isotropic vectors in E = <f, u>: div(a f + b u) = gcd(a div(f), b)
        contains = [rank1_catalog[0]]
        if div == 2:
            contains.append(rank1_catalog[1])
        ft = tuple(f) + (0, 0)
        sub = ()
        if div > 1:
            y = [Q(c, div) for c in ft]
            # class of f/div in A_T: coordinates with respect to the generators
            sub = _class_of(t, qt, y)
        key = (div, label)
        if key not in out:
            check = forms_isometric(discriminant_form(quo), subquotient_form(qt, _subgroup(qt, sub)))
            out[key] = IsotropicClass(2, (ft, (0,) * n.rank + (1, 0)), _subgroup(qt, sub), label, quo, div,
                                      contains, parabolic=cls.label, form_check=check)
    return sorted(out.values(), key=lambda c: c.label), res


def _subgroup(q: FiniteQuadraticForm, x) -> tuple[Vec, ...]:
    zero = tuple(0 for _ in q.orders)
    if not x:
        return (zero,)
    return tuple(sorted({q.scale(k, x) for k in range(q.element_order(x))}))


def _class_of(lat: GramLattice, q: FiniteQuadraticForm, y: Sequence[Q]) -> Vec:
    """Element of the discriminant group represented by the dual vector y."""
    lifts = dual_representatives(lat)
    for x in q.elements():
        v = [sum(x[i] * lifts[i][a] for i in range(len(x))) for a in range(lat.rank)]
        diff = [Q(y[a]) - v[a] for a in range(lat.rank)]
        if all(c.denominator == 1 for c in diff):
            return x
    raise ValueError("vector is not in the dual lattice")
