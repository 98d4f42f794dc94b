"""K3-side checks: which ADE configurations occur on nearby K3 fibers, the boundary
stratification lattices, and the split of roots orthogonal to h into those at
infinity and finite ones.

The reference lattice is M (basis l', e1..e5) with polarization h = 2l' + e1 + ... + e5.
A configuration R occurs iff some overlattice N of M + R keeps M primitive, has
root system R + 5A1 inside <h>_perp, and embeds primitively into the K3 lattice.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction as Q
from functools import lru_cache
from itertools import permutations
from typing import Sequence

from .hyperbolic import HyperplaneSlicer
from .lattice import (
    A,
    BudgetExceeded,
    D,
    E,
    EmbeddingVerdict,
    FiniteQuadraticForm,
    GramLattice,
    Overlattice,
    M,
    M_POLARIZATION,
    Vec,
    ade_label,
    classify_dynkin,
    coordinates_in,
    direct_sum,
    discriminant_form,
    dual_representatives,
    embeds_primitively_K3,
    in_genus,
    invariant_factors,
    is_primitive_sublattice,
    orthogonal_complement,
    overlattice_from_lifts,
    parse_ade,
    parse_lattice,
    roots,
    short_vectors,
)

MILNOR_CAP = 16
K3_RANK = 22


# ------------------------------------------------------------------ roots


@dataclass(frozen=True)
class RootClass:
    """A norm -2 vector of an ambient lattice containing M, with h and e1..e5 given
    as coordinate vectors of that ambient."""

    vector: Vec
    ambient: GramLattice
    h: Vec
    e: tuple[Vec, ...]


def classify_root(delta: RootClass) -> str:
    """"infinity" if delta pairs non-trivially with some e_i, else "finite"."""
    lat, v = delta.ambient, delta.vector
    if lat.norm(v) != -2:
        raise ValueError(f"not a root: square {lat.norm(v)}")
    if lat.inner(v, delta.h) != 0:
        raise ValueError("root is not orthogonal to h")
    return "infinity" if any(lat.inner(v, e) for e in delta.e) else "finite"


def root_class_in_M(vector: Sequence[int]) -> RootClass:
    """Convenience wrapper for vectors of M itself (basis l', e1..e5)."""
    e = tuple(tuple(int(i == j) for i in range(6)) for j in range(1, 6))
    return RootClass(tuple(vector), M(), M_POLARIZATION, e)


# ------------------------------------------------------- configurations


@dataclass(frozen=True)
class SingularityConfig:
    components: tuple[str, ...]  # sorted ADE labels, repeated for multiplicity

    def __post_init__(self):
        if self.rank > MILNOR_CAP:
            raise ValueError(f"total Milnor number {self.rank} exceeds the cap {MILNOR_CAP}")

    @classmethod
    def parse(cls, text: str) -> "SingularityConfig":
        return cls(tuple(parse_ade(text)))

    @property
    def rank(self) -> int:
        return sum(int(c[1:]) for c in self.components)

    @property
    def label(self) -> str:
        return ade_label(self.components)

    def component_lattices(self) -> list[GramLattice]:
        return [{"A": A, "D": D, "E": E}[c[0]](int(c[1:])) for c in self.components]

    def lattice(self) -> GramLattice:
        return direct_sum(*self.component_lattices())


@dataclass
class _Block:
    """One orthogonal summand of M + R, with its discriminant coordinates."""

    name: str
    lattice: GramLattice
    form: FiniteQuadraticForm
    lifts: list[list[Q]]
    offset: int  # first lattice coordinate
    start: int  # first discriminant coordinate

    @property
    def stop(self) -> int:
        return self.start + len(self.form.orders)

    def lift(self, x: Vec) -> list[Q]:
        n = self.lattice.rank
        return [sum((x[i] * self.lifts[i][a] for i in range(len(x))), Q(0)) for a in range(n)]


class _GlueProblem:
    """Discriminant data of M + R_1 + ... + R_s as an explicit orthogonal sum."""

    def __init__(self, config: SingularityConfig):
        self.config = config
        parts = [("M", M())] + list(zip(config.components, config.component_lattices()))
        self.blocks: list[_Block] = []
        off = start = 0
        for name, lat in parts:
            f = discriminant_form(lat)
            self.blocks.append(_Block(name, lat, f, dual_representatives(lat), off, start))
            off += lat.rank
            start += len(f.orders)
        self.lattice = direct_sum(*(b.lattice for b in self.blocks))
        form = self.blocks[0].form
        for b in self.blocks[1:]:
            form = form + b.form
        self.form = form
        self.zero = tuple(0 for _ in form.orders)
        self.h = tuple(M_POLARIZATION) + (0,) * (self.lattice.rank - 6)
        self._norms_cache: dict = {}
        self._admissible: dict[Vec, bool] = {}
        self._q_cache: dict = {}
        self._mmin_cache: dict = {}
        self._m_norms = self._coset_norms_M()
        self._m_perms = self._m_symmetries()

    def part(self, x: Vec, b: _Block) -> Vec:
        return tuple(x[b.start:b.stop])

    def lift(self, x: Vec) -> list[Q]:
        out = []
        for b in self.blocks:
            out += b.lift(self.part(x, b))
        return out

    # norms in [-2, 0] realized in a coset, per summand
    def _coset_norms_M(self) -> dict[Vec, frozenset]:
        b = self.blocks[0]
        sl = HyperplaneSlicer(b.lattice, M_POLARIZATION)
        return {x: frozenset(n for _, n in sl.coset_vectors(b.lift(x), 0, 2)) for x in b.form.elements()}

    def _coset_norms_R(self, b: _Block, x: Vec) -> frozenset:
        key = (b.name, x)
        if key not in self._norms_cache:
            neg = [[-c for c in r] for r in b.lattice.gram]
            y = b.lift(x)
            self._norms_cache[key] = frozenset(-v for _, v in short_vectors(neg, 2, center=[-c for c in y]))
        return self._norms_cache[key]

    def admissible(self, x: Vec) -> bool:
        """x may lie in H: isotropic, nonzero R-part, and its coset adds no root orthogonal to h."""
        if x not in self._admissible:
            self._admissible[x] = self._check_admissible(x)
        return self._admissible[x]

    def q(self, x: Vec) -> Q:
        """q(x) summed blockwise, with per-block memoization."""
        total = Q(0)
        for b in self.blocks:
            key = (b.name, self.part(x, b))
            if key not in self._q_cache:
                self._q_cache[key] = b.form.q(key[1])
            total += self._q_cache[key]
        return total % 2

    def _check_admissible(self, x: Vec) -> bool:
        if self.q(x) != 0:
            return False
        if not any(x[self.blocks[0].stop:]):
            return False
        sums = set(self._m_norms[self.part(x, self.blocks[0])])
        for b in self.blocks[1:]:
            sums = {s + t for s in sums for t in self._coset_norms_R(b, self.part(x, b)) if s + t >= -2}
        return -2 not in sums

    # permutations of e1..e5 fix h and act on A_M
    def _m_symmetries(self) -> list[dict[Vec, Vec]]:
        b = self.blocks[0]
        elems = list(b.form.elements())
        lifts = {x: b.lift(x) for x in elems}
        out = []
        for p in permutations(range(1, 6)):
            perm = (0,) + p
            img = {}
            for x in elems:
                y = lifts[x]
                z = [y[perm.index(i)] for i in range(6)]
                for x2 in elems:
                    if all((z[a] - lifts[x2][a]).denominator == 1 for a in range(6)):
                        img[x] = x2
                        break
                else:
                    raise AssertionError("permutation does not preserve the dual lattice")
            out.append(img)
        return out

    def extend(self, h: frozenset, x: Vec) -> frozenset:
        """The subgroup generated by h and x."""
        orders = self.form.orders
        mult = [self.form.scale(k, x) for k in range(self.form.element_order(x))]
        return frozenset(tuple((u + v) % d for u, v, d in zip(a, m, orders)) for a in h for m in mult)

    def _min_m_images(self, mparts: tuple) -> tuple:
        if mparts not in self._mmin_cache:
            self._mmin_cache[mparts] = min(tuple(p[m] for m in mparts) for p in self._m_perms)
        return self._mmin_cache[mparts]

    # canonical form of a subgroup under the permutations of e1..e5 and of equal R summands
    def _label(self, x: Vec) -> tuple:
        m = self.part(x, self.blocks[0])
        morbit = self._min_m_images((m,))
        by_type: dict[str, list] = {}
        for b in self.blocks[1:]:
            by_type.setdefault(b.name, []).append(self.part(x, b))
        return (morbit, tuple(sorted((k, tuple(sorted(v))) for k, v in by_type.items())))

    def canonical(self, h: frozenset) -> tuple:
        labels = {x: self._label(x) for x in h}
        best = None

        def leaf(gens):
            mpart = self._min_m_images(tuple(self.part(g, self.blocks[0]) for g in gens))
            cols: dict[str, list] = {}
            for b in self.blocks[1:]:
                cols.setdefault(b.name, []).append(tuple(self.part(g, b) for g in gens))
            return (len(gens), mpart, tuple(sorted((k, tuple(sorted(v))) for k, v in cols.items())))

        def rec(gens, span):
            nonlocal best
            if len(span) == len(h):
                key = leaf(gens)
                if best is None or key < best:
                    best = key
                return
            rest = [x for x in h if x not in span]
            low = min(labels[x] for x in rest)
            for x in rest:
                if labels[x] == low:
                    rec(gens + [x], self.extend(span, x))

        rec([], frozenset([self.zero]))
        return best

    def admissible_subgroups(self, max_orbits: int = 5000) -> list[frozenset]:
        """One subgroup per orbit, all of whose nonzero elements are admissible."""
        f = self.form
        orders = f.orders
        cand = [x for x in f.elements() if x != self.zero and self.admissible(x)]
        start = frozenset([self.zero])
        reps = {self.canonical(start): start}
        frontier = [start]
        while frontier:
            nxt = []
            for h in frontier:
                tried = set()
                for x in cand:
                    neg = f.scale(-1, x)
                    if x in h:
                        continue
                    # cheap necessary test on the coset h + x before building the span
                    if not all(self.admissible(tuple((u + v) % d for u, v, d in zip(a, x, orders)))
                               for a in h if a != neg):
                        continue
                    h2 = self.extend(h, x)
                    if h2 in tried:
                        continue
                    tried.add(h2)
                    if not all(y == self.zero or self.admissible(y) for y in h2):
                        continue
                    key = self.canonical(h2)
                    if key not in reps:
                        reps[key] = h2
                        nxt.append(h2)
                        if len(reps) > max_orbits:
                            raise BudgetExceeded(f"more than {max_orbits} subgroup orbits")
            frontier = nxt
        return [reps[k] for k in sorted(reps)]


@dataclass
class Candidate:
    generators: tuple[Vec, ...]
    order: int
    status: str  # "pass", "length", "primitivity", "roots", "embedding", "undetermined"
    reason: str
    lattice: GramLattice | None = None
    embedding: EmbeddingVerdict | None = None
    root_type: str = ""
    basis: list[list[Q]] | None = field(default=None, repr=False)  # N inside (M + R) (x) Q

    def to_json(self, gram: bool = False) -> dict:
        out = {"H": [list(g) for g in self.generators], "order": self.order,
               "status": self.status, "reason": self.reason}
        if self.root_type:
            out["root_type"] = self.root_type
        if self.embedding is not None:
            out["embedding"] = self.embedding.to_json()
        if gram and self.lattice is not None:
            out["gram"] = [list(r) for r in self.lattice.gram]
        return out


@dataclass
class OccurrenceReport:
    config: SingularityConfig
    verdict: str  # "yes", "no", "undetermined"
    certificate: Candidate | None
    trace: list[Candidate] = field(default_factory=list)
    glue_orders: tuple[int, ...] = ()

    def __bool__(self):
        return self.verdict == "yes"

    @property
    def passing(self) -> list[Candidate]:
        return [c for c in self.trace if c.status == "pass"]

    def to_json(self) -> dict:
        return {
            "config": self.config.label,
            "verdict": self.verdict,
            "discriminant_orders": list(self.glue_orders),
            "certificate": None if self.certificate is None else self.certificate.to_json(gram=True),
            "passing_orbits": len(self.passing),
            "trace": [c.to_json() for c in self.trace],
        }


def _generators(form: FiniteQuadraticForm, h: frozenset) -> tuple[Vec, ...]:
    gens: list[Vec] = []
    span = frozenset([tuple(0 for _ in form.orders)])
    for x in sorted(h):
        if x not in span:
            gens.append(x)
            span = form.span(gens)
    return tuple(gens)


def _length(gram) -> int:
    fs = [f for f in invariant_factors(gram) if abs(f) > 1]
    best = 0
    primes = {p for f in fs for p in _prime_factors(abs(f))}
    for p in primes:
        best = max(best, sum(1 for f in fs if f % p == 0))
    return best


def _prime_factors(n: int) -> set[int]:
    out, p = set(), 2
    while p * p <= n:
        while n % p == 0:
            out.add(p)
            n //= p
        p += 1
    if n > 1:
        out.add(n)
    return out


def _check_candidate(prob: _GlueProblem, over: Overlattice, gens: tuple[Vec, ...], h: frozenset,
                     budget: int) -> Candidate:
    lat = prob.lattice
    n = over.lattice
    room = K3_RANK - n.rank
    length = _length(n.gram)
    if length > room:
        return Candidate(gens, len(h), "length",
                         f"length obstruction: l(A_N) = {length} > 22 - rank = {room}", n)
    # M spans the first six coordinates of M + R
    m_coords = [coordinates_in(over.basis, [int(i == j) for i in range(lat.rank)]) for j in range(6)]
    if any(c.denominator != 1 for v in m_coords for c in v):
        raise AssertionError("M is not contained in the overlattice")
    if not is_primitive_sublattice([[int(c) for c in v] for v in m_coords]):
        return Candidate(gens, len(h), "primitivity", "M is not primitive in N", n)
    h_n = [int(c) for c in coordinates_in(over.basis, prob.h)]
    perp = orthogonal_complement(n, [h_n])
    rts = roots(n.sublattice(perp))
    want = ade_label(list(prob.config.components) + ["A1"] * 5)
    if rts.label != want:
        return Candidate(gens, len(h), "roots", f"roots of <h>_perp are {rts.label}, expected {want}",
                         n, root_type=rts.label)
    emb = embeds_primitively_K3(n, budget)
    if emb.verdict == "yes":
        return Candidate(gens, len(h), "pass", emb.reason, n, emb, rts.label)
    status = "embedding" if emb.verdict == "no" else "undetermined"
    return Candidate(gens, len(h), status, emb.reason, n, emb, rts.label)


def _evaluate(prob: _GlueProblem, h: frozenset, budget: int) -> Candidate:
    gens = _generators(prob.form, h)
    over = overlattice_from_lifts(prob.lattice, [prob.lift(g) for g in gens], len(h))
    cand = _check_candidate(prob, over, gens, h, budget)
    cand.basis = over.basis
    return cand


def config_occurs(config: SingularityConfig | str, budget: int = 20000, max_orbits: int = 5000) -> OccurrenceReport:
    """Test every overlattice of M + R, one per symmetry orbit of glue subgroups.

    Glue elements whose cosets contain a norm -2 vector orthogonal to h (new roots)
    or whose R-part vanishes (M not primitive) are excluded while the subgroups are
    enumerated; every surviving candidate is then re-checked from its lattice.
    """
    if isinstance(config, str):
        config = SingularityConfig.parse(config)
    prob = _GlueProblem(config)
    if prob.form.order > budget * 1000:
        raise BudgetExceeded(f"discriminant group of order {prob.form.order} is too large")
    trace = [_evaluate(prob, h, budget) for h in prob.admissible_subgroups(max_orbits)]
    passing = [c for c in trace if c.status == "pass"]
    if passing:
        verdict, cert = "yes", passing[0]
    elif any(c.status == "undetermined" for c in trace):
        verdict, cert = "undetermined", None
    else:
        verdict, cert = "no", None
    return OccurrenceReport(config, verdict, cert, trace, prob.form.orders)


# ------------------------------------------------------ deformations


@lru_cache(maxsize=None)
def _dynkin_edges(label: str) -> tuple[int, tuple[tuple[int, int], ...]]:
    lat = {"A": A, "D": D, "E": E}[label[0]](int(label[1:]))
    n = lat.rank
    return n, tuple((i, j) for i in range(n) for j in range(i + 1, n) if lat.gram[i][j])


@lru_cache(maxsize=None)
def subdiagram_types(label: str) -> frozenset[tuple[str, ...]]:
    """Root types of all full subdiagrams of one Dynkin diagram (including the empty one)."""
    n, edges = _dynkin_edges(label)
    out = set()
    for mask in range(1 << n):
        nodes = [i for i in range(n) if mask >> i & 1]
        adj = {i: set() for i in nodes}
        for i, j in edges:
            if i in adj and j in adj:
                adj[i].add(j)
                adj[j].add(i)
        comps, seen = [], set()
        for s in nodes:
            if s in seen:
                continue
            stack, comp = [s], set()
            while stack:
                v = stack.pop()
                if v not in comp:
                    comp.add(v)
                    stack.extend(adj[v] - comp)
            seen |= comp
            comps.append(classify_dynkin(len(comp), {v: adj[v] for v in comp}))
        out.add(tuple(sorted(comps)))
    return frozenset(out)


def is_deformation(big: SingularityConfig, small: SingularityConfig) -> bool:
    """True iff `small` is a union of full subdiagrams, one from each component of `big`."""
    reachable = {()}
    for comp in big.components:
        reachable = {tuple(sorted(r + s)) for r in reachable for s in subdiagram_types(comp)}
    return tuple(sorted(small.components)) in reachable


@dataclass
class MonotonicityCheck:
    config: str
    deformation: str
    config_verdict: str
    deformation_verdict: str

    @property
    def consistent(self) -> bool:
        return not (self.config_verdict == "yes" and self.deformation_verdict != "yes")

    def to_json(self) -> dict:
        return {"config": self.config, "deformation": self.deformation,
                "config_verdict": self.config_verdict,
                "deformation_verdict": self.deformation_verdict, "consistent": self.consistent}


def deformation_monotonicity(config: SingularityConfig | str, deformation: SingularityConfig | str,
                             budget: int = 20000) -> MonotonicityCheck:
    """Run the occurrence test on both; occurrence of `config` must imply that of `deformation`."""
    big = SingularityConfig.parse(config) if isinstance(config, str) else config
    small = SingularityConfig.parse(deformation) if isinstance(deformation, str) else deformation
    if not is_deformation(big, small):
        raise ValueError(f"{small.label} is not a union of subdiagrams of {big.label}")
    v1 = config_occurs(big, budget).verdict
    v2 = v1 if small == big else config_occurs(small, budget).verdict
    return MonotonicityCheck(big.label, small.label, v1, v2)


# ---------------------------------------------------- stratification


@dataclass(frozen=True)
class StratumRecord:
    index: int
    t: Q
    singularity: str
    lattice_spec: str
    codimension: int
    specializes_to: tuple[int, ...]

    def lattice(self) -> GramLattice:
        return parse_lattice(self.lattice_spec)

    def to_json(self) -> dict:
        return {"index": self.index, "t": str(self.t), "singularity": self.singularity,
                "lattice": self.lattice_spec, "codimension": self.codimension,
                "specializes_to": list(self.specializes_to)}


STRATA: tuple[StratumRecord, ...] = (
    StratumRecord(1, Q(10, 7), "D10", "T(2,3,8)", 5, (2, 3)),
    StratumRecord(2, Q(8, 5), "D8+A1", "T(2,4,6)", 4, (5, 6)),
    StratumRecord(3, Q(5, 3), "A9", "T(2,5,5)", 4, (5,)),
    StratumRecord(4, Q(7, 4), "E7+2A1", "E8+U", 4, (6,)),
    StratumRecord(5, Q(13, 7), "A7+A1", "T(3,4,4)", 3, (7,)),
    StratumRecord(6, Q(2), "D6+2A1", "E7+U", 3, (7,)),
    StratumRecord(7, Q(11, 5), "A5+2A1", "E6+U", 2, ()),
)

# T(2,3,8) with basis l', e1..e10: the chain l' - e9 - e8 - ... - e1 and e10 attached to e8
T238_NAMES = ("l'",) + tuple(f"e{i}" for i in range(1, 11))
_T238_EDGES = [(0, 9)] + [(i, i + 1) for i in range(1, 9)] + [(8, 10)]


def t238_named() -> GramLattice:
    g = [[-2 if i == j else 0 for j in range(11)] for i in range(11)]
    for i, j in _T238_EDGES:
        g[i][j] = g[j][i] = 1
    return GramLattice(g, "T(2,3,8)")


def _vec(**coef) -> Vec:
    v = [0] * 11
    for name, c in coef.items():
        v[T238_NAMES.index("l'" if name == "l" else name)] += c
    return tuple(v)


def _twice(*names: str) -> dict:
    return {n: 2 for n in names}


# images of l', e1, ..., e5
T238_EMBEDDING: tuple[Vec, ...] = (
    _vec(l=1),
    _vec(e1=1, **_twice("e2", "e3", "e4", "e5", "e6", "e7", "e8"), e9=1, e10=1),
    _vec(e3=1, **_twice("e4", "e5", "e6", "e7", "e8"), e9=1, e10=1),
    _vec(e5=1, **_twice("e6", "e7", "e8"), e9=1, e10=1),
    _vec(e7=1, e8=2, e9=1, e10=1),
    _vec(e9=1),
)


@dataclass
class StratumCheck:
    record: StratumRecord
    checks: dict[str, bool]
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        return {"row": self.record.to_json(), "ok": self.ok, "checks": self.checks, "notes": self.notes}


def verify_stratum(record: StratumRecord) -> StratumCheck:
    lat = record.lattice()
    checks = {"codimension = rank - 6": record.codimension == lat.rank - 6}
    notes = [f"rank {lat.rank}"]
    by_index = {r.index: r for r in STRATA}
    for j in record.specializes_to:
        other = by_index[j].lattice()
        checks[f"rank drops along ({record.index}) -> ({j})"] = other.rank < lat.rank
    if record.lattice_spec == "T(2,3,8)":
        t = t238_named()
        checks["named basis is T(2,3,8)"] = in_genus(t, lat)
        m = M()
        imgs = T238_EMBEDDING
        checks["Gram of M preserved"] = all(
            t.inner(imgs[i], imgs[j]) == m.gram[i][j] for i in range(6) for j in range(i, 6))
        checks["image primitive"] = is_primitive_sublattice(imgs)
        jh = tuple(sum(M_POLARIZATION[i] * imgs[i][a] for i in range(6)) for a in range(11))
        rts = roots(t.sublattice(orthogonal_complement(t, [jh])))
        checks[f"roots of <j(h)>_perp are {record.singularity}"] = rts.label == record.singularity
        notes.append(f"<j(h)>_perp root type {rts.label}")
    return StratumCheck(record, checks, notes)


def verify_strata() -> list[StratumCheck]:
    return [verify_stratum(r) for r in STRATA]


# ---------------------------------------------------------- discriminant


def discriminant_bidegree(d: int) -> tuple[int, int]:
    """Bidegree of the discriminant of degree-d curve plus line pairs: (2(d-1), d(d-1))."""
    if d < 2:
        raise ValueError("degree must be at least 2")
    return 2 * (d - 1), d * (d - 1)
