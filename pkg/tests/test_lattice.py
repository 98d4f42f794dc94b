import random
from fractions import Fraction as Q
from itertools import permutations

import pytest

import oracles
from vgitlat.lattice import (
    A,
    D,
    E,
    M,
    M_POLARIZATION,
    T,
    U,
    BudgetExceeded,
    GramLattice,
    LatticeSpecError,
    det_int,
    direct_sum,
    discriminant_form,
    divisibility,
    embeds_primitively_K3,
    form_isometries,
    forms_isometric,
    in_genus,
    is_primitive_sublattice,
    isotropic_subgroups,
    lll_reduce,
    m_d4_u2_basis,
    orthogonal_complement,
    orthogonal_group_order,
    overlattices,
    parse_lattice,
    rank_one,
    roots,
    short_vectors,
)

H = M_POLARIZATION
F = [tuple(H[a] - int(a == i) for a in range(6)) for i in range(1, 6)]  # f_i = h - e_i


def test_constructor_basics():
    u = U()
    assert u.det == -1 and u.signature == (1, 1)
    m = M()
    assert m.norm(H) == 2 and m.inner(H, (1, 0, 0, 0, 0, 0)) == 1
    assert all(m.inner(H, tuple(int(a == i) for a in range(6))) == 0 for i in range(1, 6))
    assert abs(m.det) == 16 and m.signature == (1, 5)
    assert T(2, 3, 8).rank == 11 and T(2, 3, 8).signature == (1, 10)
    assert T(2, 3, 5).signature == (0, 8) and abs(T(2, 3, 5).det) == 1
    assert parse_lattice("E8+D4+U(2)").rank == 14
    assert parse_lattice("10A1").gram == direct_sum(*[A(1)] * 10).gram
    assert parse_lattice("<-4>").gram == ((-4,),)
    assert parse_lattice("[[0,1],[1,0]]").gram == U().gram


@pytest.mark.parametrize("spec,col", [("E8+", 4), ("Q5", 1), ("2A1+X", 5)])
def test_parse_errors_report_column(spec, col):
    with pytest.raises(LatticeSpecError, match=f"column {col}"):
        parse_lattice(spec)


def test_constructor_errors():
    for bad in (lambda: A(0), lambda: D(3), lambda: E(9), lambda: T(0, 2, 3)):
        with pytest.raises(LatticeSpecError):
            bad()
    with pytest.raises(LatticeSpecError):
        GramLattice([[1, 2], [3, 4]])
    with pytest.raises(ValueError):
        discriminant_form(GramLattice([[0, 0], [0, -2]]))


def test_discriminant_examples():
    q = discriminant_form(M())
    assert sorted(q.orders) == [2, 2, 2, 2]
    assert len(q.isotropic_elements()) == 5
    assert discriminant_form(A(12)).orders == (13,)
    assert discriminant_form(E(8)).order == 1


def test_m_isotropic_classes_are_f_i_halves():
    m = M()
    q = discriminant_form(m)
    want = sorted(oracles.discriminant_by_dual(m.gram, 2).items())
    assert len(want) == 16 and sum(1 for _, v in want if v == 0) == 6
    # f_i / 2 is in M* and isotropic mod 2Z
    for f in F:
        assert divisibility(m, f) == 2
        assert Q(m.norm(f), 4) % 2 == 0
    assert sorted(q.q(x) for x in q.elements()) == sorted(v for _, v in want)


@pytest.mark.parametrize("spec,residues", [("U(2)", 2), ("M", 2), ("A2", 3), ("D4", 2), ("A1+A3", 4),
                                           ("<-6>", 6), ("D5", 4)])
def test_discriminant_form_against_dual_lattice(spec, residues):
    lat = parse_lattice(spec)
    q = discriminant_form(lat)
    brute = oracles.discriminant_by_dual(lat.gram, residues)
    assert q.order == abs(lat.det) == len(brute)
    assert sorted(q.q(x) for x in q.elements()) == sorted(brute.values())


def test_divisibility_examples():
    m = M()
    assert all(divisibility(m, f) == 2 for f in F)
    assert divisibility(m, H) == 1
    assert divisibility(direct_sum(U(), A(2)), (1, 0, 0, 0)) == 1
    with pytest.raises(ValueError):
        divisibility(m, (0,) * 6)


def test_orthogonal_group_of_q_m():
    assert orthogonal_group_order(discriminant_form(M())) == 120


def test_isometry_examples():
    q1 = discriminant_form(direct_sum(D(4), E(8)))
    q2 = discriminant_form(D(12))
    assert forms_isometric(q1, q2)
    q = discriminant_form(A(4))
    isos = form_isometries(q, q)
    assert ((1,),) in isos
    assert not forms_isometric(discriminant_form(A(3)), discriminant_form(A(1) + A(1)))


def test_isometry_budget():
    q = discriminant_form(parse_lattice("6A1"))
    with pytest.raises(BudgetExceeded):
        form_isometries(q, q, budget=10)


def test_overlattice_examples():
    m = M()
    proper = overlattices(m, proper=True)
    assert len(proper) == 5
    for o in proper:
        assert abs(o.lattice.det) == 4 and o.lattice.is_even
        coords = [[int(c) for c in oracles_coords(o.basis, e)] for e in m_basis()]
        assert not is_primitive_sublattice(coords)
    assert len(overlattices(E(8))) == 1


def m_basis():
    return [tuple(int(a == i) for a in range(6)) for i in range(6)]


def oracles_coords(basis, v):
    from vgitlat.lattice import coordinates_in
    c = coordinates_in(basis, v)
    assert all(x.denominator == 1 for x in c)
    return c


def _e7_five_a1_overlattice():
    lat = parse_lattice("E7+5A1")
    return [o for o in overlattices(lat) if o.order == 2]


def test_genus_lemma_overlattice():
    index2 = _e7_five_a1_overlattice()
    assert index2
    assert any(in_genus(o.lattice, direct_sum(D(4), D(8))) for o in index2)
    for o in index2:
        assert abs(o.lattice.det) * 4 == abs(parse_lattice("E7+5A1").det)


def test_genus_examples():
    assert in_genus(direct_sum(D(4), E(8)), D(12))
    assert not in_genus(E(8), D(8))
    assert not in_genus(A(2), U())


def test_genus_pair_separated_by_roots():
    a, b = roots(direct_sum(D(4), E(8))), roots(D(12))
    assert a.count == b.count == 264
    assert sorted(a.components) != sorted(b.components)
    assert a.label == "E8+D4" and b.label == "D12"


def test_root_examples():
    e8 = roots(E(8))
    assert e8.count == 240 and e8.components == ["E8"]
    m = M()
    perp = orthogonal_complement(m, [H])
    rts = roots(m.sublattice(perp))
    assert rts.count == 10 and rts.label == "5A1"
    with pytest.raises(ValueError):
        roots(U())


@pytest.mark.parametrize("label", ["A1", "A5", "D4", "D6", "E6", "E7", "E8", "A12", "D9"])
def test_root_counts_match_formulas(label):
    rep = roots(parse_lattice(label))
    assert rep.count == oracles.ade_root_count(label)
    assert rep.components == [label]
    assert len(rep.simple) == int(label[1:])


def test_root_report_structure():
    lat = parse_lattice("E7+2A1+D4")
    rep = roots(lat)
    assert rep.count % 2 == 0
    assert set(rep.roots) == {tuple(-x for x in r) for r in rep.roots}
    assert len(rep.simple) == sum(int(c[1:]) for c in rep.components)
    # simple-root Gram is a Cartan matrix of the claimed type: same roots again
    again = roots(lat.sublattice(rep.simple))
    assert again.label == rep.label and again.count == rep.count


def test_m_is_d4_plus_u2():
    m = M()
    basis = m_d4_u2_basis()
    # l' is the branch node of the D4 star; D(4) numbers its branch node 1
    ordered = [basis[1], basis[0], basis[2], basis[3], basis[4], basis[5]]
    assert m.sublattice(ordered).gram == direct_sum(D(4), U(2)).gram
    assert abs(det_int(basis)) == 1


def test_q_t_is_minus_q_m():
    t = parse_lattice("D4+E8+U+U(2)")
    assert forms_isometric(discriminant_form(t), discriminant_form(M()).negated())
    assert t.signature == (2, 14)


def test_embedding_verdicts():
    m = M()
    assert embeds_primitively_K3(m).verdict == "yes"
    v = embeds_primitively_K3(direct_sum(m, A(13)))
    assert v.verdict == "no" and "length obstruction" in v.reason and "= 5" in v.reason
    v = embeds_primitively_K3(direct_sum(m, A(12)))
    assert v.verdict == "yes"
    if v.complement is not None:
        k = v.complement
        assert k.signature == (2, 2) and k.is_even
        assert forms_isometric(discriminant_form(k), discriminant_form(direct_sum(m, A(12))).negated())
    assert embeds_primitively_K3(rank_one(3)).verdict == "no"
    assert embeds_primitively_K3(parse_lattice("U+U+U+U")).verdict == "no"


def test_primitivity_examples():
    assert is_primitive_sublattice([(1, 0, 0), (0, 1, 0)])
    assert not is_primitive_sublattice([(2, 0, 0), (0, 1, 0)])
    with pytest.raises(ValueError):
        is_primitive_sublattice([(1, 1), (2, 2)])


def test_det_against_sympy():
    rng = random.Random(5)
    for _ in range(200):
        n = rng.randint(1, 6)
        g = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                g[i][j] = g[j][i] = rng.randint(-5, 5)
        assert det_int(g) == oracles.det_sympy(g)


def test_short_vectors_against_box():
    rng = random.Random(9)
    for _ in range(25):
        n = rng.randint(1, 3)
        basis = [[rng.randint(-2, 2) for _ in range(n)] for _ in range(n)]
        if det_int(basis) == 0:
            continue
        g = [[sum(basis[i][k] * basis[j][k] for k in range(n)) for j in range(n)] for i in range(n)]
        bound = rng.randint(1, 8)
        mine = {x: v for x, v in short_vectors(g, bound) if any(x)}
        brute = dict(oracles.box_vectors(g, bound, 12))
        assert mine == brute


def test_lll_properties():
    rng = random.Random(13)
    for _ in range(30):
        n = rng.randint(2, 5)
        basis = [[rng.randint(-6, 6) for _ in range(n)] for _ in range(n)]
        if det_int(basis) == 0:
            continue
        g = [[sum(basis[i][k] * basis[j][k] for k in range(n)) for j in range(n)] for i in range(n)]
        t, red = lll_reduce(g)
        assert abs(det_int(t)) == 1
        assert red == [[sum(t[i][a] * g[a][b] * t[j][b] for a in range(n) for b in range(n))
                        for j in range(n)] for i in range(n)]
        assert det_int(red) == det_int(g)
        shortest = min(v for x, v in short_vectors(g, red[0][0]) if any(x))
        assert red[0][0] <= 2 ** (n - 1) * shortest


def test_finite_form_polarization_identity():
    for spec in ("M", "A4", "D5+A2", "U(3)+<-6>"):
        q = discriminant_form(parse_lattice(spec))
        els = list(q.elements())
        for x in els[:12]:
            for y in els[:12]:
                assert (q.q(q.add(x, y)) - q.q(x) - q.q(y) - 2 * q.b(x, y)) % 2 == 0


def test_isotropic_subgroups_of_m():
    q = discriminant_form(M())
    subs = isotropic_subgroups(q)
    assert sorted(len(h) for h in subs) == [1, 2, 2, 2, 2, 2]
    with pytest.raises(BudgetExceeded):
        isotropic_subgroups(q, budget=4)


def test_abs_det_equals_group_order():
    for spec in ("M", "E7+5A1", "T(2,4,6)", "D4+E8+U(2)", "A12", "U(4)+<-10>"):
        lat = parse_lattice(spec)
        assert discriminant_form(lat).order == abs(lat.det)


def test_direct_sum_permutation_invariant_roots():
    parts = [A(2), D(4), A(1)]
    labels = {roots(direct_sum(*p)).label for p in permutations(parts)}
    assert labels == {"D4+A2+A1"}
