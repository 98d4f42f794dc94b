from fractions import Fraction as Q
from itertools import combinations
from math import gcd

import pytest
from sympy import Matrix

import oracles
from _shared import occurrence
from vgitlat.lattice import (
    A,
    M,
    M_POLARIZATION,
    coordinates_in,
    direct_sum,
    discriminant_form,
    forms_isometric,
    orthogonal_complement,
    parse_lattice,
    short_vectors,
)
from vgitlat.moduli import (
    STRATA,
    T238_EMBEDDING,
    RootClass,
    SingularityConfig,
    classify_root,
    deformation_monotonicity,
    is_deformation,
    root_class_in_M,
    t238_named,
    verify_stratum,
    verify_strata,
)

E_BASIS = tuple(tuple(int(i == j) for i in range(6)) for j in range(1, 6))


def test_classify_root_examples():
    assert classify_root(root_class_in_M((0, 1, 0, 0, 0, 0))) == "infinity"
    amb = direct_sum(M(), A(1))
    pad = lambda v: tuple(v) + (0,)
    finite = RootClass((0,) * 6 + (1,), amb, pad(M_POLARIZATION), tuple(pad(e) for e in E_BASIS))
    assert classify_root(finite) == "finite"


def test_classify_root_rejects_non_roots():
    with pytest.raises(ValueError, match="not a root"):
        classify_root(root_class_in_M((0, 1, -1, 0, 0, 0)))
    with pytest.raises(ValueError, match="orthogonal"):
        classify_root(root_class_in_M((1, 0, 0, 0, 0, 0)))


def test_classify_root_partitions_roots_of_h_perp():
    amb = direct_sum(M(), parse_lattice("A1+A2"))
    h = tuple(M_POLARIZATION) + (0,) * 3
    es = tuple(tuple(e) + (0,) * 3 for e in E_BASIS)
    perp = orthogonal_complement(amb, [h])
    g = [[-amb.inner(u, v) for v in perp] for u in perp]
    kinds = {"infinity": 0, "finite": 0}
    for y, val in short_vectors(g, 2):
        if val != 2:
            continue
        v = tuple(sum(y[i] * perp[i][a] for i in range(len(perp))) for a in range(amb.rank))
        kind = classify_root(RootClass(v, amb, h, es))
        kinds[kind] += 1
        # finite roots are exactly the ones orthogonal to all of M
        assert (kind == "finite") == all(amb.inner(v, tuple(int(a == i) for a in range(amb.rank))) == 0
                                         for i in range(6))
    assert kinds == {"infinity": 10, "finite": 2 + 6}


def test_singularity_config_parsing():
    c = SingularityConfig.parse("E7+2A1+D4")
    assert c.rank == 13 and c.label == "E7+D4+2A1"
    assert c.lattice().rank == 13
    with pytest.raises(ValueError):
        SingularityConfig.parse("17A1")
    with pytest.raises(ValueError):
        SingularityConfig.parse("B3")


def _primitive_by_minors(rows) -> bool:
    m = Matrix(rows)
    k, n = m.shape
    g = 0
    for cols in combinations(range(n), k):
        g = gcd(g, int(m[:, list(cols)].det()))
        if g == 1:
            return True
    return False


def recheck_certificate(config: SingularityConfig, cand) -> None:
    """Re-derive every occurrence condition from the certificate's basis."""
    amb = direct_sum(M(), config.lattice())
    basis = cand.basis
    n = cand.lattice
    r = amb.rank
    gram = [[sum(u[a] * amb.gram[a][b] * v[b] for a in range(r) for b in range(r)) for v in basis] for u in basis]
    assert gram == [list(row) for row in n.gram]
    assert n.is_even and n.signature == (1, n.rank - 1)
    assert abs(amb.det) == abs(n.det) * cand.order ** 2
    m_rows = [coordinates_in(basis, [int(i == j) for i in range(r)]) for j in range(6)]
    assert all(c.denominator == 1 for row in m_rows for c in row)
    assert _primitive_by_minors([[int(c) for c in row] for row in m_rows])
    h = [int(c) for c in coordinates_in(basis, tuple(M_POLARIZATION) + (0,) * (r - 6))]
    perp = orthogonal_complement(n, [h])
    g = [[-n.inner(u, v) for v in perp] for u in perp]
    count = sum(1 for _, val in short_vectors(g, 2) if val == 2)
    assert count == sum(oracles.ade_root_count(c) for c in config.components) + 10
    emb = cand.embedding
    assert emb.verdict == "yes"
    if emb.complement is not None:
        k = emb.complement
        assert k.is_even
        assert (k.signature[0] + n.signature[0], k.signature[1] + n.signature[1]) == (3, 19)
        assert forms_isometric(discriminant_form(k), discriminant_form(n).negated())
    else:
        assert n.rank + discriminant_form(n).length + 2 <= 22


def test_a12_occurs_with_trivial_glue():
    rep = occurrence("A12")
    assert rep.verdict == "yes"
    assert rep.certificate.order == 1
    recheck_certificate(rep.config, rep.certificate)


def test_a13_fails_by_length():
    rep = occurrence("A13")
    assert rep.verdict == "no" and rep.certificate is None
    assert rep.trace and all(c.status == "length" for c in rep.trace)
    assert "l(A_N) = 5" in rep.trace[0].reason


def test_ten_nodes_occur_with_unique_glue():
    rep = occurrence("10A1")
    assert rep.verdict == "yes"
    assert len(rep.passing) == 1
    cert = rep.certificate
    assert cert.order == 16 and len(cert.generators) == 4
    recheck_certificate(rep.config, cert)


def test_eleven_nodes_do_not_occur():
    rep = occurrence("11A1")
    assert rep.verdict == "no"
    assert not rep.passing


def test_every_trace_entry_is_classified():
    for label in ("A12", "10A1"):
        for c in occurrence(label).trace:
            assert c.status in {"pass", "length", "primitivity", "roots", "embedding", "undetermined"}
            assert c.reason


def test_deformation_relation():
    p = SingularityConfig.parse
    assert is_deformation(p("D4"), p("3A1"))
    assert is_deformation(p("A3"), p("2A1"))
    assert not is_deformation(p("A3"), p("3A1"))
    assert is_deformation(p("E8"), p("D7"))
    assert is_deformation(p("E6"), p("D5"))
    assert not is_deformation(p("A4"), p("D4"))
    assert is_deformation(p("10A1"), p("9A1"))


def test_deformation_monotonicity():
    assert deformation_monotonicity("A12", "A11").consistent
    chk = deformation_monotonicity("10A1", "9A1")
    assert chk.consistent and chk.deformation_verdict == "yes"
    same = deformation_monotonicity("A12", "A12")
    assert same.consistent and same.config_verdict == same.deformation_verdict
    with pytest.raises(ValueError):
        deformation_monotonicity("A5", "A6")


def test_strata():
    checks = verify_strata()
    assert len(checks) == 7
    for c in checks:
        assert c.ok, c.to_json()
        assert c.record.codimension == c.record.lattice().rank - 6
    last = next(r for r in STRATA if r.t == Q(11, 5))
    assert last.lattice().rank == 8 and last.codimension == 2


def test_t238_embedding():
    rec = next(r for r in STRATA if r.lattice_spec == "T(2,3,8)")
    chk = verify_stratum(rec)
    assert chk.ok and len(chk.checks) >= 6
    t, m = t238_named(), M()
    assert sum(1 for i in range(6) for j in range(i, 6) if t.inner(T238_EMBEDDING[i], T238_EMBEDDING[j]) == m.gram[i][j]) == 21
    assert _primitive_by_minors([list(v) for v in T238_EMBEDDING])


def test_specialization_ranks_drop():
    by = {r.index: r for r in STRATA}
    assert by[1].lattice().rank == 11 > by[3].lattice().rank == 10
    for r in STRATA:
        for j in r.specializes_to:
            assert by[j].lattice().rank < r.lattice().rank
