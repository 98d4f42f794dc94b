from fractions import Fraction as Q

import pytest

import oracles
from vgitlat.monoform import Configuration, Monomial, all_monomials
from vgitlat.stability import (
    StabilityInterval,
    beta_bounds,
    critical_r_values,
    diagonal_interval,
    discrepancy,
    interval_for_configuration,
    lct_quasihomogeneous,
    min_mu_over_r,
    mu,
    multiplicity_bounds,
    stability_threshold,
)


def conf(curve, line, d=None):
    return Configuration.of(curve, [line] if isinstance(line, str) else line, d)


E8_PAIR = [(2, 0, 3), (0, 5, 0)]


def test_mu_examples():
    for d in (2, 5):
        c = conf([(d, 0, 0)], "x0")
        for r in (Q(-1, 2), Q(0), Q(1)):
            assert mu(c, r, Q(3, 4)) == d + Q(3, 4)
    assert mu(conf(E8_PAIR, "x0"), Q(-1, 8), Q(5, 8)) == 0
    for t in (Q(0), Q(1), Q(7, 2)):
        assert mu(conf(all_monomials(5), "x2"), 1, t) == 5 - 2 * t


def test_mu_rejects_out_of_range():
    c = conf(E8_PAIR, "x0")
    with pytest.raises(ValueError):
        mu(c, Q(-1), 0)
    with pytest.raises(ValueError):
        mu(c, 0, -1)


def test_critical_r_values_examples():
    assert critical_r_values([Monomial(5, 0, 0)]) == [Q(-1, 2), Q(1)]
    assert critical_r_values([Monomial(*m) for m in E8_PAIR]) == [Q(-1, 2), Q(-1, 8), Q(1)]
    assert critical_r_values([Monomial(4, 0, 1), Monomial(2, 3, 0)]) == [Q(-1, 2), Q(1, 4), Q(1)]


def test_min_mu_examples():
    assert min_mu_over_r(conf(all_monomials(3), "x0"), 0) == 3
    assert min_mu_over_r(conf(E8_PAIR, "x0"), 0) == Q(-5, 8)
    assert min_mu_over_r(conf(all_monomials(5), "x2"), Q(5, 2)) == 0


def test_interval_examples():
    for d in (3, 4, 5):
        assert interval_for_configuration(conf(all_monomials(d), "x2")) == StabilityInterval.closed(0, Q(d, 2))
    assert interval_for_configuration(conf([(4, 0, 1), (2, 3, 0)], "x2")) == StabilityInterval.closed(0, Q(11, 5))
    assert interval_for_configuration(conf([(3, 1, 1), (1, 4, 0)], "x2")) == StabilityInterval.closed(0, Q(8, 5))


def test_interval_can_be_empty_or_unbounded():
    # x2^5 alone with line x2 is unstable for every t
    assert interval_for_configuration(conf([(0, 0, 5)], "x2")).empty
    iv = interval_for_configuration(conf([(5, 0, 0)], "x0"))
    assert iv.lo == 0 and iv.hi is None


def test_diagonal_interval_examples():
    assert diagonal_interval(conf(E8_PAIR, "x0")) == StabilityInterval.closed(Q(5, 8), Q(5, 8))
    assert diagonal_interval(conf([(1, 0, 4), (0, 5, 0)], "x0")) == StabilityInterval.closed(Q(5, 3), Q(5, 3))
    assert diagonal_interval(conf(all_monomials(5), "x2")) == StabilityInterval.closed(0, Q(5, 2))
    with pytest.raises(ValueError):
        diagonal_interval(conf(E8_PAIR, ["x0", "x1"]))


def test_threshold_examples():
    assert stability_threshold([Monomial(2, 0, 2), Monomial(0, 3, 1)]) == Q(1, 2)
    c2 = [Monomial(2, 0, 2), Monomial(1, 2, 1), Monomial(0, 4, 0), Monomial(0, 2, 2)]
    assert stability_threshold(c2) == 0
    assert stability_threshold([Monomial(*m) for m in E8_PAIR]) == Q(5, 8)
    assert stability_threshold([Monomial(1, 0, 4), Monomial(0, 5, 0)]) == Q(5, 3)
    assert stability_threshold([Monomial(1, 1, 3), Monomial(0, 5, 0)]) == Q(10, 7)


def test_lct_examples():
    assert lct_quasihomogeneous(2, 3, [(3, 0), (0, 2)]) == Q(5, 6)
    c = lct_quasihomogeneous(3, 5, [(5, 0), (0, 3)])
    assert c == Q(8, 15) and 3 / c - 5 == Q(5, 8)
    assert lct_quasihomogeneous(1, 1, [(1, 0)]) == 2
    with pytest.raises(ValueError):
        lct_quasihomogeneous(2, 4, [(1, 0)])
    with pytest.raises(ValueError):
        lct_quasihomogeneous(1, 1, [])


def test_discrepancy_examples():
    # nodal cubic: 1 + 1 - 1 - 3*2/3 = -1, on the semistable side of -1
    assert discrepancy(1, 1, 3, 0, 2) == -1
    # cusp: below -1 exactly when t < 3/5
    assert discrepancy(2, 3, 3, Q(3, 5), 6) == -1
    assert discrepancy(2, 3, 3, Q(3, 5) - Q(1, 1000), 6) < -1
    assert discrepancy(2, 3, 3, Q(3, 5) + Q(1, 1000), 6) > -1
    assert discrepancy(4, 7, 5, 1, 0) == 10
    with pytest.raises(ZeroDivisionError):
        discrepancy(1, 1, 3, -3, 1)


def test_multiplicity_and_beta_bounds():
    assert multiplicity_bounds(4, 5) == (1, 7)
    assert multiplicity_bounds(5, 5) == (Q(5, 2), 10)
    assert multiplicity_bounds(2, 5) == (-2, 1)
    with pytest.raises(ValueError):
        multiplicity_bounds(0, 5)
    b = beta_bounds(0, 5, line_component=True)
    assert b.lo is None and b.hi == 1
    assert beta_bounds(2, 5).exact and beta_bounds(2, 5).hi == Q(5, 2)
    b5 = beta_bounds(5, 5)
    assert (b5.lo, b5.hi) == (-5, Q(5, 3))
    assert b5.admits(Q(5, 3)) and not b5.admits(2)


def test_interval_matches_full_breakpoint_oracle():
    import random
    rng = random.Random(7)
    for _ in range(300):
        d = rng.randint(1, 6)
        ms = oracles.monomials(d)
        curve = rng.sample(ms, rng.randint(1, len(ms)))
        line = tuple(sorted(rng.sample(range(3), rng.randint(1, 3))))
        got = interval_for_configuration(conf(curve, line, d))
        want = oracles.interval_full(curve, line)
        if want is None:
            assert got.empty
        else:
            assert (got.lo, got.hi) == want


def test_min_mu_matches_dense_sampling():
    import random
    rng = random.Random(11)
    grid = oracles.r_grid(240)
    for _ in range(200):
        d = rng.randint(2, 6)
        ms = oracles.monomials(d)
        curve = rng.sample(ms, rng.randint(1, 5))
        line = (rng.randrange(3),)
        t = Q(rng.randint(0, 40), rng.randint(1, 8))
        c = conf(curve, line, d)
        exact = min_mu_over_r(c, t)
        assert exact == oracles.min_mu_full(curve, line, t)
        assert all(oracles.mu_full(curve, line, r, t) >= exact for r in grid)


def test_threshold_matches_sampled_oracle():
    from vgitlat.tables import QUARTIC_PAIR, THRESHOLD_FORMS
    for nf in THRESHOLD_FORMS + QUARTIC_PAIR:
        assert stability_threshold([Monomial(*m) for m in nf.curve]) == oracles.threshold_sampled(nf.curve)


def test_thresholds_within_multiplicity_bounds():
    from vgitlat.tables import THRESHOLD_FORMS
    for nf in THRESHOLD_FORMS:
        lo, hi = multiplicity_bounds(nf.multiplicity, 5)
        assert lo <= stability_threshold([Monomial(*m) for m in nf.curve]) <= hi


def test_discrepancy_witness_one_direction():
    # whenever the diagonal interval excludes t, the quasi-homogeneous witness
    # (weights of the germ) gives discrepancy < -1 there
    from vgitlat.tables import THRESHOLD_FORMS
    checked = 0
    for nf in THRESHOLD_FORMS:
        if nf.weights is None:
            continue
        w1, w2 = nf.weights
        wf = min(i * w1 + j * w2 for i, j in nf.affine())
        tp = stability_threshold([Monomial(*m) for m in nf.curve])
        if tp <= 0:
            continue
        t = tp - Q(1, 100)
        if t >= 0 and Q(3 * wf, w1 + w2) - 5 == tp:
            assert discrepancy(w1, w2, 5, t, wf) < -1
            checked += 1
    assert checked >= 5
