from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from conezeta import linalg
from conezeta.cones import Membership, contains
from conezeta.errors import DiscriminantMismatch, InputError, NotAnIdeal, SingularBasis, ZeroElement
from conezeta.field import norm, trace
from conezeta.intervals import Interval
from conezeta.lattice import (
    build_lattice,
    dual_norm_polynomial,
    load_lattice,
    norm_polynomial,
    positivity_cone,
    regular_representation,
)
from conezeta.polynomial import Polynomial

from conftest import rational_vectors


def poly(n, terms):
    return Polynomial(n, terms)


def test_sqrt5_dual_basis(qlat, qfield):
    t = qfield.theta()
    assert qlat.w == (t, qfield.one())
    assert qlat.w_star == ((2 * t - 1) / 5, (3 - t) / 5)
    assert qlat.disc_F == 5 and qlat.ideal_norm == 1
    # 1/sqrt5 and (-1 + sqrt5)/(2 sqrt5) under the first embedding
    a = qlat.w_star[0].embed_interval(0, 80)
    assert abs(float(a.mid) - 5 ** -0.5) < 1e-15
    b = qlat.w_star[1].embed_interval(0, 80)
    assert abs(float(b.mid) - (5**0.5 - 1) / (2 * 5**0.5)) < 1e-15


def test_sqrt5_dual_norm_polynomial(qlat):
    expect = poly(2, {(2, 0): Fraction(-1, 5), (1, 1): Fraction(1, 5), (0, 2): Fraction(1, 5)})
    assert dual_norm_polynomial(qlat) == expect


def test_cubic_dual_basis_and_norm_polynomial(clat, cfield):
    e = cfield.theta()
    e2 = e * e
    assert clat.w == (e2, e, cfield.one())
    assert clat.w_star == ((2 * e2 + e - 3) / 7, (e2 + 2 * e - 1) / 7, (-3 * e2 - e + 7) / 7)
    assert clat.disc_F == 49 and clat.ideal_norm == 1
    c = {
        (3, 0, 0): -1, (2, 1, 0): -2, (2, 0, 1): 2, (1, 2, 0): 1, (1, 1, 1): 5,
        (1, 0, 2): 1, (0, 3, 0): 1, (0, 2, 1): -3, (0, 1, 2): -4, (0, 0, 3): -1,
    }
    assert dual_norm_polynomial(clat) == poly(3, {m: Fraction(v, 49) for m, v in c.items()})


def test_rationals_identity_case():
    lat = load_lattice({"min_poly": [0, 1]})
    assert dual_norm_polynomial(lat) == Polynomial.variable(1, 0)


def test_sign_flip(qfield):
    lat = build_lattice(qfield, [[1, 0], [0, 1]], disc_F=5)
    assert lat.w[0] == -qfield.one() and lat.w[1] == qfield.theta()
    assert lat.det_W(64).lo > 0


def test_bad_bases(qfield):
    with pytest.raises(NotAnIdeal):
        build_lattice(qfield, [[1, 0], [0, 2]], disc_F=5)  # Z + 2 theta Z is not theta-stable
    with pytest.raises(SingularBasis):
        build_lattice(qfield, [[1, 0], [2, 0]], disc_F=5)
    with pytest.raises(DiscriminantMismatch):
        build_lattice(qfield, [[0, 1], [1, 0]], disc_F=3)
    with pytest.raises(InputError):
        build_lattice(qfield, [[0, 2], [2, 0]])  # an ideal, not an order: d_F required
    with pytest.raises(InputError):
        build_lattice(qfield, [[0, 1], [1, 0]], disc_F=5, units=[[2, 0]])


def test_nontrivial_ideal_norm(qfield):
    lat = build_lattice(qfield, [[0, 2], [2, 0]], disc_F=5)
    assert lat.ideal_norm == 4
    iv = lat.det_W(80)
    assert (iv * iv).contains(Fraction(5 * 16))


def test_regular_representation_examples(qlat, qfield):
    m = regular_representation(qlat, qfield.theta() + 1)
    assert m == [[2, 1], [1, 1]]
    assert linalg.det(m) == 1 and m[0][0] + m[1][1] == trace(qfield.theta() + 1) == 3
    assert regular_representation(qlat, qfield.one()) == linalg.identity(2)
    with pytest.raises(ZeroElement):
        regular_representation(qlat, qfield.zero())


@pytest.mark.parametrize("which", ["q", "c"])
def test_trace_duality_and_embedded_duality(which, qlat, clat):
    lat = qlat if which == "q" else clat
    n = lat.n
    for i in range(n):
        for j in range(n):
            assert trace(lat.w[i] * lat.w_star[j]) == int(i == j)
            acc = Interval.point(0)
            for l in range(n):
                acc = acc + lat.w[l].embed_interval(i, 80) * lat.w_star[l].embed_interval(j, 80)
            assert acc.contains(Fraction(int(i == j)))


@pytest.mark.parametrize("which", ["q", "c"])
def test_det_w_squared(which, qlat, clat):
    lat = qlat if which == "q" else clat
    iv = lat.det_W(80)
    assert iv.lo > 0
    assert (iv * iv).contains(Fraction(lat.disc_F) * lat.ideal_norm**2)


def test_positivity_cone_membership(qlat):
    T = positivity_cone(qlat)
    assert contains(T, (0, 1)) is Membership.INSIDE
    assert contains(T, (1, 0)) is Membership.OUTSIDE


def _units(lat, qfield_unit):
    if lat.units:
        return list(lat.units)
    return [qfield_unit]


@pytest.mark.parametrize("which", ["q", "c"])
def test_norm_invariance_polynomial_identity(which, qlat, clat, qfield):
    lat = qlat if which == "q" else clat
    N = dual_norm_polynomial(lat)
    for eps in _units(lat, qfield.theta() + 1):
        g = regular_representation(lat, eps)
        assert linalg.is_integral(g) and linalg.det(g) == 1
        assert N.substitute_linear(linalg.transpose(g)) == N


@pytest.mark.parametrize("which", ["q", "c"])
def test_unit_eigenvectors(which, qlat, clat, qfield):
    lat = qlat if which == "q" else clat
    n = lat.n
    for eps in _units(lat, qfield.theta() + 1):
        g = regular_representation(lat, eps)
        for i in range(n):
            v = [x.embed_interval(i, 90) for x in lat.w_star]
            lam = eps.embed_interval(i, 90)
            for r in range(n):
                lhs = Interval.point(0)
                for c in range(n):
                    lhs = lhs + Interval.point(g[r][c]) * v[c]
                assert lhs.intersects(lam * v[r])


def _lats():
    return [load_lattice({"min_poly": [-1, -1, 1], "ideal_basis": [[0, 1], [1, 0]], "disc_F": 5}),
            load_lattice({"min_poly": [-1, -2, 1, 1], "ideal_basis": [[0, 0, 1], [0, 1, 0], [1, 0, 0]],
                          "disc_F": 49})]


LATS = _lats()


@settings(max_examples=50)
@given(st.data())
def test_norm_form_matches_element_norm(data):
    for lat in LATS:
        x = data.draw(rational_vectors(lat.n))
        assert norm_polynomial(lat)(x) == norm(lat.element(x))
        assert dual_norm_polynomial(lat)(x) == norm(lat.dual_element(x))


@settings(max_examples=50)
@given(st.data())
def test_dual_norm_is_product_of_conjugate_forms(data):
    for lat in LATS:
        x = data.draw(rational_vectors(lat.n))
        prod = Interval.point(1)
        for i in range(lat.n):
            form = Interval.point(0)
            for xj, ws in zip(x, lat.w_star):
                form = form + Interval.point(xj) * ws.embed_interval(i, 90)
            prod = prod * form
        assert prod.contains(dual_norm_polynomial(lat)(x))


@settings(max_examples=50)
@given(st.data())
def test_regular_representation_defining_relation(data):
    lat = LATS[1]
    a = lat.field.element(data.draw(st.lists(st.integers(-5, 5), min_size=3, max_size=3)))
    if a.is_zero():
        return
    x = data.draw(rational_vectors(3))
    g = regular_representation(lat, a)
    assert lat.element(linalg.matvec(g, list(x))) == a * lat.element(x)
