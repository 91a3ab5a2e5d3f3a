import math
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from conezeta.errors import NotIrreducible, NotTotallyReal, ZeroDegree
from conezeta.field import embed, embeddings, make_field, norm, sign_at, trace

from conftest import CUBIC, SQRT5, elements


def test_quadratic_roots_match_quadratic_formula(qfield):
    assert qfield.degree == 2
    r1 = (1 + math.sqrt(5)) / 2
    r2 = (1 - math.sqrt(5)) / 2
    assert abs(float(qfield.root_interval(0, 60).mid) - r1) < 1e-15
    assert abs(float(qfield.root_interval(1, 60).mid) - r2) < 1e-15
    assert qfield.disc_f == 5


def test_cubic_roots_are_cosines(cfield):
    expect = [2 * math.cos(2 * math.pi * j / 7) for j in (1, 2, 3)]
    got = [float(cfield.root_interval(i, 80).mid) for i in range(3)]
    assert got == pytest.approx(expect, abs=1e-14)
    assert cfield.disc_f == 49


def test_isolating_intervals_are_disjoint_and_shrink(cfield):
    ivs = [cfield.root_interval(i, 40) for i in range(3)]
    for a, b in zip(ivs, ivs[1:]):
        assert a.lo > b.hi
    for i in range(3):
        coarse, fine = cfield.root_interval(i, 20), cfield.root_interval(i, 70)
        assert coarse.lo <= fine.lo and fine.hi <= coarse.hi
        assert fine.width <= Fraction(1, 2**70)


@pytest.mark.parametrize("poly,err", [([1, 0, 1], NotTotallyReal), ([-2, 0, 0, 1], NotTotallyReal),
                                      ([0, -1, 0, 1], NotIrreducible), ([5], ZeroDegree),
                                      ([1, -2, 1], NotIrreducible)])
def test_make_field_rejects(poly, err):
    with pytest.raises(err):
        make_field(poly)


def test_embed_examples(qfield):
    t = qfield.theta()
    v = embed(t, 0, Fraction(1, 10**12))
    assert v.width <= Fraction(1, 10**12)
    assert v.contains(Fraction("1.6180339887498948"))
    z = embed(qfield.zero(), 1)
    assert z.lo == z.hi == 0
    one = embed(t * t - t, 0)
    assert one.lo == one.hi == 1


def test_refine_is_monotone(cfield):
    x = cfield.element([Fraction(1, 3), -2, Fraction(5, 7)])
    v = embed(x, 2, Fraction(1, 2**10))
    w = v.refine(Fraction(1, 2**40))
    assert v.lo <= w.lo and w.hi <= v.hi and w.width <= Fraction(1, 2**40)


def test_sign_examples(qfield, cfield):
    s5 = qfield.element([-1, 2])
    assert [sign_at(s5, i) for i in range(2)] == [1, -1]
    assert [sign_at(qfield.zero(), i) for i in range(2)] == [0, 0]
    eta = cfield.theta()
    eps1 = eta * eta - 1
    # eps_1 = eta^2 - 1 is not totally positive: eta^(2) ~ -0.445
    assert [sign_at(eps1, i) for i in range(3)] == [1, -1, 1]
    assert [sign_at(eps1 * eps1, i) for i in range(3)] == [1, 1, 1]


def test_trace_norm_examples(qfield):
    t = qfield.theta()
    assert trace(t) == 1
    assert norm(t) == -1
    assert norm(t + 1) == 1


def _mp_value(x, i):
    """Independent float oracle: evaluate the coordinate polynomial at mpmath's root."""
    f = x.field.min_poly
    roots = sorted(mpmath.polyroots(list(reversed(f)), maxsteps=200, extraprec=200), key=lambda r: -mpmath.re(r))
    r = mpmath.re(roots[i])
    return sum(mpmath.mpf(c.numerator) / c.denominator * r**k for k, c in enumerate(x.coords))


@settings(max_examples=60)
@given(st.data())
def test_ring_axioms_and_multiplicativity(data):
    for poly in (SQRT5, CUBIC):
        F = make_field(poly)
        x = data.draw(elements(F))
        y = data.draw(elements(F))
        z = data.draw(elements(F))
        assert (x + y) * z == x * z + y * z
        assert (x * y) * z == x * (y * z)
        assert trace(x + y) == trace(x) + trace(y)
        assert norm(x * y) == norm(x) * norm(y)
        if not x.is_zero():
            assert x * x.inverse() == F.one()


@settings(max_examples=40)
@given(st.data())
def test_embeddings_enclose_mpmath_values_and_trace(data):
    F = make_field(CUBIC)
    x = data.draw(elements(F))
    ivs = embeddings(x, 80)
    for i, iv in enumerate(ivs):
        with mpmath.workprec(120):
            ref = _mp_value(x, i)
        assert abs(float(iv.mid) - float(ref)) <= 1e-12 * (1 + abs(float(ref)))
    tot = ivs[0] + ivs[1] + ivs[2]
    assert tot.contains(trace(x))


@settings(max_examples=100)
@given(st.data())
def test_sign_agrees_with_refined_midpoint(data):
    F = make_field(CUBIC)
    x = data.draw(elements(F, nonzero=True))
    for i in range(3):
        s = sign_at(x, i)
        v = embed(x, i, Fraction(1, 2**200))
        mid = v.mid
        assert s == (1 if mid > 0 else -1)
