import cmath
import math
import warnings
from fractions import Fraction

import mpmath
import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from conezeta.errors import BudgetExceeded, InputError, NotMonogenic
from conezeta.field import make_field
from conezeta.oracle import coefficients, dedekind_zeta, euler_cutoff, root_count, splitting_type

from conftest import CUBIC, SQRT5

PRIMES = list(sympy.primerange(2, 400))


def _sympy_type(poly, p):
    x = sympy.Symbol("x")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        _, facs = sympy.factor_list(sympy.Poly(list(reversed(poly)), x), modulus=p)
    return sorted(int(sympy.Poly(g, x).degree()) for g, _ in facs)


@pytest.mark.parametrize("poly", [SQRT5, CUBIC, [-3, 0, 1], [1, -3, 0, 1]])
def test_splitting_type_matches_sympy(poly):
    F = make_field(poly)
    for p in PRIMES:
        assert splitting_type(F, p, monogenic=True) == _sympy_type(poly, p), p


def test_splitting_type_by_congruence(qfield, cfield):
    for p in PRIMES:
        q = splitting_type(qfield, p, True)
        if p == 5:
            assert q == [1]
        else:
            assert q == ([1, 1] if p % 5 in (1, 4) else [2])
        c = splitting_type(cfield, p, True)
        if p == 7:
            assert c == [1]  # totally ramified
        else:
            assert c == ([1, 1, 1] if p % 7 in (1, 6) else [3])
        assert sum(c) <= 3 and root_count(cfield, p) == c.count(1)


def test_requires_monogenic_and_prime(qfield):
    with pytest.raises(NotMonogenic):
        splitting_type(qfield, 3)
    with pytest.raises(NotMonogenic):
        dedekind_zeta(qfield, 2, 1e-6)
    with pytest.raises(InputError):
        splitting_type(qfield, 9, True)
    with pytest.raises(InputError):
        dedekind_zeta(qfield, 1, 1e-6, True)
    with pytest.raises(InputError):
        dedekind_zeta(qfield, 2, 1e-6, True, method="magic")


def _chi5(m):
    return {0: 0, 1: 1, 4: 1, 2: -1, 3: -1}[m % 5]


def _chi7(m):
    """Cubic character mod 7 sending the generator 3 to exp(2 pi i / 3)."""
    if m % 7 == 0:
        return 0
    e = next(j for j in range(6) if pow(3, j, 7) == m % 7)
    return cmath.exp(2j * math.pi * e / 3)


def test_ideal_counts_are_character_convolutions(qfield, cfield):
    B = 600
    a = coefficients(qfield, B, True)
    c = coefficients(cfield, B, True)
    for m in range(1, B + 1):
        divs = sympy.divisors(m)
        assert a[m] == sum(_chi5(d) for d in divs), m
        # zeta_F = zeta * L(chi) * L(chi-bar)
        ref = sum(_chi7(d) * _chi7(e).conjugate() for d in divs for e in sympy.divisors(m // d))
        assert abs(c[m] - ref) < 1e-9, m


@settings(max_examples=50)
@given(st.integers(1, 400), st.integers(1, 400))
def test_ideal_counts_multiplicative(m, n):
    c = _coeffs()
    if math.gcd(m, n) == 1:
        assert c[m * n] == c[m] * c[n]


_C = {}


def _coeffs():
    if "c" not in _C:
        _C["c"] = coefficients(make_field(CUBIC), 160000, True)
    return _C["c"]


def test_cutoff_consistency(cfield):
    a = coefficients(cfield, 5000, True)
    b = coefficients(cfield, 10000, True)
    assert np.array_equal(a, b[:5001])
    assert a[0] == 0 and a[1] == 1


def _mp_in(enc, ref):
    lo = mpmath.mpf(enc.lo.numerator) / enc.lo.denominator
    hi = mpmath.mpf(enc.hi.numerator) / enc.hi.denominator
    return lo <= ref <= hi


def test_rational_field_gives_riemann_zeta():
    Q = make_field([0, 1])
    for k, target in ((2, Fraction(1, 10**6)), (3, Fraction(1, 10**10))):
        e = dedekind_zeta(Q, k, target, True)
        with mpmath.workprec(200):
            assert _mp_in(e, mpmath.zeta(k))
        assert e.width <= 2 * target and not e.budget_exceeded


@pytest.mark.parametrize("k", [2, 3, 4])
def test_quadratic_matches_l_function_product(qfield, k):
    # the prime tail decays like P^(1-k), so weight 2 gets a looser target
    target = Fraction(1, 10**6) if k == 2 else Fraction(1, 10**10)
    e = dedekind_zeta(qfield, k, target, True)
    with mpmath.workprec(200):
        ref = mpmath.zeta(k) * mpmath.dirichlet(k, [0, 1, -1, -1, 1])
        assert _mp_in(e, ref)
    assert e.width <= 2 * target


def test_quadratic_closed_form_weight_two(qfield):
    e = dedekind_zeta(qfield, 2, Fraction(1, 10**6), True)
    with mpmath.workprec(200):
        assert _mp_in(e, 2 * mpmath.pi**4 / (75 * mpmath.sqrt(5)))
    assert e.width <= Fraction(2, 10**6)


@pytest.mark.parametrize("k", [2, 3])
def test_cubic_matches_l_function_product(cfield, k):
    target = Fraction(1, 10**5) if k == 2 else Fraction(1, 10**8)
    e = dedekind_zeta(cfield, k, target, True)
    chi = [complex(_chi7(m)) for m in range(7)]
    with mpmath.workprec(150):
        L = mpmath.dirichlet(k, chi)
        ref = mpmath.zeta(k) * abs(L) ** 2
        assert _mp_in(e, ref)
    assert e.width <= 2 * target


def test_dirichlet_route_agrees(qfield, cfield):
    for F in (qfield, cfield):
        a = dedekind_zeta(F, 3, Fraction(1, 10**5), True, method="dirichlet")
        b = dedekind_zeta(F, 3, Fraction(1, 10**5), True)
        assert a.intersects(b)
        assert a.extra["method"] == "dirichlet"


def test_prime_cutoff_budget(qfield):
    with pytest.warns(BudgetExceeded):
        e = dedekind_zeta(qfield, 2, Fraction(1, 10**12), True, max_cutoff=1000)
    assert e.budget_exceeded
    with mpmath.workprec(200):
        assert _mp_in(e, 2 * mpmath.pi**4 / (75 * mpmath.sqrt(5)))


def test_euler_cutoff_meets_target():
    for n, k, t in ((2, 2, 1e-6), (3, 2, 1e-4), (3, 3, 1e-8)):
        P = euler_cutoff(n, k, t, 2.0)
        assert math.expm1(n * P ** (1 - k) / ((k - 1) * (1 - P ** (-k)))) * 2.0 <= t
