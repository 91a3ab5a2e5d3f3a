"""Independent references: the Dedekind zeta function of a monogenic field at k >= 2.

For O_F = Z[t] the primes above p correspond to the distinct irreducible factors of
f mod p (Dedekind), so each Euler factor is prod_P (1 - p^(-f_P s))^-1 with f_P the
factor degrees.  Two evaluation routes:

* euler: truncated product over p <= P.  Every prime ideal above p > P has norm >= p
  and there are at most n of them, so the missing factor lies in [1, exp(t)] with
  t = n/(1 - P^-k) * sum_{m>P} m^-k <= n P^(1-k) / ((k-1)(1 - P^-k)).
* dirichlet: sum_{m <= B} a_m m^-k, where a_m <= d_n(m).  For 1 < s < k,
  sum_{m>B} d_n(m) m^-k <= B^(s-k) zeta(s)^n <= B^(s-k) (s/(s-1))^n.
"""
from __future__ import annotations

import math
import warnings
from fractions import Fraction

import mpmath
import numpy as np
import sympy

from .errors import BudgetExceeded, InputError, NotMonogenic
from .intervals import Interval, iv_precision
from .summation import Enclosure

# polynomial arithmetic over F_p, little-endian int lists


def _trim(a):
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a, m, p):
    a = [c % p for c in a]
    _trim(a)
    dm = len(m) - 1
    inv = pow(m[-1], -1, p)
    while len(a) - 1 >= dm:
        c = a[-1] * inv % p
        s = len(a) - 1 - dm
        for i, mc in enumerate(m):
            a[s + i] = (a[s + i] - c * mc) % p
        _trim(a)
    return a


def _pmul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return [c % p for c in out]


def _psub(a, b, p):
    n = max(len(a), len(b))
    out = [((a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)) % p for i in range(n)]
    return _trim(out)


def _pgcd(a, b, p):
    a, b = _trim([c % p for c in a]), _trim([c % p for c in b])
    while b:
        a, b = b, _pmod(a, b, p)
    if a:
        inv = pow(a[-1], -1, p)
        a = [c * inv % p for c in a]
    return a


def _pdiv(a, b, p):
    """Exact quotient a / b over F_p."""
    a = [c % p for c in a]
    _trim(a)
    q = [0] * max(1, len(a) - len(b) + 1)
    inv = pow(b[-1], -1, p)
    while len(a) >= len(b) and a:
        c = a[-1] * inv % p
        s = len(a) - len(b)
        q[s] = c
        for i, bc in enumerate(b):
            a[s + i] = (a[s + i] - c * bc) % p
        _trim(a)
    return _trim(q)


def _frobenius(h, p, m):
    """h^p mod (m, p)"""
    result, base, e = [1], h, p
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), m, p)
        base = _pmod(_pmul(base, base, p), m, p)
        e >>= 1
    return result


def _ddf_degrees(f, p):
    """Degrees of the irreducible factors of a squarefree f mod p (distinct-degree factorization)."""
    degs = []
    g = _trim([c % p for c in f])
    h = _pmod([0, 1], g, p)
    d = 0
    while len(g) - 1 >= 2 * (d + 1):
        d += 1
        h = _frobenius(h, p, g)          # x^(p^d) mod g
        common = _pgcd(g, _psub(h, [0, 1], p), p)
        k = len(common) - 1
        if k > 0:
            degs += [d] * (k // d)
            g = _pdiv(g, common, p)
            h = _pmod(h, g, p)
    if len(g) - 1 > 0:
        degs.append(len(g) - 1)
    return sorted(degs)


def _check(field, monogenic):
    if not monogenic:
        raise NotMonogenic("the Dedekind-factorization oracle needs O_F = Z[t] (pass monogenic=True)")


def splitting_type(field, p: int, monogenic: bool = False):
    """Sorted residue degrees of the distinct primes above p."""
    _check(field, monogenic)
    if p < 2 or not sympy.isprime(p):
        raise InputError(f"{p} is not prime")
    f = list(field.min_poly)
    if field.disc_f % p:
        return _ddf_degrees(f, p)
    x = sympy.Symbol("x")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # sympy deprecation noise from its modular sort
        _, facs = sympy.factor_list(sympy.Poly(list(reversed(f)), x), modulus=p)
    return sorted(int(sympy.Poly(g, x).degree()) for g, _mult in facs)


def _primes_upto(P):
    sieve = np.ones(P + 1, dtype=bool)
    sieve[:2] = False
    for i in range(2, math.isqrt(P) + 1):
        if sieve[i]:
            sieve[i * i :: i] = False
    return np.nonzero(sieve)[0].tolist()


def euler_cutoff(n, k, target, value_bound=None) -> int:
    """Smallest P (up to 5%) whose tail factor exp(t) widens a value <= value_bound by <= target."""
    target = Fraction(target)
    scale = float(value_bound) if value_bound is not None else 1.645**n
    P = max(2, int((n * scale / ((k - 1) * float(target))) ** (1.0 / (k - 1))))
    while math.expm1(float(_tail_exponent(n, k, P))) * scale > float(target):
        P = int(P * 1.05) + 1
    return P


def _tail_exponent(n, k, P) -> Fraction:
    return Fraction(n, k - 1) / Fraction(P) ** (k - 1) / (1 - Fraction(1, P**k))


def dedekind_zeta(field, k: int, target_error, monogenic: bool = False, cutoff: int | None = None,
                  method: str = "euler", max_cutoff: int = 10**7) -> Enclosure:
    """Enclosure of zeta_F(k)."""
    _check(field, monogenic)
    if k < 2:
        raise InputError("k must be at least 2")
    target = Fraction(target_error)
    if method == "dirichlet":
        return _dirichlet(field, k, target, cutoff, max_cutoff)
    if method != "euler":
        raise InputError(f"unknown oracle method {method!r}")
    n = field.degree
    if cutoff is None:
        rough = dedekind_zeta(field, k, Fraction(1, 1000), True, cutoff=SMALL_PRIME, method="euler")
        cutoff = euler_cutoff(n, k, target, rough.hi)
    P = cutoff
    exceeded = False
    if P > max_cutoff:
        warnings.warn(f"prime cutoff {P} exceeds {max_cutoff}", BudgetExceeded, stacklevel=2)
        P, exceeded = max_cutoff, True
    bits = max(64, 2 * (target.denominator.bit_length() - target.numerator.bit_length()) + 40)
    primes = _primes_upto(P)
    small = [q for q in primes if q <= SMALL_PRIME or field.disc_f % q == 0]
    large = np.array([q for q in primes if q > SMALL_PRIME and field.disc_f % q], dtype=np.int64)
    lo_large, hi_large = _large_prime_log(field, k, large)
    t = _tail_exponent(n, k, P)
    with iv_precision(bits + 16) as iv:
        prod = iv.mpf(1)
        for q in small:
            for f in splitting_type(field, q, True):
                prod = prod / (1 - 1 / iv.mpf(q) ** (f * k))
        lo_f = iv.exp(iv.mpf(lo_large.numerator) / lo_large.denominator)
        hi_f = iv.exp((iv.mpf(hi_large.numerator) / hi_large.denominator) + iv.mpf(t.numerator) / t.denominator)
        lo = Interval.from_iv(prod * lo_f).lo
        hi = Interval.from_iv(prod * hi_f).hi
    iv_ = Interval(lo, hi).round_out(bits)
    return Enclosure(iv_, P, Fraction(0), 0, Fraction(0), exceeded, "euler",
                     {"cutoff": P, "method": "euler", "tail_log_bound": f"{float(t):.3e}"})


SMALL_PRIME = 1 << 10


def root_count(field, p: int) -> int:
    """Number of roots of f mod p (= number of degree-one primes above an unramified p)."""
    f = list(field.min_poly)
    n = len(f) - 1
    if n == 1:
        return 1
    if n == 2:
        d = (f[1] * f[1] - 4 * f[0]) % p
        if p == 2:
            return len([x for x in (0, 1) if (f[0] + f[1] * x + x * x) % 2 == 0])
        return 1 + (1 if pow(d, (p - 1) // 2, p) == 1 else -1) if d else 1
    g = _trim([c % p for c in f])
    h = _frobenius(_pmod([0, 1], g, p), p, g)
    return len(_pgcd(g, _psub(h, [0, 1], p), p)) - 1


def _large_prime_log(field, k, primes):
    """Rational bounds [lo, hi] on sum over the given unramified primes of log of the Euler factor.

    With x = p^-k and r degree-one primes above p: each of those contributes
    -log(1 - x) in [x, x/(1-x)], and the at most (n - r)/2 others at most
    -log(1 - x^2) <= x^2/(1 - x^2).
    """
    if primes.size == 0:
        return Fraction(0), Fraction(0)
    n = field.degree
    r = np.array([root_count(field, int(q)) for q in primes], dtype=np.float64)
    inv = 1.0 / primes.astype(np.float64)
    x = inv.copy()
    for _ in range(k - 1):
        x = x * inv
    base = Fraction(math.fsum((r * x).tolist()))
    x_max = Fraction(float(x.max()))
    rest = Fraction(math.fsum((((n - r) / 2) * x * x).tolist()))
    # float terms: k + 1 roundings each (2k + 2 for the squares), plus fsum
    g = Fraction(2 * k + 4, 2**53)
    lo = base * (1 - g)
    hi = (base / (1 - x_max * (1 + g)) + rest) * (1 + g)
    return lo, hi


# Dirichlet series route


def coefficients(field, B: int, monogenic: bool = False):
    """numpy array [a_0, ..., a_B]: number of ideals of norm m (a_0 = 0)."""
    _check(field, monogenic)
    a = np.ones(B + 1, dtype=np.int64)
    a[0] = 0
    fac = np.ones(B + 1, dtype=np.int64)
    for p in _primes_upto(B):
        c = _local_counts(splitting_type(field, p, True), B, p)
        pe, e = p, 1
        while pe <= B:
            fac[pe::pe] = c[e]        # later (higher) powers overwrite
            pe *= p
            e += 1
        a[p::p] *= fac[p::p]
        fac[p::p] = 1
    return a


def _local_counts(degs, B, p):
    """Coefficients of prod_f 1/(1 - x^f) up to the largest e with p^e <= B."""
    emax = 0
    while p ** (emax + 1) <= B:
        emax += 1
    c = [1] + [0] * emax
    for f in degs:
        for e in range(f, emax + 1):
            c[e] += c[e - f]
    return c


def _rankin_tail(n, k, B):
    """min over a grid of s in (1, k) of B^(s-k) (s/(s-1))^n, as an exact upper bound."""
    best = None
    for num in range(1, 200):
        s = 1 + Fraction(num * (k - 1), 200)
        # B^(s-k) bounded above via a rational upper bound of exp((s-k) log B)
        val = mpmath.iv.exp((mpmath.iv.mpf(s.numerator) / s.denominator - k) * mpmath.iv.log(B))
        up = Interval.from_iv(val).hi * (s / (s - 1)) ** n
        if best is None or up < best:
            best = up
    return best


def _dirichlet(field, k, target, cutoff, max_cutoff):
    n = field.degree
    B = cutoff
    if B is None:
        B = 64
        while _rankin_tail(n, k, B) > target / 2:
            B *= 2
    exceeded = False
    if B > max_cutoff:
        warnings.warn(f"norm cutoff {B} exceeds {max_cutoff}", BudgetExceeded, stacklevel=2)
        B, exceeded = max_cutoff, True
    a = coefficients(field, B, True)
    m = np.arange(1, B + 1, dtype=np.float64)
    r = 1.0 / m
    t = r.copy()
    for _ in range(k - 1):
        t = t * r
    t = t * a[1:].astype(np.float64)  # a_m < 2^53 here, exact as a float
    s = Fraction(math.fsum(t.tolist()))
    # each float term has k + 1 roundings; fsum adds one more for the whole sum
    g = (k + 1) * Fraction(1, 2**53)
    g = g / (1 - g)
    err = (g / (1 - g) + Fraction(1, 2**53)) * s * 2
    tail = _rankin_tail(n, k, B)
    bits = max(64, 2 * (target.denominator.bit_length() - target.numerator.bit_length()) + 40)
    iv = Interval(s - err, s + err + tail).round_out(bits)
    return Enclosure(iv, B, tail, 0, Fraction(0), exceeded, "dirichlet",
                     {"cutoff": B, "method": "dirichlet"})
