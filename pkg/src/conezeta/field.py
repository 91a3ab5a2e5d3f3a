"""Totally real number fields Q[t]/(f) with exact arithmetic and certified embeddings.

Elements are coordinate vectors in the power basis 1, t, ..., t^(n-1).  The real
embeddings are indexed 0..n-1 by *descending* root value, so embedding 0 sends t
to the largest root of f.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from functools import cached_property, lru_cache

import sympy

from . import linalg
from .errors import NotIrreducible, NotTotallyReal, ZeroDegree
from .intervals import Interval


@dataclass(frozen=True)
class NumberField:
    min_poly: tuple  # little-endian integer coefficients, monic
    base_roots: tuple = dc_field(compare=False, repr=False)  # isolating intervals, descending

    @property
    def degree(self) -> int:
        return len(self.min_poly) - 1

    @cached_property
    def disc_f(self) -> int:
        x = sympy.Symbol("x")
        return int(sympy.discriminant(sympy.Poly(list(reversed(self.min_poly)), x)))

    @cached_property
    def power_traces(self) -> tuple:
        """Tr(t^k) for k = 0..n-1."""
        return tuple(self.theta_power(k).multiplication_matrix_trace() for k in range(self.degree))

    def element(self, coords) -> "FieldElement":
        coords = [Fraction(c) for c in coords]
        n = self.degree
        if len(coords) > n:
            return self.from_polynomial(coords)
        return FieldElement(self, tuple(coords + [Fraction(0)] * (n - len(coords))))

    def from_polynomial(self, coeffs) -> "FieldElement":
        """Reduce an arbitrary-length little-endian polynomial in t modulo f."""
        return FieldElement(self, _reduce(list(map(Fraction, coeffs)), self.min_poly))

    def zero(self):
        return self.element([0])

    def one(self):
        return self.element([1])

    def theta(self):
        return self.from_polynomial([0, 1])

    def theta_power(self, k):
        return self.from_polynomial([0] * k + [1])

    def root_interval(self, i: int, bits: int) -> Interval:
        """Isolating interval of the i-th root (descending order) of width <= 2**-bits."""
        return _refined_root(self.min_poly, self.base_roots[i], bits)

    def __repr__(self):
        return f"NumberField(min_poly={list(self.min_poly)})"

    def to_json(self) -> dict:
        return {"min_poly": list(self.min_poly)}


def make_field(min_poly) -> NumberField:
    """Build a totally real field from a monic integer polynomial (little-endian)."""
    coeffs = [int(c) for c in min_poly]
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    if len(coeffs) < 2:
        raise ZeroDegree("minimal polynomial must have degree >= 1")
    if coeffs[-1] != 1:
        raise ValueError("minimal polynomial must be monic")
    x = sympy.Symbol("x")
    poly = sympy.Poly(list(reversed(coeffs)), x, domain="QQ")
    if not poly.is_irreducible:
        raise NotIrreducible(f"{poly.as_expr()} is reducible over Q")
    intervals = poly.intervals()
    if len(intervals) != poly.degree():
        raise NotTotallyReal(f"{poly.as_expr()} has non-real roots")
    roots = [Interval(Fraction(int(a.p), int(a.q)), Fraction(int(b.p), int(b.q)))
             for (a, b), _mult in intervals]
    roots.sort(key=lambda r: r.lo, reverse=True)
    return NumberField(tuple(coeffs), tuple(roots))


def load_field(path_or_dict) -> NumberField:
    data = _read_json(path_or_dict)
    return make_field(data["min_poly"])


def _read_json(path_or_dict):
    if isinstance(path_or_dict, dict):
        return path_or_dict
    with open(path_or_dict) as fh:
        return json.load(fh)


def _reduce(coeffs, f):
    n = len(f) - 1
    coeffs = list(coeffs)
    for d in range(len(coeffs) - 1, n - 1, -1):
        c = coeffs[d]
        if c:
            for j in range(n):
                coeffs[d - n + j] -= c * f[j]
        coeffs[d] = Fraction(0)
    coeffs = coeffs[:n] + [Fraction(0)] * max(0, n - len(coeffs))
    return tuple(coeffs)


def _horner_sign(f, x: Fraction) -> int:
    acc = Fraction(0)
    for c in reversed(f):
        acc = acc * x + c
    return (acc > 0) - (acc < 0)


@lru_cache(maxsize=4096)
def _refined_root(f, base: Interval, bits: int) -> Interval:
    lo, hi = base.lo, base.hi
    target = Fraction(1, 1 << bits)
    if lo == hi:
        return base
    s_lo = _horner_sign(f, lo)
    if s_lo == 0:
        return Interval.point(lo)
    if _horner_sign(f, hi) == 0:
        return Interval.point(hi)
    while hi - lo > target:
        mid = (lo + hi) / 2
        s = _horner_sign(f, mid)
        if s == 0:
            return Interval.point(mid)
        if s == s_lo:
            lo = mid
        else:
            hi = mid
    return Interval(lo, hi)


@dataclass(frozen=True, eq=True)
class FieldElement:
    field: NumberField
    coords: tuple

    # arithmetic -----------------------------------------------------------
    def _lift(self, other):
        if isinstance(other, FieldElement):
            return other
        return self.field.element([other])

    def __add__(self, other):
        other = self._lift(other)
        return FieldElement(self.field, tuple(a + b for a, b in zip(self.coords, other.coords)))

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.field, tuple(-a for a in self.coords))

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, FieldElement):
            q = Fraction(other)
            return FieldElement(self.field, tuple(a * q for a in self.coords))
        n = self.field.degree
        prod = [Fraction(0)] * (2 * n - 1)
        for i, a in enumerate(self.coords):
            if a:
                for j, b in enumerate(other.coords):
                    if b:
                        prod[i + j] += a * b
        return FieldElement(self.field, _reduce(prod, self.field.min_poly))

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero field element")
        e1 = [Fraction(int(i == 0)) for i in range(self.field.degree)]
        return FieldElement(self.field, tuple(linalg.solve(self.multiplication_matrix(), e1)))

    def __truediv__(self, other):
        if not isinstance(other, FieldElement):
            return self * (1 / Fraction(other))
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result, base = self.field.one(), self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    # exact invariants -----------------------------------------------------
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coords[1:])

    def multiplication_matrix(self):
        """Matrix of y -> self*y in the power basis (columns are self * t^j)."""
        cols = [(self * self.field.theta_power(j)).coords for j in range(self.field.degree)]
        return linalg.transpose([list(c) for c in cols])

    def multiplication_matrix_trace(self) -> Fraction:
        m = self.multiplication_matrix()
        return sum((m[i][i] for i in range(len(m))), Fraction(0))

    # certified embeddings -------------------------------------------------
    def embed_interval(self, i: int, bits: int) -> Interval:
        if self.is_rational():
            return Interval.point(self.coords[0])
        r = self.field.root_interval(i, bits)
        acc = Interval.point(0)
        for c in reversed(self.coords):
            acc = acc * r + c
        return acc

    def __repr__(self):
        terms = []
        for k, c in enumerate(self.coords):
            if c:
                terms.append(f"{c}" if k == 0 else f"{c}*t^{k}" if k > 1 else f"{c}*t")
        return "FieldElement(" + (" + ".join(terms) or "0") + ")"


def trace(x: FieldElement) -> Fraction:
    return sum((c * t for c, t in zip(x.coords, x.field.power_traces)), Fraction(0))


def norm(x: FieldElement) -> Fraction:
    return linalg.det(x.multiplication_matrix())


@dataclass(frozen=True, repr=False)
class RealValue(Interval):
    """Certified enclosure of tau_i(x), refinable on demand through its backing element."""

    backing: tuple = dc_field(default=None, compare=False)  # (FieldElement, index)

    def refine(self, width) -> "RealValue":
        if self.backing is None or self.width <= width:
            return self
        x, i = self.backing
        new = embed(x, i, width)
        return RealValue(max(self.lo, new.lo), min(self.hi, new.hi), backing=self.backing)

    @property
    def interval(self) -> Interval:
        return Interval(self.lo, self.hi)


def embed(x: FieldElement, i: int, width=Fraction(1, 2**53)) -> RealValue:
    """Interval of width <= ``width`` containing tau_i(x) (0-based embedding index)."""
    width = Fraction(width)
    if not 0 <= i < x.field.degree:
        raise IndexError(f"embedding index {i} out of range")
    bits = max(16, width.denominator.bit_length() - width.numerator.bit_length() + 8)
    while True:
        v = x.embed_interval(i, bits)
        if v.width <= width:
            return RealValue(v.lo, v.hi, backing=(x, i))
        bits += max(16, bits // 2)


def sign_at(x: FieldElement, i: int) -> int:
    """Exact sign of tau_i(x)."""
    if x.is_zero():
        return 0
    bits = 32
    while True:
        s = x.embed_interval(i, bits).sign()
        if s:
            return s
        bits *= 2


def embeddings(x: FieldElement, bits: int = 64):
    return [x.embed_interval(i, bits) for i in range(x.field.degree)]
