"""Embedded ideal lattices: basis w of a fractional ideal, its trace dual, norm forms
and the regular representation."""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from . import linalg
from .errors import DiscriminantMismatch, InputError, NotAnIdeal, SingularBasis, ZeroElement
from .field import FieldElement, NumberField, RealValue, embed, load_field, make_field, norm, sign_at, trace
from .intervals import Interval
from .polynomial import Polynomial


@dataclass(frozen=True)
class EmbeddedLattice:
    field: NumberField
    w: tuple            # FieldElements, Z-basis of the ideal
    w_star: tuple       # trace-dual basis
    ideal_norm: Fraction
    disc_F: int
    units: tuple = ()   # generators of the totally positive unit group
    monogenic: bool = False

    @property
    def n(self) -> int:
        return self.field.degree

    @property
    def basis_matrix(self):
        """Rows are the power-basis coordinates of w_1..w_n."""
        return [list(x.coords) for x in self.w]

    def w_embedded(self, i: int, width=Fraction(1, 2**60)):
        """The vector w^{(i)} = tau_i(w) as RealValues."""
        return [embed(x, i, width) for x in self.w]

    def w_star_embedded(self, i: int, width=Fraction(1, 2**60)):
        return [embed(x, i, width) for x in self.w_star]

    def element(self, x) -> FieldElement:
        """<x, w> for a rational coordinate vector x."""
        return _pair(x, self.w, self.field)

    def dual_element(self, x) -> FieldElement:
        """<x, w*>."""
        return _pair(x, self.w_star, self.field)

    def coordinates(self, xi: FieldElement):
        """Coordinates of xi in the basis w: x_i = Tr(xi * w*_i)."""
        return [trace(xi * d) for d in self.w_star]

    @cached_property
    def unit_matrices(self):
        """rho_w(eps) for each generator unit."""
        return tuple(tuple(map(tuple, regular_representation(self, u))) for u in self.units)

    def det_W(self, bits: int = 64) -> Interval:
        return _det_interval([[x.embed_interval(i, bits) for x in self.w] for i in range(self.n)])

    def to_json(self) -> dict:
        out = self.field.to_json()
        out["ideal_basis"] = [[linalg.fraction_str(c) for c in x.coords] for x in self.w]
        out["disc_F"] = self.disc_F
        if self.units:
            out["units"] = [[linalg.fraction_str(c) for c in u.coords] for u in self.units]
        out["monogenic"] = self.monogenic
        return out


def _pair(x, basis, field):
    acc = field.zero()
    for c, b in zip(x, basis):
        if c:
            acc = acc + b * Fraction(c)
    return acc


def _det_interval(m):
    n = len(m)
    total = Interval.point(0)
    for perm in itertools.permutations(range(n)):
        sign = _perm_sign(perm)
        t = Interval.point(sign)
        for i, j in enumerate(perm):
            t = t * m[i][j]
        total = total + t
    return total


def _perm_sign(perm):
    sign, seen = 1, list(perm)
    for i in range(len(seen)):
        while seen[i] != i:
            j = seen[i]
            seen[i], seen[j] = seen[j], seen[i]
            sign = -sign
    return sign


def _trace_dual(field, w):
    gram = [[trace(a * b) for b in w] for a in w]
    gram_inv = linalg.inverse(gram)
    dual = tuple(_pair(row, w, field) for row in gram_inv)
    return dual, linalg.det(gram)


def _det_W_sign(field, w):
    bits = 32
    while True:
        s = _det_interval([[x.embed_interval(i, bits) for x in w] for i in range(field.degree)]).sign()
        if s:
            return s
        bits *= 2


def build_lattice(field: NumberField, ideal_basis, disc_F=None, units=(), monogenic=False) -> EmbeddedLattice:
    """Set up w, w*, N(a) and d_F from an ideal basis given as power-basis rows."""
    n = field.degree
    rows = linalg.as_fraction_matrix(ideal_basis)
    if len(rows) != n or any(len(r) != n for r in rows):
        raise SingularBasis(f"ideal basis must be {n} x {n}")
    if linalg.det(rows) == 0:
        raise SingularBasis("ideal basis rows are linearly dependent")
    w = [field.element(r) for r in rows]

    # theta-stability: theta * w_j must have integer coordinates in the basis w
    theta = field.theta()
    basis_t = linalg.transpose(rows)
    for j, x in enumerate(w):
        c = linalg.solve(basis_t, list((theta * x).coords))
        if any(v.denominator != 1 for v in c):
            raise NotAnIdeal(f"theta * w_{j + 1} is not in the Z-span of w")

    if _det_W_sign(field, w) < 0:
        w[0] = -w[0]
    w = tuple(w)
    w_star, disc_w = _trace_dual(field, w)

    if disc_F is None:
        # only O_F itself: the lattice must be an order containing 1
        order = all(
            all(v.denominator == 1 for v in linalg.solve(basis_t, list((a * b).coords)))
            for a in w for b in w
        ) and all(v.denominator == 1 for v in linalg.solve(basis_t, list(field.one().coords)))
        if not order:
            raise InputError("disc_F must be supplied for ideals other than the maximal order")
        disc_F, ideal_norm = int(disc_w), Fraction(1)
    else:
        disc_F = int(disc_F)
        ratio = disc_w / disc_F
        num, den = math.isqrt(ratio.numerator), math.isqrt(ratio.denominator)
        if ratio <= 0 or num * num != ratio.numerator or den * den != ratio.denominator:
            raise DiscriminantMismatch(f"(det W)^2 / d_F = {ratio} is not a rational square")
        ideal_norm = Fraction(num, den)

    lat = EmbeddedLattice(field, w, w_star, ideal_norm, disc_F, (), bool(monogenic))
    checked = []
    for u in units:
        u = u if isinstance(u, FieldElement) else field.element(u)
        if abs(norm(u)) != 1:
            raise InputError(f"{u} is not a unit")
        if any(sign_at(u, i) <= 0 for i in range(n)):
            raise InputError(f"unit {u} is not totally positive")
        m = regular_representation(lat, u)
        if not linalg.is_integral(m) or linalg.det(m) != 1:
            raise InputError(f"unit {u} does not preserve the ideal lattice")
        checked.append(u)
    return EmbeddedLattice(field, w, w_star, ideal_norm, disc_F, tuple(checked), bool(monogenic))


def load_lattice(path_or_dict) -> EmbeddedLattice:
    """Field file + optional ideal/unit data; the ideal defaults to the power basis order."""
    if isinstance(path_or_dict, dict):
        data = path_or_dict
    else:
        with open(path_or_dict) as fh:
            data = json.load(fh)
    field = load_field(data)
    n = field.degree
    basis = data.get("ideal_basis")
    if basis is None:
        # w = (t^(n-1), ..., t, 1), the ordering used in the worked examples
        basis = [[int(j == n - 1 - i) for j in range(n)] for i in range(n)]
    basis = [[Fraction(v) for v in row] for row in basis]
    units = [[Fraction(v) for v in u] for u in data.get("units", [])]
    return build_lattice(field, basis, data.get("disc_F"), units, data.get("monogenic", False))


def regular_representation(lat: EmbeddedLattice, alpha: FieldElement):
    """Matrix R with <R x, w> = alpha <x, w>; entry (i, j) is Tr(alpha w_j w*_i)."""
    if not isinstance(alpha, FieldElement):
        alpha = lat.field.element([alpha])
    if alpha.is_zero():
        raise ZeroElement("regular representation of 0")
    n = lat.n
    return [[trace(alpha * lat.w[j] * lat.w_star[i]) for j in range(n)] for i in range(n)]


def norm_form(field: NumberField, basis) -> Polynomial:
    """N(<x, basis>) as an exact polynomial: det(sum_j x_j M(basis_j))."""
    n = field.degree
    mats = [b.multiplication_matrix() for b in basis]
    entries = [[Polynomial.linear([mats[k][r][c] for k in range(n)]) for c in range(n)] for r in range(n)]
    total = Polynomial(n)
    for perm in itertools.permutations(range(n)):
        t = Polynomial.constant(n, _perm_sign(perm))
        for r, c in enumerate(perm):
            t = t * entries[r][c]
        total = total + t
    return total


def dual_norm_polynomial(lat: EmbeddedLattice) -> Polynomial:
    """N_{w*}(x) = prod_i <x, w*^{(i)}>."""
    return norm_form(lat.field, lat.w_star)


def norm_polynomial(lat: EmbeddedLattice) -> Polynomial:
    """N_w(x) = N(<x, w>)."""
    return norm_form(lat.field, lat.w)


def positivity_cone(lat: EmbeddedLattice):
    """T_{w,+}: generated by the w*^{(i)}; x inside iff <x, w> is totally positive."""
    from .cones import Cone, EmbeddedVector

    n = lat.n
    return Cone.algebraic(
        [EmbeddedVector(lat.w_star, i) for i in range(n)],
        [EmbeddedVector(lat.w, i) for i in range(n)],
        label="T_w+",
    )


def embedding_cone(lat: EmbeddedLattice):
    """C_(w^(1),...,w^(n)): generated by the w^{(i)}; x inside iff <x, w*> is totally positive."""
    from .cones import Cone, EmbeddedVector

    n = lat.n
    return Cone.algebraic(
        [EmbeddedVector(lat.w, i) for i in range(n)],
        [EmbeddedVector(lat.w_star, i) for i in range(n)],
        label="C_w",
    )
