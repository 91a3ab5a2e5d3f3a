"""Open simplicial cones with exact membership, smoothness and unimodular transforms.

A coordinate vector is either rational (a tuple of Fractions) or algebraic: an
:class:`EmbeddedVector`, i.e. a vector u of field elements read through one real
embedding tau_i.  Membership in a full-dimensional cone is decided by the signs of
its dual linear forms ``x -> <x, f>``; for algebraic forms that is the exact sign of
the field element tau_i(<x, u>).
"""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

from . import linalg
from .errors import NonSimplicial, NotUnimodular, RankDeficient
from .field import FieldElement, sign_at
from .intervals import Interval


class Membership(enum.Enum):
    INSIDE = "inside"
    BOUNDARY = "boundary"
    OUTSIDE = "outside"


@dataclass(frozen=True)
class EmbeddedVector:
    """tau_index(coords): a real vector with exact algebraic backing."""

    coords: tuple
    index: int

    @property
    def field(self):
        return self.coords[0].field

    def dot(self, x) -> FieldElement:
        acc = self.field.zero()
        for c, u in zip(x, self.coords):
            if c:
                acc = acc + u * Fraction(c)
        return acc

    def dot_sign(self, x) -> int:
        return sign_at(self.dot(x), self.index)

    def real(self, bits: int = 64):
        return [u.embed_interval(self.index, bits) for u in self.coords]

    def transform(self, matrix) -> "EmbeddedVector":
        """Apply a rational matrix to the coordinate vector (commutes with tau)."""
        new = []
        for row in matrix:
            acc = self.field.zero()
            for m, u in zip(row, self.coords):
                if m:
                    acc = acc + u * Fraction(m)
            new.append(acc)
        return EmbeddedVector(tuple(new), self.index)

    def coordinate_sign(self, j: int) -> int:
        return sign_at(self.coords[j], self.index)


def _as_rational(v):
    return tuple(Fraction(c) for c in v)


def _rational_dot(x, f):
    return sum((Fraction(a) * b for a, b in zip(x, f)), Fraction(0))


@dataclass(frozen=True)
class Cone:
    generators: tuple          # columns (rational tuples or EmbeddedVectors)
    forms: tuple | None        # dual forms: x in C iff <x, f> > 0 for every f
    kind: str                  # "rational" | "algebraic"
    label: str = ""

    # construction -----------------------------------------------------------
    @classmethod
    def rational(cls, columns, label=""):
        cols = tuple(_as_rational(c) for c in columns)
        if not cols:
            raise ValueError("a cone needs at least one generator")
        if any(all(v == 0 for v in c) for c in cols):
            raise ValueError("zero generator")
        n = len(cols[0])
        forms = None
        if len(cols) == n:
            g = linalg.transpose([list(c) for c in cols])
            d = linalg.det(g)
            if d == 0:
                raise NonSimplicial("generators are linearly dependent")
            # rows of G^{-1} scaled by |det G| (integral for integral G) keep the sign pattern
            inv = linalg.inverse(g)
            forms = tuple(tuple(v * abs(d) for v in row) for row in inv)
        return cls(cols, forms, "rational", label)

    @classmethod
    def algebraic(cls, generators, forms, label=""):
        return cls(tuple(generators), tuple(forms), "algebraic", label)

    @property
    def dim(self) -> int:
        return len(self.generators)

    @property
    def ambient_dim(self) -> int:
        g = self.generators[0]
        return len(g.coords) if isinstance(g, EmbeddedVector) else len(g)

    def generator_matrix(self):
        """n x r matrix for rational cones."""
        if self.kind != "rational":
            raise TypeError("only rational cones have a rational generator matrix")
        return linalg.transpose([list(c) for c in self.generators])

    @property
    def orientation(self) -> int:
        if self.kind != "rational" or self.dim != self.ambient_dim:
            raise TypeError("orientation is defined for full-dimensional rational cones")
        d = linalg.det(self.generator_matrix())
        return (d > 0) - (d < 0)

    @property
    def smooth(self) -> bool:
        return self.kind == "rational" and is_smooth(self.generator_matrix())

    # certified data ---------------------------------------------------------
    def form_signs(self, x):
        if self.forms is None:
            raise NonSimplicial("cone has no dual-form description")
        if self.kind == "rational":
            return [(v > 0) - (v < 0) for v in (_rational_dot(x, f) for f in self.forms)]
        return [f.dot_sign(x) for f in self.forms]

    def is_totally_positive(self) -> bool:
        """Every generator has all coordinates > 0 (certified)."""
        n = self.ambient_dim
        for g in self.generators:
            if isinstance(g, EmbeddedVector):
                if any(g.coordinate_sign(j) <= 0 for j in range(n)):
                    return False
            elif any(v <= 0 for v in g):
                return False
        return True

    def real_forms(self, bits: int = 64):
        """Dual forms as interval rows."""
        if self.kind == "rational":
            return [[Interval.point(v) for v in f] for f in self.forms]
        return [f.real(bits) for f in self.forms]

    def real_generators(self, bits: int = 64):
        if self.kind == "rational":
            return [[Interval.point(v) for v in g] for g in self.generators]
        return [g.real(bits) for g in self.generators]

    def normalized_ray_bounds(self, bits: int = 64):
        """Per coordinate j, (lower, upper) rational bounds on g_j / sum(g) over generators."""
        n = self.ambient_dim
        lows, highs = [None] * n, [None] * n
        for g in self.real_generators(bits):
            s = reduce(lambda a, b: a + b, g)
            for j in range(n):
                q = g[j] / s
                lows[j] = q.lo if lows[j] is None else min(lows[j], q.lo)
                highs[j] = q.hi if highs[j] is None else max(highs[j], q.hi)
        return lows, highs

    def form_polynomial(self):
        """prod_f <x, f> as an exact rational polynomial (zero set = the walls)."""
        from .lattice import norm_form
        from .polynomial import Polynomial

        if self.forms is None:
            raise NonSimplicial("cone has no dual-form description")
        if self.kind == "rational":
            p = Polynomial.constant(self.ambient_dim)
            for f in self.forms:
                p = p * Polynomial.linear(list(f))
            return p
        coords = {f.coords for f in self.forms}
        if len(coords) != 1 or sorted(f.index for f in self.forms) != list(range(self.ambient_dim)):
            raise NonSimplicial("algebraic forms are not a full set of conjugates")
        u = self.forms[0].coords
        return norm_form(u[0].field, u)

    def interior_point(self):
        """A rational point certified to be inside the cone."""
        if self.kind == "rational":
            return tuple(sum(c) for c in zip(*self.generators))
        gens = self.real_generators(64)
        n = self.ambient_dim
        approx = [sum((g[j] / reduce(lambda a, b: a + b, g)).mid for g in gens) for j in range(n)]
        for scale in (2**e for e in range(4, 200, 4)):
            x = tuple(Fraction(round(a * scale)) for a in approx)
            if contains(self, x) is Membership.INSIDE:
                return x
        raise RuntimeError("could not find an interior point")


def contains(cone: Cone, x) -> Membership:
    """Exact classification of a rational point; cones are open, so the origin is outside."""
    x = _as_rational(x)
    if all(v == 0 for v in x):
        return Membership.OUTSIDE
    if cone.forms is not None:
        signs = cone.form_signs(x)
        if any(s < 0 for s in signs):
            return Membership.OUTSIDE
        return Membership.INSIDE if all(s > 0 for s in signs) else Membership.BOUNDARY
    if cone.kind != "rational":
        raise NonSimplicial("algebraic cone without dual forms")
    lam = _span_coefficients(cone.generator_matrix(), x)
    if lam is None or any(v < 0 for v in lam):
        return Membership.OUTSIDE
    return Membership.INSIDE if all(v > 0 for v in lam) else Membership.BOUNDARY


def _span_coefficients(gens, x):
    """lambda with gens @ lambda = x, or None when x is outside the span."""
    n, r = len(gens), len(gens[0])
    for rows in itertools.combinations(range(n), r):
        sub = [gens[i] for i in rows]
        if linalg.det(sub) != 0:
            lam = linalg.solve(sub, [x[i] for i in rows])
            if linalg.matvec(gens, lam) == list(x):
                return lam
            return None
    raise RankDeficient("generators are linearly dependent")


def is_smooth(generators) -> bool:
    """True iff the integer columns extend to a Z-basis: gcd of maximal minors is 1."""
    gens = [[Fraction(v) for v in row] for row in generators]
    if any(v.denominator != 1 for row in gens for v in row):
        return False
    r = len(gens[0])
    ms = [int(m) for m in linalg.minors(gens, r)]
    g = reduce(math.gcd, (abs(m) for m in ms), 0)
    if g == 0:
        raise RankDeficient("generator columns are linearly dependent")
    return g == 1


def transform_cone(matrix, cone: Cone) -> Cone:
    """Image of ``cone`` under x -> transpose(I) x for a determinant-one integer matrix I."""
    I = linalg.as_fraction_matrix(matrix)
    if not linalg.is_integral(I) or linalg.det(I) != 1:
        raise NotUnimodular("transform matrix must be an integer matrix of determinant 1")
    It = linalg.transpose(I)
    Iinv = linalg.inverse(I)
    label = cone.label
    if cone.kind == "rational":
        cols = [tuple(linalg.matvec(It, list(g))) for g in cone.generators]
        return Cone.rational(cols, label)
    gens = [g.transform(It) for g in cone.generators]
    forms = [f.transform(Iinv) for f in cone.forms]
    return Cone.algebraic(gens, forms, label)
