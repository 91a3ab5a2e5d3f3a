"""Sparse multivariate polynomials with exact rational coefficients.

A polynomial is a mapping from exponent tuples to nonzero Fractions.  Only what
the norm-form expansion needs is here: ring operations, linear substitution,
evaluation and coefficient access.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Mapping


class Polynomial:
    __slots__ = ("nvars", "terms")

    def __init__(self, nvars: int, terms: Mapping[tuple, object] = ()):
        self.nvars = nvars
        clean = {}
        for mono, c in dict(terms).items():
            c = Fraction(c)
            if c:
                if len(mono) != nvars:
                    raise ValueError(f"monomial {mono} has wrong arity for {nvars} variables")
                clean[tuple(mono)] = c
        self.terms = clean

    @classmethod
    def constant(cls, nvars, c=1):
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def variable(cls, nvars, i):
        mono = [0] * nvars
        mono[i] = 1
        return cls(nvars, {tuple(mono): 1})

    @classmethod
    def linear(cls, coeffs):
        """sum_i coeffs[i] * x_i"""
        n = len(coeffs)
        return cls(n, {tuple(int(i == j) for j in range(n)): c for i, c in enumerate(coeffs)})

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Polynomial(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            q = Fraction(other)
            return Polynomial(self.nvars, {m: c * q for m, c in self.terms.items()})
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, 0) + c1 * c2
        return Polynomial(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative power")
        result = Polynomial.constant(self.nvars)
        for _ in range(e):
            result = result * self
        return result

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.nvars, other)
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise ValueError("variable count mismatch")
            return other
        return Polynomial.constant(self.nvars, other)

    def coefficient(self, mono) -> Fraction:
        return self.terms.get(tuple(mono), Fraction(0))

    def degrees(self):
        return {sum(m) for m in self.terms}

    def is_homogeneous(self, degree=None) -> bool:
        ds = self.degrees()
        if degree is None:
            return len(ds) <= 1
        return ds <= {degree}

    def __call__(self, *point):
        """Exact evaluation at a point (any ring elements supporting + and *)."""
        if len(point) == 1 and isinstance(point[0], (list, tuple)):
            point = point[0]
        total = 0
        for mono, c in self.terms.items():
            t = c
            for x, e in zip(point, mono):
                if e:
                    t = t * x**e
            total = total + t
        return total

    def substitute_linear(self, matrix) -> "Polynomial":
        """Return p(M y), i.e. substitute x_i = sum_j M[i][j] y_j."""
        forms = [Polynomial.linear([Fraction(v) for v in row]) for row in matrix]
        nout = len(matrix[0])
        out = Polynomial(nout)
        cache = {}
        for mono, c in self.terms.items():
            t = Polynomial.constant(nout, c)
            for i, e in enumerate(mono):
                if e:
                    key = (i, e)
                    if key not in cache:
                        cache[key] = forms[i] ** e
                    t = t * cache[key]
            out = out + t
        return out

    def items(self):
        """Terms sorted lexicographically by exponent, descending."""
        return sorted(self.terms.items(), reverse=True)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono, c in self.items():
            vars_ = "*".join(f"x{i + 1}" + (f"^{e}" if e > 1 else "") for i, e in enumerate(mono) if e)
            parts.append(f"({c})" + (f"*{vars_}" if vars_ else ""))
        return " + ".join(parts)
