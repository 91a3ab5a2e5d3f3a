"""Exact expansion of N_{w*}(I y)^(k-1) and assembly of the conical zeta combination.

For a verified fan and k >= 2,

    zeta_{F,+}(a^-1, k) = 1/sqrt(d_F) * sum_terms coeff * zeta_{C_I}(kk),

with C_I = transpose(I) T_{w,+}, |kk| = nk, kk >= 1 and
coeff = (kk-1)! c_{I,kk-1} / (((k-1)!)^n N(a)).  The only irrational quantity,
1/sqrt(d_F), is carried symbolically as the integer d_F.
"""
from __future__ import annotations

import itertools
import json
import logging
import math
import warnings
from dataclasses import dataclass, field as dc_field, replace
from fractions import Fraction

from . import linalg
from .cones import Cone, Membership, contains, transform_cone
from .errors import InputError, NoSymmetry
from .lattice import EmbeddedLattice, dual_norm_polynomial, positivity_cone
from .polynomial import Polynomial

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CoefficientTable:
    """c_{I,kk} for every top cone I: the expanded polynomials N_{w*}(I y)^(k-1)."""

    k: int
    n: int
    polys: dict  # fan index -> Polynomial

    def __getitem__(self, key):
        i, mono = key
        return self.polys[i].coefficient(mono)

    def cones(self):
        return sorted(self.polys)

    def items(self):
        for i in self.cones():
            for mono, c in self.polys[i].items():
                yield i, mono, c

    def __len__(self):
        return sum(len(p.terms) for p in self.polys.values())


@dataclass(frozen=True)
class Term:
    cone_index: int
    index: tuple
    coeff: Fraction
    cone: Cone = dc_field(compare=False, repr=False, default=None)


@dataclass(frozen=True)
class ZetaCombination:
    terms: tuple
    disc_F: int         # the value is (1/sqrt(disc_F)) * sum coeff * zeta
    k: int
    n: int
    symmetry: tuple | None = None   # permutations used to fold indices
    flags: tuple = ()

    def as_dict(self):
        """{(cone_index, index): coeff}"""
        return {(t.cone_index, t.index): t.coeff for t in self.terms}

    def by_index(self, cone_index=None):
        out = {}
        for t in self.terms:
            if cone_index is None or t.cone_index == cone_index:
                out[t.index] = out.get(t.index, 0) + t.coeff
        return out

    def cone(self, i):
        for t in self.terms:
            if t.cone_index == i:
                return t.cone
        raise KeyError(i)

    def value(self, zeta):
        """Exact sum coeff * zeta(cone_index, index) for a user-supplied assignment (no prefactor)."""
        return sum((t.coeff * zeta(t.cone_index, t.index) for t in self.terms), Fraction(0))

    def to_json(self) -> dict:
        return {
            "prefactor_inv_sqrt_disc": self.disc_F,
            "k": self.k,
            "terms": [
                {"cone": t.cone_index, "index": list(t.index), "coeff": linalg.fraction_str(t.coeff)}
                for t in self.terms
            ],
            "symmetry": None if self.symmetry is None else [list(s) for s in self.symmetry],
            "flags": list(self.flags),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=1)


def expand_coefficients(lat: EmbeddedLattice, fan, k: int) -> CoefficientTable:
    if k < 2:
        raise InputError("k must be at least 2")
    base = dual_norm_polynomial(lat)
    polys = {}
    for i in fan.top:
        polys[i] = base.substitute_linear(fan.matrix(i)) ** (k - 1)
    return CoefficientTable(k, lat.n, polys)


def cone_for(lat: EmbeddedLattice, fan, i: int) -> Cone:
    """C_I = transpose(I) T_{w,+} for the top cone i of the fan."""
    c = transform_cone(fan.matrix(i), positivity_cone(lat))
    return replace(c, label=f"C[{i}]")


def _factorial_multi(mono):
    return math.prod(math.factorial(e) for e in mono)


def assemble(lat: EmbeddedLattice, fan, k: int, table: CoefficientTable | None = None) -> ZetaCombination:
    table = table or expand_coefficients(lat, fan, k)
    n = lat.n
    scale = Fraction(1, math.factorial(k - 1) ** n) / lat.ideal_norm
    terms = []
    for i in table.cones():
        cone = cone_for(lat, fan, i)
        for mono, c in table.polys[i].items():
            coeff = _factorial_multi(mono) * c * scale
            if coeff:
                terms.append(Term(i, tuple(e + 1 for e in mono), coeff, cone))
    return ZetaCombination(tuple(terms), lat.disc_F, k, n)


def integral_normalization(comb: ZetaCombination):
    """Coefficients times d_F^(k-1), so the display reads 1/(d_F^(k-1) sqrt d_F) * sum c' zeta.

    For the cubic example with d_F = 49 this is the tabulated c' (prefactor 1/7^(2k-1)).
    """
    s = Fraction(comb.disc_F) ** (comb.k - 1)
    return {(t.cone_index, t.index): t.coeff * s for t in comb.terms}


# symmetrization


def _permute(sigma, x):
    """(sigma x)_j = x_{sigma[j]}"""
    return tuple(x[s] for s in sigma)


def _poly_permuted(p: Polynomial, sigma):
    # q(x) = p(sigma x): substitute x_i -> x_{sigma[i]}
    n = p.nvars
    m = [[int(j == sigma[i]) for j in range(n)] for i in range(n)]
    return p.substitute_linear(m)


def _proportional(p: Polynomial, q: Polynomial) -> bool:
    if set(p.terms) != set(q.terms):
        return False
    it = iter(p.terms)
    m0 = next(it, None)
    if m0 is None:
        return True
    r = q.terms[m0] / p.terms[m0]
    return all(q.terms[m] == r * p.terms[m] for m in p.terms)


def stabilizes(sigma, cone: Cone) -> bool:
    """Exact test that the coordinate permutation sigma maps the open cone onto itself.

    sigma must permute the walls (the form polynomial is preserved up to a scalar),
    and then one interior point landing inside pins the chamber.
    """
    p = cone.form_polynomial()
    if not _proportional(p, _poly_permuted(p, sigma)):
        return False
    return contains(cone, _permute(sigma, cone.interior_point())) is Membership.INSIDE


def _compose(a, b):
    return tuple(a[b[j]] for j in range(len(a)))


def _closure(perms, n):
    ident = tuple(range(n))
    group = {ident}
    frontier = [ident]
    while frontier:
        g = frontier.pop()
        for s in perms:
            h = _compose(g, s)
            if h not in group:
                group.add(h)
                frontier.append(h)
    return sorted(group)


def symmetrize(comb: ZetaCombination, sigma=None) -> ZetaCombination:
    """Fold indices along coordinate permutations that stabilize every cone of the combination.

    With ``sigma`` None the full common stabilizer is used.  If it is trivial (or the
    given sigma fails on some cone) the input comes back unchanged, flagged NoSymmetry.
    """
    n = comb.n
    cones = {}
    for t in comb.terms:
        cones.setdefault(t.cone_index, t.cone)
    if sigma is not None:
        candidates = [tuple(sigma)]
    else:
        candidates = [s for s in itertools.permutations(range(n)) if s != tuple(range(n))]
    good = [s for s in candidates if all(stabilizes(s, c) for c in cones.values())]
    if not good or not comb.terms:
        msg = "no coordinate permutation stabilizes every cone; combination left unchanged"
        warnings.warn(msg, NoSymmetry, stacklevel=2)
        return replace(comb, flags=tuple(comb.flags) + ("NoSymmetry",))
    group = _closure(good, n)
    merged = {}
    for t in comb.terms:
        rep = max(_permute(g, t.index) for g in group)
        key = (t.cone_index, rep)
        merged[key] = merged.get(key, Fraction(0)) + t.coeff
    terms = tuple(
        Term(i, idx, c, cones[i])
        for (i, idx), c in sorted(merged.items(), key=lambda kv: (kv[0][0], tuple(-v for v in kv[0][1])))
        if c
    )
    return replace(comb, terms=terms, symmetry=tuple(g for g in group if g != tuple(range(n))))
