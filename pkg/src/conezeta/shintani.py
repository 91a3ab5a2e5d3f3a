"""Shintani cone decompositions: construction for n <= 2, exact verification for any n."""
from __future__ import annotations

import itertools
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from . import linalg
from .cones import Cone, Membership, contains, is_smooth
from .errors import (
    BadDeterminant,
    GeneratorOutsideClosure,
    NotQuadratic,
    NotSmooth,
    RankDeficient,
    UnitNotFound,
)
from .field import FieldElement, norm, sign_at
from .lattice import EmbeddedLattice, embedding_cone, norm_polynomial, regular_representation

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Fan:
    """A finite set of smooth integer cones; each cone is a tuple of column vectors."""

    cones: tuple

    @classmethod
    def from_columns(cls, cones):
        return cls(tuple(tuple(tuple(int(v) for v in col) for col in c) for c in cones))

    @property
    def n(self) -> int:
        return len(self.cones[0][0])

    @property
    def top(self):
        """Indices of the n-dimensional cones (the set Phi^(n))."""
        return [i for i, c in enumerate(self.cones) if len(c) == self.n]

    def matrix(self, i):
        """Cone i as an n x r matrix whose columns are the generators."""
        return [list(row) for row in zip(*self.cones[i])]

    def to_json(self) -> dict:
        return {"cones": [{"generators": [list(col) for col in c]} for c in self.cones]}

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1)


@dataclass(frozen=True)
class DecompositionCertificate:
    fan: Fan
    height: int
    unit_exponent_bound: int
    status: str                    # "verified" | "failed"
    failure: str | None = None     # "CountZero" | "CountMany"
    witness: tuple | None = None
    witness_hits: tuple = ()
    points_checked: int = 0
    count_histogram: dict = dc_field(default_factory=dict)

    @property
    def verified(self) -> bool:
        return self.status == "verified"

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "height": self.height,
            "unit_exponent_bound": self.unit_exponent_bound,
            "points_checked": self.points_checked,
            "failure": self.failure,
            "witness": list(self.witness) if self.witness is not None else None,
            "witness_hits": [[list(e), i] for e, i in self.witness_hits],
            "count_histogram": {str(k): v for k, v in sorted(self.count_histogram.items())},
        }


# --- fan input -----------------------------------------------------------------

def load_fan(lat: EmbeddedLattice, fan_file) -> Fan:
    """Read a fan file and check smoothness, closure and det = +1 on top cones."""
    if isinstance(fan_file, Fan):
        data = fan_file.to_json()
    elif isinstance(fan_file, dict):
        data = fan_file
    else:
        with open(fan_file) as fh:
            data = json.load(fh)
    n = lat.n
    cones = []
    for idx, entry in enumerate(data["cones"]):
        cols = [[int(v) for v in col] for col in entry["generators"]]
        if not cols or any(len(c) != n for c in cols) or len(cols) > n:
            raise NotSmooth(idx, f"cone {idx} has malformed generators")
        mat = [list(r) for r in zip(*cols)]
        try:
            smooth = is_smooth(mat)
        except RankDeficient:
            smooth = False
        if not smooth:
            raise NotSmooth(idx)
        for col in cols:
            xi = lat.dual_element(col)
            if any(sign_at(xi, i) < 0 for i in range(n)):
                raise GeneratorOutsideClosure(f"generator {col} of cone {idx} is outside the closure of C_w")
        if len(cols) == n:
            d = linalg.det(mat)
            if d == -1:
                cols[0], cols[1] = (cols[1], cols[0]) if n > 1 else (cols[0], cols[0])
            elif d != 1:
                raise BadDeterminant(f"cone {idx} has determinant {d}")
        cones.append(cols)
    return Fan.from_columns(cones)


# --- quadratic construction ----------------------------------------------------------

def _unit_from_column(lat, y):
    """The element eps with eps*w_1 = <y, w>, if it is a totally positive unit != 1."""
    eps = lat.element(y) / lat.w[0]
    if eps == lat.field.one():
        return None
    m = regular_representation(lat, eps)
    if not linalg.is_integral(m) or linalg.det(m) != 1:
        return None
    if any(sign_at(eps, i) <= 0 for i in range(lat.n)):
        return None
    return eps


def _box_shell(n, h):
    """Integer points with max-norm exactly h."""
    rng = range(-h, h + 1)
    for y in itertools.product(rng, repeat=n):
        if max(abs(v) for v in y) == h:
            yield y


def fundamental_unit_quadratic(lat: EmbeddedLattice, max_height: int = 10**6) -> FieldElement:
    """Generator eps > 1 (first embedding) of the totally positive unit group, n = 2.

    Candidates are parametrised by the first column y of rho_w(eps).  Once some unit
    with tau_1 = E is found, every unit with 1 < tau_1 < E has |y_j| bounded in terms of
    E, and that whole box is searched, so the result is the generator.
    """
    if lat.n != 2:
        raise NotQuadratic("fundamental unit search is implemented for n = 2")
    nw = norm_polynomial(lat)
    target = abs(norm(lat.w[0]))  # N_w(y) = N(eps * w_1) = N(w_1) for a norm-one eps

    def candidates(h):
        for y in _box_shell(2, h):
            if abs(nw(y)) == target:
                eps = _unit_from_column(lat, y)
                if eps is not None:
                    yield eps

    found, h = [], 0
    while not found:
        h += 1
        if h > max_height:
            raise UnitNotFound(f"no totally positive unit with height <= {max_height}")
        found.extend(candidates(h))
    found = [u if sign_at(u - 1, 0) > 0 else u.inverse() for u in found]
    e = min(_tau_upper(u, 0) for u in found)
    # |y_j| = |sum_i tau_i(eps) tau_i(w_1 w*_j)| <= E * sum_i |tau_i(w_1 w*_j)|
    bound = 0
    for j in range(2):
        c = lat.w[0] * lat.w_star[j]
        s = sum(max(abs(iv.lo), abs(iv.hi)) for iv in (c.embed_interval(i, 64) for i in range(2)))
        bound = max(bound, math.ceil(e * s))
    for hh in range(h + 1, min(bound, max_height) + 1):
        found.extend(candidates(hh))
    best = None
    for u in found:
        if sign_at(u - 1, 0) < 0:
            u = u.inverse()
        if best is None or sign_at(u - best, 0) < 0:
            best = u
    return best


def _tau_upper(x, i):
    return x.embed_interval(i, 64).hi


def _primitive_base_point(lat):
    cw = embedding_cone(lat)
    h = 0
    while True:
        h += 1
        pts = [y for y in _box_shell(lat.n, h)
               if math.gcd(*y) == 1 and contains(cw, y) is Membership.INSIDE]
        if pts:
            return min(pts, key=lambda y: (sum(abs(v) for v in y), tuple(-v for v in y)))


def _cross(a, b):
    return a[0] * b[1] - a[1] * b[0]


def _sail(u, v):
    """Lattice points on the origin-facing boundary of conv(Z^2 cap closed cone(u, v) - 0),
    from u to v, for det(u, v) > 0."""
    xs = [0, u[0], v[0]]
    ys = [0, u[1], v[1]]
    pts = []
    for x in range(min(xs), max(xs) + 1):
        for y in range(min(ys), max(ys) + 1):
            p = (x, y)
            if p == (0, 0):
                continue
            # closed triangle 0, u, v
            if _cross(u, p) >= 0 and _cross(p, v) >= 0 and _cross((v[0] - u[0], v[1] - u[1]), (x - u[0], y - u[1])) >= 0:
                pts.append(p)
    chain = [tuple(u)]
    while chain[-1] != tuple(v):
        p = chain[-1]
        best = None
        for q in pts:
            if q == p or q in chain:
                continue
            d = (q[0] - p[0], q[1] - p[1])
            if best is None:
                best = q
                continue
            bd = (best[0] - p[0], best[1] - p[1])
            c = _cross(bd, d)
            # the origin lies to the left of every sail edge; prefer q on that side,
            # or collinear and closer so that edge lattice points are kept
            if c > 0 or (c == 0 and abs(d[0]) + abs(d[1]) < abs(bd[0]) + abs(bd[1])):
                best = q
        chain.append(best)
    return chain


def decompose_quadratic(lat: EmbeddedLattice, unit: FieldElement | None = None) -> Fan:
    """Smooth Shintani fan for a real quadratic field: the sail between a base ray and
    its unit translate, cut into unimodular 2-cones, plus the rays that bound them."""
    if lat.n != 2:
        raise NotQuadratic("decompose_quadratic needs n = 2")
    eps = unit if unit is not None else (lat.units[0] if lat.units else fundamental_unit_quadratic(lat))
    a0 = _primitive_base_point(lat)
    gamma_t = linalg.transpose(regular_representation(lat, eps))    # rho_{w*}(eps)
    a1 = tuple(int(v) for v in linalg.matvec(gamma_t, list(a0)))
    if _cross(a1, a0) < 0:
        inv = linalg.transpose(regular_representation(lat, eps.inverse()))
        a1 = tuple(int(v) for v in linalg.matvec(inv, list(a0)))
    chain = _sail(a1, a0)
    cones = [(chain[i], chain[i + 1]) for i in range(len(chain) - 1)]
    cones += [(p,) for p in chain[1:]]
    return Fan.from_columns(cones)


def trivial_fan(n: int = 1) -> Fan:
    """n = 1: the single cone generated by 1."""
    if n != 1:
        raise ValueError("the trivial fan is only defined for n = 1")
    return Fan.from_columns([((1,),)])


# --- verification -------------------------------------------------------------------

def _points_in_cw(lat, H):
    n = lat.n
    rng = np.arange(-H, H + 1, dtype=np.int64)
    grid = np.stack(np.meshgrid(*([rng] * n), indexing="ij"), axis=-1).reshape(-1, n)
    grid = grid[np.any(grid != 0, axis=1)]
    # interval prefilter on the dual forms <x, w*^{(i)}>, exact fallback near the walls
    keep = np.ones(len(grid), dtype=bool)
    ambiguous = np.zeros(len(grid), dtype=bool)
    for i in range(n):
        coef = np.array([float(x.embed_interval(i, 64).mid) for x in lat.w_star])
        mag = np.abs(coef)
        vals = grid @ coef
        tol = 1e-9 * (np.abs(grid) @ (mag + 1.0))
        keep &= vals > -tol
        ambiguous |= np.abs(vals) <= tol
    pts = []
    for x, amb in zip(grid[keep], ambiguous[keep]):
        if amb:
            xi = lat.dual_element([int(v) for v in x])
            if not all(sign_at(xi, i) > 0 for i in range(n)):
                continue
        pts.append(x)
    return np.array(pts, dtype=np.int64).reshape(-1, n)


def _unit_generators_t(lat, units):
    """Integer matrices rho_{w*}(eps) = transpose(rho_w(eps)) and their inverses."""
    out = []
    for u in units:
        m = linalg.transpose(regular_representation(lat, u))
        mi = linalg.inverse(m)
        out.append((np.array(m, dtype=object), np.array(mi, dtype=object)))
    return out


def _matpow(m, e, n):
    r = np.identity(n, dtype=object)
    for _ in range(e):
        r = r.dot(m)
    return r


class _ConeTest:
    """Vectorised exact membership of integer points in an open smooth cone."""

    def __init__(self, cols):
        self.cols = [list(c) for c in cols]
        n, r = len(cols[0]), len(cols)
        gens = [list(row) for row in zip(*cols)]
        for rows in itertools.combinations(range(n), r):
            sub = [gens[i] for i in rows]
            d = int(linalg.det(sub))
            if d:
                break
        inv = linalg.inverse(sub)
        self.rows = list(rows)
        self.adj = np.array([[int(v * d) for v in row] for row in inv], dtype=np.int64)
        self.d = d
        self.gens = np.array(gens, dtype=np.int64)

    def __call__(self, X):
        lam = X[:, self.rows] @ self.adj.T          # d * lambda
        ok = np.all(lam * np.sign(self.d) > 0, axis=1)
        recon = lam @ self.gens.T                    # d * (G lambda)
        ok &= np.all(recon == self.d * X, axis=1)
        return ok


def _exponent_window(r, V):
    return list(itertools.product(range(-V, V + 1), repeat=r))


def _cover_counts(lat, fan, X, units, exps, threads=1):
    n = lat.n
    gens = _unit_generators_t(lat, units)
    tests = [_ConeTest(c) for c in fan.cones]
    hmax = int(np.abs(X).max()) if len(X) else 0

    def work(chunk):
        counts = np.zeros(len(X), dtype=np.int64)
        hits = {}
        for e in chunk:
            ainv = np.identity(n, dtype=object)
            for (m, mi), k in zip(gens, e):
                ainv = ainv.dot(_matpow(mi if k > 0 else m, abs(k), n))
            big = max(abs(int(v)) for v in ainv.flat)
            if big * hmax * n < 2**62:
                Xp = X @ ainv.astype(np.int64).T
            else:
                Xp = X.astype(object) @ ainv.T
            for ci, t in enumerate(tests):
                ok = t(Xp)
                if ok.any():
                    counts += ok
                    hits[(e, ci)] = ok
        return counts, hits

    exps = list(exps)
    if threads > 1 and len(exps) > 1:
        chunks = [exps[i::threads] for i in range(threads)]
        with ThreadPoolExecutor(threads) as ex:
            results = list(ex.map(work, chunks))
    else:
        results = [work(exps)]
    counts = sum(r[0] for r in results)
    hits = {}
    for r in results:
        hits.update(r[1])
    return counts, hits


def _resolve_units(lat, units):
    if units is not None:
        return list(units)
    if lat.units:
        return list(lat.units)
    if lat.n == 1:
        return []
    if lat.n == 2:
        return [fundamental_unit_quadratic(lat)]
    raise UnitNotFound("totally positive unit generators must be supplied for n >= 3")


def choose_unit_window(lat, fan, H, units=None, max_V=40):
    """Smallest V such that no exponent vector on the window boundary moves any cone
    into contact with the height-H points of C_w."""
    units = _resolve_units(lat, units)
    if not units:
        return 0
    X = _points_in_cw(lat, H)
    for V in range(1, max_V + 1):
        shell = [e for e in _exponent_window(len(units), V) if max(map(abs, e)) == V]
        counts, _ = _cover_counts(lat, fan, X, units, shell)
        if not counts.any():
            return V
    raise UnitNotFound(f"unit window did not stabilise below V = {max_V}")


def verify_cover(lat: EmbeddedLattice, fan: Fan, H: int, V: int | None = None,
                 units=None, threads: int = 1) -> DecompositionCertificate:
    """Check that every lattice point of C_w with max-norm <= H lies in exactly one
    translate transpose(gamma) C_I, gamma over the exponent window |e_i| <= V."""
    units = _resolve_units(lat, units)
    if V is None:
        V = choose_unit_window(lat, fan, H, units)
    X = _points_in_cw(lat, H)
    exps = _exponent_window(len(units), V) if units else [()]
    counts, hits = _cover_counts(lat, fan, X, units, exps, threads)
    hist = {int(k): int(v) for k, v in zip(*np.unique(counts, return_counts=True))}
    bad = np.nonzero(counts != 1)[0]
    if len(bad) == 0:
        return DecompositionCertificate(fan, H, V, "verified", points_checked=len(X), count_histogram=hist)
    # deterministic witness: smallest max-norm, then lexicographic
    idx = min(bad, key=lambda i: (int(np.abs(X[i]).max()), tuple(int(v) for v in X[i])))
    witness = tuple(int(v) for v in X[idx])
    who = tuple(sorted((e, ci) for (e, ci), ok in hits.items() if ok[idx]))
    failure = "CountZero" if counts[idx] == 0 else "CountMany"
    log.info("cover check failed: %s at %s", failure, witness)
    return DecompositionCertificate(fan, H, V, "failed", failure, witness, who, len(X), hist)
