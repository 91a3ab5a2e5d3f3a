"""Certified evaluation of conical zeta values zeta_C(kk) = sum_{x in C cap Z^n} x^-kk.

Points are enumerated by layers m = x_1 + ... + x_n.  If every normalized ray of C
has coordinate j at least delta_j, each x in C satisfies x_j >= m delta_j, and a layer
holds at most m^(n-1)/(n-1)! points, so the terms beyond layer M add up to at most

    prod_j delta_j^-k_j / (n-1)! * M^(n-|kk|) / (|kk| - n).

Inside the layers, float dual forms with a generous slack decide membership; the
points the floats cannot decide are settled exactly and summed as exact rationals.
Float terms carry a relative error of at most gamma_(2|kk|) and the per-layer sums
a bound depending on the backend; everything is combined exactly and rounded outward.
"""
from __future__ import annotations

import logging
import math
import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

import numpy as np

from . import _pykernel
from .cones import Cone, Membership, contains
from .errors import BudgetExceeded, IndexTooLight, InputError, NotTotallyPositive
from .intervals import Interval, inv_sqrt

log = logging.getLogger(__name__)

try:
    from . import _ckernel
except ImportError:  # extension not built
    _ckernel = None

_BACKENDS = {"numpy": _pykernel}
if _ckernel is not None:
    _BACKENDS["cython"] = _ckernel


def default_backend() -> str:
    if os.environ.get("CONEZETA_PURE") or _ckernel is None:
        return "numpy"
    return "cython"


BACKEND = default_backend()

U = Fraction(1, 2**53)  # unit roundoff, binary64
CHUNK = 64               # layers per work item


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get("CONEZETA_THREADS", "1")))
    except ValueError:
        return 1


def _gamma(q) -> Fraction:
    return q * U / (1 - q * U)


@dataclass(frozen=True)
class Enclosure:
    """Certified interval; metadata records how it was obtained."""

    interval: Interval
    layers: int = 0
    tail: Fraction = Fraction(0)
    points: int = 0
    rounding: Fraction = Fraction(0)
    budget_exceeded: bool = False
    backend: str = ""
    extra: dict = dc_field(default_factory=dict, compare=False)

    @property
    def lo(self):
        return self.interval.lo

    @property
    def hi(self):
        return self.interval.hi

    @property
    def width(self):
        return self.interval.width

    def contains(self, x) -> bool:
        return Fraction(x) in self.interval

    def intersects(self, other) -> bool:
        other = other.interval if isinstance(other, Enclosure) else other
        return self.interval.intersects(other)

    def to_json(self, digits: int = 20) -> dict:
        lo, hi = self.interval.decimal_strings(digits)
        out = {
            "enclosure": [lo, hi],
            "layers": self.layers,
            "tail_bound": f"{float(self.tail):.6e}",
            "points": self.points,
            "budget_exceeded": self.budget_exceeded,
        }
        out.update(self.extra)
        return out


def exact(value) -> Enclosure:
    return Enclosure(Interval.point(Fraction(value)))


def tail_constant(lows, idx) -> Fraction:
    """prod_j delta_j^-k_j / (n-1)! / (|kk| - n); the tail after layer M is this times M^(n-|kk|)."""
    n = len(idx)
    c = Fraction(1, math.factorial(n - 1) * (sum(idx) - n))
    for d, e in zip(lows, idx):
        c /= d**e
    return c


def tail_bound(lows, idx, M: int) -> Fraction:
    n = len(idx)
    return tail_constant(lows, idx) / Fraction(M) ** (sum(idx) - n)


def layers_needed(lows, idx, target) -> int:
    """Smallest M with tail_bound(M) <= target."""
    c = tail_constant(lows, idx)
    p = sum(idx) - len(idx)
    M = max(1, int(math.ceil((float(c) / float(target)) ** (1.0 / p))))
    while M > 1 and c / Fraction(M - 1) ** p <= target:
        M -= 1
    while c / Fraction(M) ** p > target:
        M += 1
    return M


@dataclass
class _Prepared:
    cone: Cone
    F: np.ndarray
    A: np.ndarray
    dlo: np.ndarray
    dhi: np.ndarray
    lows: list
    highs: list


def _prepare(cone: Cone) -> _Prepared:
    if not cone.is_totally_positive():
        raise NotTotallyPositive(f"cone {cone.label or ''} is not totally positive")
    n = cone.ambient_dim
    if cone.dim != n or cone.forms is None:
        raise InputError("conical zeta values need a full-dimensional simplicial cone")
    rows = cone.real_forms(96)
    F = np.array([[float(v.mid) for v in r] for r in rows], dtype=np.float64)
    # slack per entry: float rounding of the form entry, interval width, and the
    # float dot product (n terms) all fit well inside 1e-12 relative
    A = np.array(
        [[abs(float(v.mid)) * 1e-12 + 2 * float(v.width) + 1e-300 for v in r] for r in rows],
        dtype=np.float64,
    )
    lows, highs = cone.normalized_ray_bounds(96)
    dlo = np.array([float(v) * (1 - 1e-12) for v in lows], dtype=np.float64)
    dhi = np.array([float(v) * (1 + 1e-12) for v in highs], dtype=np.float64)
    return _Prepared(cone, F, A, np.ascontiguousarray(dlo), np.ascontiguousarray(dhi), lows, highs)


def _run_chunk(backend, prep, m0, m1, idx):
    nl, k = m1 - m0, idx.shape[0]
    hi = np.zeros((nl, k))
    lo = np.zeros((nl, k))
    cnt = np.zeros(nl, dtype=np.int64)
    if backend is _pykernel:
        amb = backend.layer_sums(prep.F, prep.A, prep.dlo, prep.dhi, m0, m1, idx, hi, lo, cnt)
        return hi, lo, cnt, amb
    cap = 1024
    while True:
        buf = np.zeros((cap, idx.shape[1]), dtype=np.int64)
        namb = backend.layer_sums(prep.F, prep.A, prep.dlo, prep.dhi, m0, m1, idx, hi, lo, cnt, buf)
        if namb <= cap:
            return hi, lo, cnt, buf[:namb]
        cap = namb


def _sum_layers(prep, idx_list, M, threads, backend):
    """Exact rational partial sums over layers 1..M plus rounding bounds, deterministic."""
    mod = _BACKENDS[backend]
    n = prep.F.shape[0]
    idx = np.ascontiguousarray(np.array(idx_list, dtype=np.int64).reshape(-1, n))
    chunks = [(m0, min(M + 1, m0 + CHUNK)) for m0 in range(1, M + 1, CHUNK)]
    if threads > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda c: _run_chunk(mod, prep, c[0], c[1], idx), chunks))
    else:
        results = [_run_chunk(mod, prep, c[0], c[1], idx) for c in chunks]

    K = idx.shape[0]
    float_sums = [Fraction(0)] * K
    exact_sums = [Fraction(0)] * K
    points, nmax = 0, 0
    for hi, lo, cnt, amb in results:  # chunk order = layer order
        points += int(cnt.sum())
        nmax = max(nmax, int(cnt.max()) if cnt.size else 0)
        for i in range(K):
            col_hi, col_lo = hi[:, i], lo[:, i]
            float_sums[i] += sum(map(Fraction, col_hi.tolist())) + sum(map(Fraction, col_lo.tolist()))
        for x in amb.tolist():
            if contains(prep.cone, x) is Membership.INSIDE:
                points += 1
                for i in range(K):
                    t = Fraction(1)
                    for xj, e in zip(x, idx_list[i]):
                        t /= Fraction(xj) ** e
                    exact_sums[i] += t

    if mod.SUMMATION == "fsum":
        rho = U                                  # fsum is correctly rounded
    else:
        rho = _gamma(nmax) * nmax * U            # TwoSum errors accumulated in the low word
    out = []
    for i in range(K):
        q = 2 * sum(idx_list[i])
        g = _gamma(q)
        s = float_sums[i]
        err = (g / (1 - g) + rho) * s / (1 - rho)
        out.append((s + exact_sums[i], err))
    return out, points


def _bits_for(target) -> int:
    target = Fraction(target)
    return max(64, 2 * (target.denominator.bit_length() - target.numerator.bit_length()) + 32)


def _check_index(cone, idx):
    n = cone.ambient_dim
    idx = tuple(int(v) for v in idx)
    if len(idx) != n or any(v < 1 for v in idx):
        raise InputError(f"index {idx} must have {n} entries >= 1")
    if sum(idx) <= n:
        raise IndexTooLight(f"|k| = {sum(idx)} must exceed n = {n}")
    return idx


def evaluate_many(cone: Cone, indices, targets, max_layer=None, threads=None, backend=None, layers=None):
    """One shared enumeration for several indices on the same cone.

    ``targets`` is one tail target per index (or a single value); ``layers`` forces M.
    """
    backend = backend or BACKEND
    threads = threads or default_threads()
    idxs = [_check_index(cone, k) for k in indices]
    if not isinstance(targets, (list, tuple)):
        targets = [targets] * len(idxs)
    targets = [Fraction(t) for t in targets]
    if any(t <= 0 for t in targets):
        raise InputError("target error must be positive")
    prep = _prepare(cone)
    if layers is None:
        need = max(layers_needed(prep.lows, k, t) for k, t in zip(idxs, targets))
    else:
        need = int(layers)
    M = need
    exceeded = False
    if max_layer is not None and need > max_layer:
        M, exceeded = int(max_layer), True
        warnings.warn(f"layer cutoff {max_layer} reached before target (needs {need})", BudgetExceeded, stacklevel=2)
    sums, points = _sum_layers(prep, idxs, M, threads, backend)
    out = []
    for k, t, (s, err) in zip(idxs, targets, sums):
        tail = tail_bound(prep.lows, k, M)
        bits = _bits_for(min(t, tail) if tail else t)
        iv = Interval(s - err, s + err + tail).round_out(bits)
        out.append(Enclosure(iv, M, tail, points, err, exceeded and tail > t, backend,
                             {"index": list(k), "layers_needed": need}))
    return out


def evaluate_conical_zeta(cone: Cone, k, target_error, max_layer=None, threads=None, backend=None) -> Enclosure:
    return evaluate_many(cone, [k], target_error, max_layer, threads, backend)[0]


def evaluate_combination(comb, target_error, max_layer=None, threads=None, backend=None) -> Enclosure:
    """Enclosure of (1/sqrt d_F) * sum coeff * zeta_C(kk) with total half-width about target."""
    if not comb.terms:
        return exact(0)
    target = Fraction(target_error)
    total = sum(abs(t.coeff) for t in comb.terms)
    # each zeta gets the same tail target; weighted by |coeff| / sqrt(d_F) the shares add up to target
    per = target * math.isqrt(comb.disc_F) / total
    groups = {}
    for t in comb.terms:
        groups.setdefault(t.cone_index, []).append(t)
    acc = Interval.point(0)
    per_term = []
    exceeded = False
    points = 0
    layers = 0
    for ci in sorted(groups):
        ts = groups[ci]
        encs = evaluate_many(ts[0].cone, [t.index for t in ts], per, max_layer, threads, backend)
        points += encs[0].points
        layers = max(layers, encs[0].layers)
        for t, e in zip(ts, encs):
            acc = acc + Interval.point(t.coeff) * e.interval
            exceeded |= e.budget_exceeded
            per_term.append({"cone": ci, "index": list(t.index), "layers": e.layers,
                             "tail_bound": f"{float(e.tail):.3e}",
                             "enclosure": list(e.interval.decimal_strings(20))})
    bits = _bits_for(target)
    value = (acc * inv_sqrt(comb.disc_F, bits)).round_out(bits)
    tail = sum((Fraction(abs(t.coeff)) for t in comb.terms), Fraction(0)) * per
    return Enclosure(value, layers, tail, points, Fraction(0), exceeded, backend or BACKEND,
                     {"terms": per_term})
