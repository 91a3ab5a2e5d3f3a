"""Pure numpy layer kernel, used when the compiled extension is unavailable.

Same contract as ``_ckernel.layer_sums``: for each layer m in [m0, m1) enumerate the
integer points with coordinate sum m inside the pruning box, classify them with the
float dual forms, and for the certainly-inside ones accumulate every requested
index.  Points the float test cannot decide are returned for exact treatment.

Terms are formed exactly as in the compiled kernel (reciprocal, repeated products,
left-to-right over coordinates), so the term values agree bit for bit; only the
per-layer summation differs (here math.fsum, there a double-double accumulator).
"""
from __future__ import annotations

import math

import numpy as np

NAME = "numpy"
SUMMATION = "fsum"


def _box(m, dlo, dhi, n):
    lo = np.maximum(1, np.floor(m * dlo).astype(np.int64) - 1)
    hi = np.minimum(m - (n - 1), np.ceil(m * dhi).astype(np.int64) + 1)
    return lo, hi


def _layer_points(m, lo, hi, n):
    if n == 1:
        if lo[0] <= m <= hi[0]:
            return np.array([[m]], dtype=np.int64)
        return np.empty((0, 1), dtype=np.int64)
    if np.any(lo > hi):
        return np.empty((0, n), dtype=np.int64)
    axes = [np.arange(lo[j], hi[j] + 1, dtype=np.int64) for j in range(n - 1)]
    grid = np.stack([g.ravel() for g in np.meshgrid(*axes, indexing="ij")], axis=1)
    last = m - grid.sum(axis=1)
    keep = (last >= lo[n - 1]) & (last <= hi[n - 1])
    return np.concatenate([grid[keep], last[keep, None]], axis=1)


def terms(X, idx, maxexp):
    """Float terms prod_j x_j^-k_j for each row of X and each index row of idx."""
    r = 1.0 / X.astype(np.float64)
    pw = [None, r]
    for _ in range(2, maxexp + 1):
        pw.append(pw[-1] * r)
    out = np.empty((X.shape[0], idx.shape[0]))
    for i, kk in enumerate(idx):
        t = pw[kk[0]][:, 0].copy()
        for j in range(1, X.shape[1]):
            t = t * pw[kk[j]][:, j]
        out[:, i] = t
    return out


def layer_sums(F, A, dlo, dhi, m0, m1, idx, out_hi, out_lo, out_count):
    """Fill rows 0..m1-m0-1 of the output arrays; return the ambiguous points (k x n)."""
    n = F.shape[0]
    maxexp = int(idx.max())
    amb = []
    for m in range(m0, m1):
        row = m - m0
        lo, hi = _box(m, dlo, dhi, n)
        X = _layer_points(m, lo, hi, n)
        out_lo[row, :] = 0.0
        if X.shape[0] == 0:
            out_hi[row, :] = 0.0
            out_count[row] = 0
            continue
        Xf = X.astype(np.float64)
        s = Xf @ F.T
        err = Xf @ A.T
        inside = np.all(s > err, axis=1)
        outside = np.any(s < -err, axis=1)
        unsure = ~inside & ~outside
        if unsure.any():
            amb.append(X[unsure])
        Xi = X[inside]
        out_count[row] = Xi.shape[0]
        if Xi.shape[0] == 0:
            out_hi[row, :] = 0.0
            continue
        T = terms(Xi, idx, maxexp)
        for i in range(idx.shape[0]):
            out_hi[row, i] = math.fsum(T[:, i])
    if amb:
        return np.concatenate(amb, axis=0)
    return np.empty((0, n), dtype=np.int64)
