# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled layer kernel for conical zeta sums.

Contract matches ``_pykernel.layer_sums``.  Each layer is summed with an
error-free TwoSum into (hi, lo); the caller converts both parts to exact rationals.
Must be built without -ffast-math and with FP contraction off, otherwise the
TwoSum identities and the term rounding count no longer hold.
"""
import numpy as np
from libc.math cimport floor, ceil
from libc.stdlib cimport malloc, free

NAME = "cython"
SUMMATION = "twosum"

DEF MAXN = 8
DEF MAXE = 64


cdef inline void _process(long n, long* x, const double[:, ::1] F, const double[:, ::1] A,
                          const long[:, ::1] idx, long nidx, long maxexp,
                          double* pw, double* hi, double* lo, long* cnt,
                          long[:, ::1] amb, long* namb, long amb_cap) noexcept nogil:
    cdef long i, j, e
    cdef double s, err, xf, t, r, sm, bp
    cdef int inside = 1
    for i in range(n):
        s = 0.0
        err = 0.0
        for j in range(n):
            xf = <double>x[j]
            s = s + F[i, j] * xf
            err = err + A[i, j] * xf
        if s < -err:
            return
        if not (s > err):
            inside = 0
    if not inside:
        if namb[0] < amb_cap:
            for j in range(n):
                amb[namb[0], j] = x[j]
        namb[0] += 1
        return
    cnt[0] += 1
    for j in range(n):
        r = 1.0 / <double>x[j]
        pw[j * MAXE + 1] = r
        for e in range(2, maxexp + 1):
            pw[j * MAXE + e] = pw[j * MAXE + e - 1] * r
    for i in range(nidx):
        t = pw[idx[i, 0]]
        for j in range(1, n):
            t = t * pw[j * MAXE + idx[i, j]]
        # TwoSum(hi, t)
        sm = hi[i] + t
        bp = sm - hi[i]
        lo[i] = lo[i] + ((hi[i] - (sm - bp)) + (t - bp))
        hi[i] = sm


def layer_sums(const double[:, ::1] F, const double[:, ::1] A, const double[::1] dlo,
               const double[::1] dhi, long m0, long m1, const long[:, ::1] idx,
               double[:, ::1] out_hi, double[:, ::1] out_lo, long[::1] out_count,
               long[:, ::1] amb):
    """Fill the per-layer outputs; return the number of ambiguous points.

    Only the first amb.shape[0] ambiguous points are stored; a larger return value
    means the caller must retry with a bigger buffer.
    """
    cdef long n = F.shape[0]
    cdef long nidx = idx.shape[0]
    cdef long amb_cap = amb.shape[0]
    cdef long namb = 0
    cdef long maxexp = 1
    cdef long i, j, m, row, cnt, last
    cdef long lo[MAXN]
    cdef long hi[MAXN]
    cdef long x[MAXN]
    cdef long prefix[MAXN + 1]
    cdef double* pw
    cdef double* shi
    cdef double* slo
    if n > MAXN or n < 1:
        raise ValueError("dimension out of range for the compiled kernel")
    for i in range(nidx):
        for j in range(n):
            if idx[i, j] > maxexp:
                maxexp = idx[i, j]
    if maxexp >= MAXE:
        raise ValueError("index entry too large for the compiled kernel")
    pw = <double*> malloc(MAXN * MAXE * sizeof(double))
    shi = <double*> malloc(nidx * sizeof(double))
    slo = <double*> malloc(nidx * sizeof(double))
    if pw == NULL or shi == NULL or slo == NULL:
        free(pw); free(shi); free(slo)
        raise MemoryError()
    try:
        with nogil:
            for m in range(m0, m1):
                row = m - m0
                for i in range(nidx):
                    shi[i] = 0.0
                    slo[i] = 0.0
                cnt = 0
                for j in range(n):
                    lo[j] = <long>floor(m * dlo[j]) - 1
                    if lo[j] < 1:
                        lo[j] = 1
                    hi[j] = <long>ceil(m * dhi[j]) + 1
                    if hi[j] > m - (n - 1):
                        hi[j] = m - (n - 1)
                if n == 1:
                    x[0] = m
                    if lo[0] <= m <= hi[0]:
                        _process(n, x, F, A, idx, nidx, maxexp, pw, shi, slo, &cnt, amb, &namb, amb_cap)
                else:
                    # odometer over x[0..n-2]; the last coordinate is fixed by the layer sum
                    j = 0
                    prefix[0] = 0
                    x[0] = lo[0] - 1
                    while j >= 0:
                        x[j] += 1
                        if x[j] > hi[j] or prefix[j] + x[j] > m - (n - 1 - j):
                            j -= 1
                            continue
                        prefix[j + 1] = prefix[j] + x[j]
                        if j < n - 2:
                            j += 1
                            x[j] = lo[j] - 1
                            continue
                        last = m - prefix[n - 1]
                        if last < lo[n - 1]:
                            j -= 1  # larger x[j] only lowers the last coordinate
                            continue
                        if last > hi[n - 1]:
                            continue
                        x[n - 1] = last
                        _process(n, x, F, A, idx, nidx, maxexp, pw, shi, slo, &cnt, amb, &namb, amb_cap)
                for i in range(nidx):
                    out_hi[row, i] = shi[i]
                    out_lo[row, i] = slo[i]
                out_count[row] = cnt
    finally:
        free(pw); free(shi); free(slo)
    return namb
