# cython: language_level=3
"""Compiled kernels: grid orbit scan and farthest-first traversal.

Must agree bit for bit with expanse.kernels.pure: the orbit scan is exact
integer work, the traversal only compares and copies float64 values.
"""

import numpy as np

cimport cython
from libc.stdlib cimport free, malloc


@cython.cdivision(True)
def orbit_min_max_sqnorm(long long b00, long long b01, long long b10,
                         long long b11, long long q):
    """Min over nonzero grid points of the max folded squared norm along the
    B-cycle, as an exact integer numerator. See expanse.kernels.pure."""
    cdef long long best, m, s, a, b, x, y, fa, fb, na, det, t
    if q < 2:
        raise ValueError("q must be >= 2, the grid has no nonzero points")
    b00 %= q; b01 %= q; b10 %= q; b11 %= q
    det = (b00 * b11 - b01 * b10) % q
    if det < 0:
        det += q
    t = q
    while t:
        det, t = t, det % t
    if det != 1:
        # rho-shaped orbits never close; the cycle walk would not terminate
        raise ValueError("matrix not invertible mod q, orbits are not cycles")

    # seed candidate: full cycle of (1, 0)
    best = 0
    x = 1; y = 0
    m = 1
    a = (b00 * x + b01 * y) % q
    b = (b10 * x + b11 * y) % q
    while a != x or b != y:
        fa = a if a <= q - a else q - a
        fb = b if b <= q - b else q - b
        s = fa * fa + fb * fb
        if s > m:
            m = s
        na = (b00 * a + b01 * b) % q
        b = (b10 * a + b11 * b) % q
        a = na
    best = m

    cdef long long x0, y0
    for x0 in range(q):
        for y0 in range(q):
            if x0 == 0 and y0 == 0:
                continue
            fa = x0 if x0 <= q - x0 else q - x0
            fb = y0 if y0 <= q - y0 else q - y0
            m = fa * fa + fb * fb
            if m >= best:
                continue
            a = (b00 * x0 + b01 * y0) % q
            b = (b10 * x0 + b11 * y0) % q
            while a != x0 or b != y0:
                fa = a if a <= q - a else q - a
                fb = b if b <= q - b else q - b
                s = fa * fa + fb * fb
                if s > m:
                    m = s
                    if m >= best:
                        break
                na = (b00 * a + b01 * b) % q
                b = (b10 * a + b11 * b) % q
                a = na
            else:
                # cycle closed below the running best
                best = m
    return int(best)


@cython.boundscheck(False)
@cython.wraparound(False)
def farthest_first_peaks(const double[:, :] dist, long long k_cap):
    """Farthest-first traversal peaks; see expanse.kernels.pure."""
    cdef Py_ssize_t n = dist.shape[0]
    if dist.shape[1] != n:
        raise ValueError("dist must be square")
    cdef Py_ssize_t cap = k_cap if k_cap < n else n
    if cap < 1:
        raise ValueError("k_cap must be >= 1")
    cdef double* dmin = <double*> malloc(n * sizeof(double))
    if dmin == NULL:
        raise MemoryError()
    out = np.empty(cap, dtype=np.float64)
    cdef double[:] peaks = out
    cdef Py_ssize_t i, j, arg, count
    cdef double m, v
    try:
        for j in range(n):
            dmin[j] = dist[0, j]
        count = 0
        for i in range(cap):
            m = dmin[0]
            arg = 0
            for j in range(1, n):
                if dmin[j] > m:
                    m = dmin[j]
                    arg = j
            peaks[count] = m
            count += 1
            if m == 0.0:
                break
            for j in range(n):
                v = dist[arg, j]
                if v < dmin[j]:
                    dmin[j] = v
    finally:
        free(dmin)
    return out[:count]
