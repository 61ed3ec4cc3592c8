"""Numpy fallbacks for the two hot kernels.

Both backends must return identical values. That is arranged by keeping the
orbit scan in exact integer arithmetic (the only float op, sqrt(num)/Q,
happens in the caller) and by making the farthest-first traversal use only
elementwise float comparisons with first-occurrence tie-breaks.
"""
from __future__ import annotations

import math

import numpy as np


def _orbit_max_single(b00: int, b01: int, b10: int, b11: int, q: int,
                      x: int, y: int) -> int:
    # full forward cycle of (x, y); B is invertible mod q so the cycle is pure
    fx = min(x, q - x) if x else 0
    fy = min(y, q - y) if y else 0
    m = fx * fx + fy * fy
    a, b = (b00 * x + b01 * y) % q, (b10 * x + b11 * y) % q
    while (a, b) != (x, y):
        fa = min(a, q - a) if a else 0
        fb = min(b, q - b) if b else 0
        s = fa * fa + fb * fb
        if s > m:
            m = s
        a, b = (b00 * a + b01 * b) % q, (b10 * a + b11 * b) % q
    return m


def orbit_min_max_sqnorm(b00: int, b01: int, b10: int, b11: int, q: int) -> int:
    """Min over nonzero grid points v of the max folded squared norm along
    the B-cycle of v, as an exact integer numerator.

    B = [[b00, b01], [b10, b11]] acts on (Z/q)^2 and must be invertible mod q
    (|det| = 1 matrices reduced mod q always are). The fold takes a residue a
    to min(a, q - a); grid distances are sqrt(numerator) / q.
    """
    if q < 2:
        raise ValueError("q must be >= 2, the grid has no nonzero points")
    b00 %= q; b01 %= q; b10 %= q; b11 %= q
    if math.gcd(b00 * b11 - b01 * b10, q) != 1:
        # rho-shaped orbits never close; the cycle walk would not terminate
        raise ValueError("matrix not invertible mod q, orbits are not cycles")
    best = _orbit_max_single(b00, b01, b10, b11, q, 1, 0)

    g = np.arange(q, dtype=np.int64)
    a0 = np.repeat(g, q)
    b0 = np.tile(g, q)
    fa = np.minimum(a0, q - a0)
    fb = np.minimum(b0, q - b0)
    cur = fa * fa + fb * fb
    a = a0.copy()
    b = b0.copy()
    alive = cur < best
    alive[0] = False  # origin
    idx = np.flatnonzero(alive)
    while idx.size:
        ia, ib = a[idx], b[idx]
        na = (b00 * ia + b01 * ib) % q
        nb = (b10 * ia + b11 * ib) % q
        returned = (na == a0[idx]) & (nb == b0[idx])
        fa = np.minimum(na, q - na)
        fb = np.minimum(nb, q - nb)
        nm = np.maximum(cur[idx], fa * fa + fb * fb)
        if returned.any():
            # cycle closed without touching best: a strict improvement
            cand = int(cur[idx][returned].min())
            if cand < best:
                best = cand
        a[idx] = na
        b[idx] = nb
        cur[idx] = nm
        idx = idx[~returned & (nm < best)]
    return best


def farthest_first_peaks(dist: np.ndarray, k_cap: int) -> np.ndarray:
    """Farthest-first traversal peaks: peaks[k] = max over points of the
    distance to the nearest of the first k+1 centers.

    The first center is point 0 (every point ties at the start, lowest index
    wins); each later center is the point farthest from the chosen ones,
    first occurrence on ties. peaks is nonincreasing, and the covering count
    at scale eps is 1 + (number of leading peaks > eps). Stops early once the
    peak hits zero.
    """
    n = dist.shape[0]
    if dist.shape != (n, n):
        raise ValueError("dist must be square")
    cap = min(int(k_cap), n)
    if cap < 1:
        raise ValueError("k_cap must be >= 1")
    dmin = dist[0].astype(np.float64, copy=True)
    peaks = np.empty(cap, dtype=np.float64)
    count = 0
    for _ in range(cap):
        m = dmin.max()
        peaks[count] = m
        count += 1
        if m == 0.0:
            break
        i = int(np.argmax(dmin))
        np.minimum(dmin, dist[i], out=dmin)
    return peaks[:count]
