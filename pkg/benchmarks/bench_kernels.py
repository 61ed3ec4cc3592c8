"""Timing comparison of the two kernel backends.

Runs the orbit scan and the farthest-first traversal on matched inputs
through the numpy fallback and, when built, the compiled extension, checks
the outputs agree exactly, and prints per-case timings with the speedup.

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --repeats 5 --points 2000
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from expanse.kernels import BACKEND, pure

try:
    from expanse.kernels import _speedups
except ImportError:
    _speedups = None


def _best_of(fn, args, repeats):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return out, best


def _mat_pow_mod(rows, n, q):
    m = np.array(rows, dtype=object)
    b = np.eye(2, dtype=object)
    for _ in range(n):
        b = (b @ m) % q
    return int(b[0, 0]), int(b[0, 1]), int(b[1, 0]), int(b[1, 1])


def _torus_cloud(points, seed):
    rng = np.random.default_rng(seed)
    pts = rng.random((points, 2))
    diff = np.abs(pts[:, None, :] - pts[None, :, :])
    folded = np.minimum(diff, 1.0 - diff)
    return np.sqrt((folded * folded).sum(axis=2))


def run(repeats: int, points: int, k_cap: int) -> int:
    if _speedups is None:
        print("compiled extension not built; backend:", BACKEND)
        print("nothing to compare, numpy fallback is the only implementation")
        return 0

    rows = [[2, 1], [1, 1]]
    cases = []
    for n, q in ((4, 257), (6, 512), (8, 1024)):
        b = _mat_pow_mod(rows, n, q)
        cases.append((f"orbit n={n} Q={q}", pure.orbit_min_max_sqnorm,
                      _speedups.orbit_min_max_sqnorm, b + (q,)))
    dist = _torus_cloud(points, seed=11)
    cases.append((f"peaks {points} pts k={k_cap}", pure.farthest_first_peaks,
                  _speedups.farthest_first_peaks, (dist, k_cap)))

    print(f"backend in use: {BACKEND}; best of {repeats} runs")
    print(f"{'case':<24} {'pure (s)':>10} {'compiled (s)':>13} {'speedup':>8}")
    for name, f_pure, f_fast, args in cases:
        out_p, t_p = _best_of(f_pure, args, repeats)
        out_c, t_c = _best_of(f_fast, args, repeats)
        same = (
            np.array_equal(out_p, out_c)
            if isinstance(out_p, np.ndarray)
            else out_p == out_c
        )
        if not same:
            print(f"{name:<24} BACKEND MISMATCH: {out_p!r} vs {out_c!r}")
            return 1
        ratio = t_p / t_c if t_c > 0 else float("inf")
        print(f"{name:<24} {t_p:>10.4f} {t_c:>13.4f} {ratio:>7.1f}x")
    return 0


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--points", type=int, default=1500)
    ap.add_argument("--k-cap", type=int, default=256)
    args = ap.parse_args()
    return run(args.repeats, args.points, args.k_cap)


if __name__ == "__main__":
    raise SystemExit(main())
