"""Finite sampled dynamical systems.

A system is a finite point set with a distance matrix and a self-map given
by index arrays. Everything downstream of the distance matrix is numpy
index gymnastics: orbit maxima by fancy-indexed elementwise max, cover
refinement by boolean pullbacks, covering counts by a single
farthest-first traversal whose peak radii answer every scale at once.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .decay import INF, GammaSequence
from .kernels import farthest_first_peaks


@dataclass(frozen=True, eq=False)
class FiniteSampledSystem:
    point_count: int
    dist: np.ndarray
    map: np.ndarray
    inverse_map: np.ndarray | None

    @property
    def invertible(self) -> bool:
        return self.inverse_map is not None

    @staticmethod
    def from_arrays(dist, forward, inverse=None) -> "FiniteSampledSystem":
        """Validate and freeze the arrays.

        The distance matrix must be square, symmetric, nonnegative, finite,
        with a zero diagonal; the map must be index-closed. An omitted
        inverse is filled in exactly when the map is a bijection; a supplied
        inverse must invert the map on both sides.
        """
        d = np.ascontiguousarray(dist, dtype=np.float64)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise ValueError("dist must be a square matrix")
        n = d.shape[0]
        if n < 1:
            raise ValueError("the system needs at least one point")
        if not np.all(np.isfinite(d)):
            raise ValueError("dist entries must be finite")
        if not np.array_equal(d, d.T):
            raise ValueError("dist must be symmetric")
        if d.min() < 0.0:
            raise ValueError("dist entries must be nonnegative")
        if np.any(np.diagonal(d) != 0.0):
            raise ValueError("dist must have a zero diagonal")
        f = np.asarray(forward, dtype=np.int64)
        if f.shape != (n,):
            raise ValueError(f"map must be a flat array of {n} indices")
        if f.min(initial=0) < 0 or f.max(initial=0) >= n:
            raise ValueError("map indices out of range")
        bijective = np.array_equal(np.sort(f), np.arange(n))
        if inverse is None:
            if bijective:
                g = np.empty(n, dtype=np.int64)
                g[f] = np.arange(n)
            else:
                g = None
        else:
            if not bijective:
                raise ValueError("inverse_map supplied but map is not a bijection")
            g = np.asarray(inverse, dtype=np.int64)
            if g.shape != (n,):
                raise ValueError(f"inverse_map must be a flat array of {n} indices")
            if g.min() < 0 or g.max() >= n:
                raise ValueError("inverse_map indices out of range")
            ar = np.arange(n)
            if not (np.array_equal(f[g], ar) and np.array_equal(g[f], ar)):
                raise ValueError("inverse_map does not invert map")
        d.flags.writeable = False
        f.flags.writeable = False
        if g is not None:
            g.flags.writeable = False
        return FiniteSampledSystem(point_count=n, dist=d, map=f, inverse_map=g)


def system_from_json(doc: dict) -> FiniteSampledSystem:
    for key in ("points", "dist", "map"):
        if key not in doc:
            raise ValueError(f"sampled spec missing field {key!r}")
    n = doc["points"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ValueError("field 'points': must be a positive integer")
    dist = doc["dist"]
    if len(dist) != n or any(len(r) != n for r in dist):
        raise ValueError(f"field 'dist': expected a {n}x{n} array")
    fmap = doc["map"]
    if len(fmap) != n:
        raise ValueError(f"field 'map': expected {n} entries")
    inv = doc.get("inverse_map")
    if inv is not None and len(inv) != n:
        raise ValueError(f"field 'inverse_map': expected {n} entries")
    return FiniteSampledSystem.from_arrays(dist, fmap, inv)


def system_to_json(sys_: FiniteSampledSystem) -> dict:
    return {
        "points": sys_.point_count,
        "dist": sys_.dist.tolist(),
        "map": sys_.map.tolist(),
        "inverse_map": None if sys_.inverse_map is None else sys_.inverse_map.tolist(),
    }


# ------------------------------------------------------------- estimates

def _check_index(sys_: FiniteSampledSystem, *idx):
    for i in idx:
        if not (0 <= i < sys_.point_count):
            raise ValueError(f"point index {i} out of range")


def bowen_distance(sys_: FiniteSampledSystem, x: int, y: int, n: int) -> float:
    """max over 0 <= k < n of d(f^k x, f^k y)."""
    _check_index(sys_, x, y)
    if n < 1:
        raise ValueError("n must be >= 1")
    best = 0.0
    cx, cy = x, y
    for _ in range(n):
        best = max(best, float(sys_.dist[cx, cy]))
        cx = int(sys_.map[cx])
        cy = int(sys_.map[cy])
    return best


def _compose(index_map: np.ndarray, n: int) -> np.ndarray:
    out = np.arange(index_map.shape[0])
    for _ in range(n):
        out = index_map[out]
    return out


def expansive_constant_estimate(sys_: FiniteSampledSystem, n: int,
                                horizon: int) -> float:
    """min over distinct pairs of the max distance along f^(n k) iterates,
    k = -K..K when invertible and 0..K otherwise.

    An upper estimate for gamma(f^n): extending the horizon can only shrink
    it. The whole pair table advances at once through composed index maps.
    """
    if sys_.point_count < 2:
        raise ValueError("need at least two points for a pair minimum")
    if n < 1:
        raise ValueError("n must be >= 1")
    if horizon < 0:
        raise ValueError("horizon must be >= 0")
    acc = sys_.dist.copy()  # k = 0
    fwd = _compose(sys_.map, n)
    cur = fwd
    for _ in range(horizon):
        np.maximum(acc, sys_.dist[np.ix_(cur, cur)], out=acc)
        cur = fwd[cur]
    if sys_.invertible:
        bwd = _compose(sys_.inverse_map, n)
        cur = bwd
        for _ in range(horizon):
            np.maximum(acc, sys_.dist[np.ix_(cur, cur)], out=acc)
            cur = bwd[cur]
    off = ~np.eye(sys_.point_count, dtype=bool)
    return float(acc[off].min())


def lipschitz_constant_estimate(sys_: FiniteSampledSystem) -> float:
    """max over distinct pairs of d(f x, f y) / d(x, y)."""
    if sys_.point_count < 2:
        raise ValueError("need at least two points for a ratio")
    off = ~np.eye(sys_.point_count, dtype=bool)
    den = sys_.dist[off]
    if np.any(den == 0.0):
        raise ValueError(
            "distinct points at distance zero, Lipschitz ratio undefined"
        )
    num = sys_.dist[np.ix_(sys_.map, sys_.map)][off]
    return float((num / den).max())


def gamma_estimate_sequence(sys_: FiniteSampledSystem, n_max: int,
                            horizon: int) -> GammaSequence:
    entries = {
        n: expansive_constant_estimate(sys_, n, horizon)
        for n in range(1, n_max + 1)
    }
    return GammaSequence(
        entries=entries, kind="estimate",
        source=f"sampled orbit scan, horizon={horizon}",
    )


# ----------------------------------------------------------------- cover

@dataclass(frozen=True)
class OpenCoverSpec:
    elements: tuple[frozenset[int], ...]

    @staticmethod
    def from_lists(lists) -> "OpenCoverSpec":
        return OpenCoverSpec(elements=tuple(frozenset(int(i) for i in e)
                                            for e in lists))


def _cover_masks(sys_: FiniteSampledSystem, cover: OpenCoverSpec) -> list[np.ndarray]:
    n = sys_.point_count
    masks = []
    union = np.zeros(n, dtype=bool)
    if not cover.elements:
        raise ValueError("cover has no elements")
    for k, elem in enumerate(cover.elements):
        if not elem:
            raise ValueError(f"cover element {k} is empty")
        m = np.zeros(n, dtype=bool)
        for i in elem:
            if not (0 <= i < n):
                raise ValueError(f"cover element {k} references point {i}")
            m[i] = True
        masks.append(m)
        union |= m
    if not union.all():
        raise ValueError("cover does not cover every point")
    return masks


def lebesgue_sequence(sys_: FiniteSampledSystem, cover: OpenCoverSpec,
                      n_max: int) -> GammaSequence:
    """delta_n of the n-step refinement: min over points x of the largest
    separation min_{y outside E} d(x, y) over refined elements E containing x.

    Level n elements are intersections E_0 cap f^-1 E' with E' from level
    n - 1, built lazily and deduplicated; an element with empty complement
    separates nothing and contributes the +inf sentinel.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    base = _cover_masks(sys_, cover)
    fmap = sys_.map
    n_pts = sys_.point_count

    def level_value(parts) -> float:
        sep = np.full(n_pts, -np.inf)
        for part in parts:
            outside = ~part
            if outside.any():
                mins = sys_.dist[:, outside].min(axis=1)
            else:
                mins = np.full(n_pts, np.inf)
            sep[part] = np.maximum(sep[part], mins[part])
        # refinements of a covering family still cover, so sep is finite
        # from below everywhere
        val = float(sep.min())
        return INF if math.isinf(val) else val

    entries = {}
    parts = base
    for n in range(1, n_max + 1):
        if n > 1:
            seen = set()
            refined = []
            for elem in base:
                for prev in parts:
                    cut = elem & prev[fmap]
                    if not cut.any():
                        continue
                    key = cut.tobytes()
                    if key not in seen:
                        seen.add(key)
                        refined.append(cut)
            parts = refined
        entries[n] = level_value(parts)
    return GammaSequence(
        entries=entries, kind="estimate",
        source=f"sampled lebesgue, cover of {len(base)} elements",
    )


# ------------------------------------------------------------- dimension

@dataclass(frozen=True)
class DimensionEstimate:
    scales: tuple[float, ...]
    covering_counts: tuple[int, ...]
    slope_lower: float
    slope_upper: float


def box_dimension_estimate(sys_: FiniteSampledSystem, scales) -> DimensionEstimate:
    """Covering counts N(eps) from one farthest-first traversal, secant
    slopes of log N against -log eps between consecutive scales.

    Scales must be strictly decreasing, at least two of them, and none may
    fall below the sample resolution (the smallest positive distance),
    where counts stop carrying geometric information.
    """
    if sys_.point_count < 2:
        raise ValueError("need at least two points to estimate a dimension")
    eps = [float(e) for e in scales]
    if len(eps) < 2:
        raise ValueError("need at least two scales for a slope")
    if any(e <= 0 for e in eps):
        raise ValueError("scales must be positive")
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise ValueError("scales must be strictly decreasing")
    positive = sys_.dist[sys_.dist > 0.0]
    if positive.size == 0:
        raise ValueError("all points coincide, no resolution")
    resolution = float(positive.min())
    if eps[-1] < resolution:
        raise ValueError(
            f"scale {eps[-1]:g} is below the sample resolution {resolution:g}"
        )
    peaks = farthest_first_peaks(sys_.dist, sys_.point_count)
    counts = [1 + int(np.count_nonzero(peaks > e)) for e in eps]
    # eps descending makes counts nondecreasing by construction
    slopes = []
    for (e1, c1), (e2, c2) in zip(zip(eps, counts), zip(eps[1:], counts[1:])):
        slopes.append((math.log(c2) - math.log(c1)) / (math.log(e1) - math.log(e2)))
    return DimensionEstimate(
        scales=tuple(eps),
        covering_counts=tuple(counts),
        slope_lower=min(slopes),
        slope_upper=max(slopes),
    )
