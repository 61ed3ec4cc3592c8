"""Hyperbolic toral automorphisms.

An integer matrix M with |det M| = 1 and no eigenvalue of modulus one acts
on the torus R^m / Z^m. Rational points with denominator Q form a finite
invariant set, so orbit maxima over their cycles are exact integer
computations; together with a certified expansive constant for the first
iterate and the Lipschitz decay inequality this brackets gamma(f^n) from
both sides.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

from .decay import GammaSequence
from .kernels import orbit_min_max_sqnorm


# ------------------------------------------------------ integer matrices

def _int_det(rows) -> int:
    """Bareiss fraction-free elimination; exact for integer input."""
    n = len(rows)
    a = [[int(x) for x in r] for r in rows]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def _int_matmul(x, y):
    n = len(x)
    return [
        [sum(x[i][k] * y[k][j] for k in range(n)) for j in range(n)]
        for i in range(n)
    ]


def _int_matpow(rows, p: int):
    n = len(rows)
    result = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    base = [list(r) for r in rows]
    while p:
        if p & 1:
            result = _int_matmul(result, base)
        base = _int_matmul(base, base)
        p >>= 1
    return result


def _int_inverse(rows):
    """Adjugate inverse; exact, requires |det| = 1."""
    n = len(rows)
    d = _int_det(rows)
    if abs(d) != 1:
        raise ValueError("integer inverse needs |det| = 1")
    inv = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [
                [rows[r][c] for c in range(n) if c != j]
                for r in range(n) if r != i
            ]
            cof = _int_det(minor) if minor else 1
            inv[j][i] = (-1) ** (i + j) * cof * d  # 1/d = d for d = +-1
    return inv


def _eigen_moduli(rows) -> tuple[float, ...]:
    n = len(rows)
    if n == 1:
        return (abs(float(rows[0][0])),)
    if n == 2:
        tr = rows[0][0] + rows[1][1]
        det = rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
        disc = tr * tr - 4 * det
        if disc >= 0:
            root = math.sqrt(disc)
            lam1 = (tr + root) / 2.0
            lam2 = (tr - root) / 2.0
            return tuple(sorted((abs(lam1), abs(lam2))))
        mod = math.sqrt(float(det))  # complex pair, both on |z| = sqrt(det)
        return (mod, mod)
    vals = np.linalg.eigvals(np.array(rows, dtype=float))
    return tuple(sorted(float(abs(v)) for v in vals))


def _spectral_norm(rows) -> float:
    n = len(rows)
    if n == 2:
        t2 = sum(x * x for r in rows for x in r)
        return math.sqrt((t2 + math.sqrt(t2 * t2 - 4.0)) / 2.0)
    return float(np.linalg.norm(np.array(rows, dtype=float), 2))


# ----------------------------------------------------------- the system

@dataclass(frozen=True)
class ToralAutomorphism:
    dim: int
    matrix: tuple[tuple[int, ...], ...]

    @staticmethod
    def from_rows(rows) -> "ToralAutomorphism":
        rep = validate(rows)
        if not rep.valid:
            raise ValueError("invalid toral automorphism: " + "; ".join(rep.problems))
        return ToralAutomorphism(
            dim=len(rows), matrix=tuple(tuple(int(x) for x in r) for r in rows)
        )


@dataclass(frozen=True)
class ToralReport:
    dim: int
    valid: bool
    problems: tuple[str, ...]
    det: int | None
    eigen_moduli: tuple[float, ...]


_UNIT_GAP = 1e-9


def validate(rows_or_t) -> ToralReport:
    """Integer entries, |det| = 1 exactly, every eigenvalue off the unit
    circle by more than 1e-9 in modulus."""
    rows = (
        [list(r) for r in rows_or_t.matrix]
        if isinstance(rows_or_t, ToralAutomorphism)
        else [list(r) for r in rows_or_t]
    )
    n = len(rows)
    problems = []
    if n == 0:
        return ToralReport(0, False, ("empty matrix",), None, ())
    for i, r in enumerate(rows):
        if len(r) != n:
            problems.append(f"row {i} has length {len(r)}, expected {n}")
        for x in r:
            if isinstance(x, bool) or not isinstance(x, int):
                problems.append(f"entry {x!r} in row {i} is not an integer")
                break
    if problems:
        return ToralReport(n, False, tuple(problems), None, ())
    det = _int_det(rows)
    if abs(det) != 1:
        problems.append(f"|det| = {abs(det)}, expected 1")
        return ToralReport(n, False, tuple(problems), det, ())
    moduli = _eigen_moduli(rows)
    for mod in moduli:
        if abs(mod - 1.0) <= _UNIT_GAP:
            problems.append(
                f"eigenvalue modulus {mod!r} is within {_UNIT_GAP:g} of 1, "
                "the map is not hyperbolic"
            )
            break
    return ToralReport(n, not problems, tuple(problems), det, moduli)


def entropy(t: ToralAutomorphism) -> float:
    """Sum of log moduli over eigenvalues outside the unit circle."""
    return math.fsum(math.log(m) for m in _eigen_moduli(t.matrix) if m > 1.0)


def torus_distance(x, y) -> float:
    """Euclidean norm of the coordinatewise difference folded into
    [-1/2, 1/2]."""
    acc = 0.0
    for xi, yi in zip(x, y, strict=True):
        d = (xi - yi) % 1.0
        d = min(d, 1.0 - d)
        acc += d * d
    return math.sqrt(acc)


@dataclass(frozen=True)
class RationalGrid:
    Q: int

    def __post_init__(self):
        if not isinstance(self.Q, int) or isinstance(self.Q, bool) or self.Q < 2:
            raise ValueError("grid denominator Q must be an integer >= 2")


# -------------------------------------------------------------- brackets

def gamma_upper_bound(t: ToralAutomorphism, n: int, grid: RationalGrid) -> float:
    """min over nonzero Q-rational points of the max torus norm along the
    full forward cycle under f^n.

    Pairing a point with the fixed origin shows gamma(f^n) can be no larger
    than this. All orbit arithmetic is integer mod Q; the square root is the
    only float step, so both kernel backends give bit-identical values.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    Q = grid.Q
    b = _int_matpow([list(r) for r in t.matrix], n)
    b = [[x % Q for x in r] for r in b]
    if t.dim == 2:
        num = orbit_min_max_sqnorm(b[0][0], b[0][1], b[1][0], b[1][1], Q)
        return math.sqrt(num) / Q

    def folded_sqnorm(pt) -> int:
        return sum(min(c, Q - c) ** 2 for c in pt)

    best = None
    visited = set()
    for start in product(range(Q), repeat=t.dim):
        if not any(start) or start in visited:
            continue
        cur = start
        cyc_max = 0
        while True:
            visited.add(cur)
            cyc_max = max(cyc_max, folded_sqnorm(cur))
            cur = tuple(
                sum(b[i][j] * cur[j] for j in range(t.dim)) % Q
                for i in range(t.dim)
            )
            if cur == start:
                break
        if best is None or cyc_max < best:
            best = cyc_max
    return math.sqrt(best) / Q


def certified_gamma1(t: ToralAutomorphism) -> float:
    """A proven lower bound for gamma(f): 1 / (4 max(|M|, |M^-1|)).

    If every point of an orbit stayed within this radius of the origin, the
    minimal integer lifts would compose step by step (each image has norm
    below 1/4, so its reduced representative is unique), giving a bounded
    full orbit in R^m; hyperbolicity forbids that for nonzero points.
    """
    rows = [list(r) for r in t.matrix]
    norm = max(_spectral_norm(rows), _spectral_norm(_int_inverse(rows)))
    return 1.0 / (4.0 * norm)


def lipschitz_lower_value(L: float, L_inv: float, gamma1: float, n: int) -> float:
    """gamma1 * min over 0 <= j <= n of max(L^-j, L_inv^-(n-j)).

    Separation at some time k in [0, n] pulls back to time 0 through at most
    j forward and n - j backward applications, each losing at worst the
    corresponding Lipschitz factor.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    if not (L > 0 and L_inv > 0 and gamma1 > 0):
        raise ValueError("L, L_inv and gamma1 must be positive")
    best = min(max(L ** (-j), L_inv ** (-(n - j))) for j in range(n + 1))
    return gamma1 * best


def lipschitz_constants(t: ToralAutomorphism) -> tuple[float, float]:
    """Spectral norms of M and M^-1: Lipschitz constants of the map and its
    inverse in the flat metric."""
    rows = [list(r) for r in t.matrix]
    return _spectral_norm(rows), _spectral_norm(_int_inverse(rows))


def gamma_lower_bound_lipschitz(t: ToralAutomorphism, n: int,
                                gamma1: float) -> float:
    L, L_inv = lipschitz_constants(t)
    return lipschitz_lower_value(L, L_inv, gamma1, n)


def hE_bracket(t: ToralAutomorphism, n_max: int, grid: RationalGrid,
               gamma1: float | None = None) -> tuple[GammaSequence, GammaSequence]:
    """(upper, lower) gamma sequences for n = 1..n_max.

    Upper entries come from the rational grid, lower entries from the
    Lipschitz inequality seeded with gamma1 (certified automatically when
    not supplied). Every index must satisfy lower <= upper; a violation
    would mean one of the two bounds is wrong and raises.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if gamma1 is None:
        gamma1 = certified_gamma1(t)
    elif not gamma1 > 0:
        raise ValueError("gamma1 must be positive")
    upper_entries = {}
    lower_entries = {}
    for n in range(1, n_max + 1):
        up = gamma_upper_bound(t, n, grid)
        lo = gamma_lower_bound_lipschitz(t, n, gamma1)
        if lo > up * (1.0 + 1e-12):
            raise RuntimeError(
                f"bracket inverted at n={n}: lower {lo!r} > upper {up!r}; "
                "gamma1 is not a valid expansive bound for this map"
            )
        upper_entries[n] = up
        lower_entries[n] = lo
    upper = GammaSequence(
        entries=upper_entries, kind="upper",
        source=f"torus grid orbit bound, Q={grid.Q}",
    )
    lower = GammaSequence(
        entries=lower_entries, kind="lower",
        source=f"torus lipschitz bound, gamma1={gamma1:.12g}",
    )
    return upper, lower


# ----------------------------------------------------- sampling and misc

def grid_sample(t: ToralAutomorphism, grid: RationalGrid):
    """The Q-rational points as a finite sampled system (exact arithmetic
    for the map, float torus distances)."""
    from . import sampled  # local import, sampled also imports nothing back

    Q = grid.Q
    count = Q ** t.dim
    if count > 100_000:
        raise ValueError(f"grid has {count} points, refusing above 100000")
    pts = list(product(range(Q), repeat=t.dim))
    index = {p: i for i, p in enumerate(pts)}
    rows = [list(r) for r in t.matrix]
    inv_rows = [[x % Q for x in r] for r in _int_inverse(rows)]
    fwd_rows = [[x % Q for x in r] for r in rows]

    def apply(mat, p):
        return tuple(
            sum(mat[i][j] * p[j] for j in range(t.dim)) % Q for i in range(t.dim)
        )

    fmap = [index[apply(fwd_rows, p)] for p in pts]
    imap = [index[apply(inv_rows, p)] for p in pts]
    coords = [[c / Q for c in p] for p in pts]
    dist = np.zeros((count, count))
    for i in range(count):
        for j in range(i + 1, count):
            d = torus_distance(coords[i], coords[j])
            dist[i, j] = d
            dist[j, i] = d
    return sampled.FiniteSampledSystem.from_arrays(
        dist=dist, forward=fmap, inverse=imap
    )


def conjugate(t: ToralAutomorphism, p_rows) -> ToralAutomorphism:
    """P M P^-1 for unimodular integer P; the result is validated afresh."""
    p = [[int(x) for x in r] for r in p_rows]
    if abs(_int_det(p)) != 1:
        raise ValueError("conjugating matrix must have |det| = 1")
    m2 = _int_matmul(_int_matmul(p, [list(r) for r in t.matrix]), _int_inverse(p))
    return ToralAutomorphism.from_rows(m2)


# ------------------------------------------------------------------ JSON

def torus_from_json(doc: dict) -> ToralAutomorphism:
    for key in ("dim", "matrix"):
        if key not in doc:
            raise ValueError(f"torus spec missing field {key!r}")
    dim = doc["dim"]
    rows = doc["matrix"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise ValueError("field 'dim': must be a positive integer")
    if len(rows) != dim or any(len(r) != dim for r in rows):
        raise ValueError(f"field 'matrix': expected a {dim}x{dim} array")
    return ToralAutomorphism.from_rows(rows)


def torus_to_json(t: ToralAutomorphism) -> dict:
    return {"dim": t.dim, "matrix": [list(r) for r in t.matrix]}
