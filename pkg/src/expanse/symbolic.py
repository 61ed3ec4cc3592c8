"""Exact computations on subshifts of finite type.

A subshift is given by a 0/1 transition matrix A over s symbols; the space
carries the metric d(w, w') = q^-min{|j| : w_j != w'_j} (two-sided) or with
j ranging over nonnegative positions (one-sided). Everything here is exact:
expansive constants of all powers come out as integer exponents of q via a
layered pair automaton, cylinder-cover Lebesgue numbers via a shortest
split path, and entropy via integer-vector power iteration.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .decay import INF, GammaSequence


# ---------------------------------------------------------------- matrices

@dataclass(frozen=True)
class TransitionMatrix:
    size: int
    entries: tuple[tuple[int, ...], ...]

    @staticmethod
    def from_rows(rows) -> "TransitionMatrix":
        rep = validate_matrix(rows)
        if not rep.valid:
            raise ValueError("invalid transition matrix: " + "; ".join(rep.problems))
        return TransitionMatrix(
            size=len(rows), entries=tuple(tuple(int(x) for x in r) for r in rows)
        )


@dataclass(frozen=True)
class MatrixReport:
    size: int
    valid: bool
    problems: tuple[str, ...]
    irreducible: bool | None  # None when shape is already broken


def _rows_of(m) -> list[list[int]]:
    if isinstance(m, TransitionMatrix):
        return [list(r) for r in m.entries]
    return [list(r) for r in m]


def validate_matrix(m) -> MatrixReport:
    """Shape, 0/1 content, row and column support, irreducibility flag.

    Accepts a TransitionMatrix or raw rows. Row/column support failures make
    the matrix invalid (stranded symbols must be trimmed by the caller);
    reducibility is informational only.
    """
    rows = _rows_of(m)
    s = len(rows)
    problems = []
    if s == 0:
        return MatrixReport(0, False, ("empty matrix",), None)
    for i, r in enumerate(rows):
        if len(r) != s:
            problems.append(f"row {i} has length {len(r)}, expected {s}")
        for x in r:
            if x not in (0, 1):
                problems.append(f"entry {x!r} in row {i} is not 0/1")
                break
    if problems:
        return MatrixReport(s, False, tuple(problems), None)
    for i in range(s):
        if not any(rows[i]):
            problems.append(f"empty row {i}")
        if not any(rows[j][i] for j in range(s)):
            problems.append(f"empty column {i}")
    if problems:
        return MatrixReport(s, False, tuple(problems), None)

    def reaches_all(adj) -> bool:
        seen = [False] * s
        seen[0] = True
        stack = [0]
        while stack:
            u = stack.pop()
            for v in range(s):
                if adj[u][v] and not seen[v]:
                    seen[v] = True
                    stack.append(v)
        return all(seen)

    transposed = [[rows[j][i] for j in range(s)] for i in range(s)]
    irreducible = reaches_all(rows) and reaches_all(transposed)
    return MatrixReport(s, True, (), irreducible)


@dataclass(frozen=True)
class SymbolicSpace:
    matrix: TransitionMatrix
    q: float
    sided: str  # "two" or "one"

    def __post_init__(self):
        if not (self.q > 1.0):
            raise ValueError("q must be > 1")
        if self.sided not in ("two", "one"):
            raise ValueError("sided must be 'two' or 'one'")


# -------------------------------------------------------------- entropy

@dataclass(frozen=True)
class EntropyResult:
    value: float
    converged: bool
    iterations: int
    trace: tuple[float, ...]  # (1/k) log(entry sum of A^k), k = 1..min(k_max, 60)


def _ratio(big: int, small: int) -> float:
    # ratio of two positive ints; huge values go through logs to dodge
    # float overflow, plain division otherwise (it is correctly rounded)
    if big.bit_length() > 512:
        return math.exp(math.log(big) - math.log(small))
    return big / small


def entropy(m, k_max: int = 200, tol: float = 1e-10) -> EntropyResult:
    """log of the spectral radius by power iteration with the all-ones start.

    All vector work is exact integer arithmetic: the component sum of A^k 1
    equals the entry sum of A^k, so one loop yields both the Rayleigh-style
    ratios and the display trace, and symbol relabeling cannot move a single
    bit of the result. Oscillating (periodic or reducible) matrices get one
    averaging step and an unconverged flag instead of an error.
    """
    rows = _rows_of(m)
    rep = validate_matrix(rows)
    if not rep.valid:
        raise ValueError("invalid transition matrix: " + "; ".join(rep.problems))
    s = len(rows)
    if k_max < 2:
        raise ValueError("k_max must be >= 2")
    v = [1] * s
    sums = [s]
    trace = []
    r_prev2 = None
    r_prev = None
    r_cur = None
    k_stop = k_max
    converged = False
    for k in range(1, k_max + 1):
        v = [sum(rows[i][j] * v[j] for j in range(s)) for i in range(s)]
        total = sum(v)
        if total == 0:  # cannot happen with row support, kept as a guard
            raise ValueError("matrix power vanished")
        sums.append(total)
        if k <= 60:
            trace.append(math.log(total) / k)
        r_prev2, r_prev, r_cur = r_prev, r_cur, _ratio(total, sums[-2])
        # two consecutive agreements: small integer sums can tie a single
        # ratio pair by accident while still far from the spectral radius
        if (
            r_prev2 is not None
            and abs(r_cur - r_prev) < tol
            and abs(r_prev - r_prev2) < tol
        ):
            converged = True
            k_stop = k
            break
    if converged:
        value = math.log(r_cur)
    else:
        value = math.log((r_cur + r_prev) / 2.0)  # damp the oscillation
    return EntropyResult(
        value=value, converged=converged, iterations=k_stop, trace=tuple(trace)
    )


def hausdorff_dimension(space: SymbolicSpace, k_max: int = 200,
                        tol: float = 1e-10) -> float:
    """(2/log q) * entropy for two-sided spaces, (1/log q) * entropy else."""
    ent = entropy(space.matrix, k_max, tol)
    factor = 2.0 if space.sided == "two" else 1.0
    return factor * ent.value / math.log(space.q)


@dataclass(frozen=True)
class GeneratorReport:
    lower_bound: int
    exact: int | None


def generator_report(m) -> GeneratorReport:
    """Cardinality floor exp(entropy) for generators; exact only for full shifts."""
    rows = _rows_of(m)
    ent = entropy(rows)
    x = math.exp(ent.value)
    # spectral radii of 0/1 matrices can be integers; don't let float fuzz
    # push ceil one step up
    lower = round(x) if abs(x - round(x)) < 1e-9 else math.ceil(x)
    full = all(all(e == 1 for e in r) for r in rows)
    return GeneratorReport(lower_bound=int(lower), exact=len(rows) if full else None)


# ---------------------------------------------- exact expansive constants

@dataclass(frozen=True)
class PairWitness:
    """Periodic pair certificate: two admissible period-length words whose
    difference positions realize the claimed exponent."""

    period: int
    seq_a: tuple[int, ...]
    seq_b: tuple[int, ...]
    difference_positions: frozenset[int]


@dataclass(frozen=True)
class ExactGamma:
    value: float
    exponent: int | None  # None only for the vacuous sentinel
    witness: PairWitness | None
    note: str = ""


def _residue_weight(j: int, n: int, sided: str) -> int:
    jm = j % n
    return min(jm, n - jm) if sided == "two" else jm


class _PairGraph:
    """Layered pair automaton for one forcing level m.

    Nodes are (layer j, symbol a, symbol b) with a == b forced wherever the
    residue weight of j is below m; edges advance the layer and follow the
    matrix in both coordinates. Node ids are (j*s + a)*s + b.
    """

    def __init__(self, rows, n: int, m: int, sided: str):
        s = len(rows)
        self.s = s
        self.n = n
        size = n * s * s
        forced = [_residue_weight(j, n, sided) < m for j in range(n)]
        valid = [False] * size
        for j in range(n):
            for a in range(s):
                if forced[j]:
                    valid[(j * s + a) * s + a] = True
                else:
                    for b in range(s):
                        valid[(j * s + a) * s + b] = True
        succ = [[] for _ in range(size)]
        pred = [[] for _ in range(size)]
        for j in range(n):
            j2 = (j + 1) % n
            for a in range(s):
                for b in (a,) if forced[j] else range(s):
                    u = (j * s + a) * s + b
                    for a2 in range(s):
                        if not rows[a][a2]:
                            continue
                        for b2 in (a2,) if forced[j2] else range(s):
                            if rows[b][b2]:
                                v = (j2 * s + a2) * s + b2
                                succ[u].append(v)
                                pred[v].append(u)
        self.valid = valid
        self.succ = succ
        self.pred = pred

    def node(self, j, a, b):
        return (j * self.s + a) * self.s + b

    def unpack(self, u):
        b = u % self.s
        a = (u // self.s) % self.s
        j = u // (self.s * self.s)
        return j, a, b

    def off_diagonal(self, u) -> bool:
        j, a, b = self.unpack(u)
        return a != b

    def cycle_nodes(self) -> list[bool]:
        # nontrivial SCC membership or a self-loop
        size = len(self.valid)
        index = [-1] * size
        low = [0] * size
        on = [False] * size
        comp = [-1] * size
        comp_size = []
        counter = [0]
        stack = []
        for root in range(size):
            if not self.valid[root] or index[root] != -1:
                continue
            work = [(root, 0)]
            while work:
                u, ei = work[-1]
                if ei == 0:
                    index[u] = low[u] = counter[0]
                    counter[0] += 1
                    stack.append(u)
                    on[u] = True
                advanced = False
                while ei < len(self.succ[u]):
                    v = self.succ[u][ei]
                    ei += 1
                    if index[v] == -1:
                        work[-1] = (u, ei)
                        work.append((v, 0))
                        advanced = True
                        break
                    if on[v]:
                        low[u] = min(low[u], index[v])
                if advanced:
                    continue
                work.pop()
                if low[u] == index[u]:
                    cid = len(comp_size)
                    members = 0
                    while True:
                        w = stack.pop()
                        on[w] = False
                        comp[w] = cid
                        members += 1
                        if w == u:
                            break
                    comp_size.append(members)
                if work:
                    p, _ = work[-1]
                    low[p] = min(low[p], low[u])
        out = [False] * size
        for u in range(size):
            if not self.valid[u]:
                continue
            if comp_size[comp[u]] >= 2 or u in self.succ[u]:
                out[u] = True
        return out

    def closure(self, seeds: list[int], adjacency) -> list[bool]:
        seen = [False] * len(self.valid)
        stack = []
        for u in seeds:
            if not seen[u]:
                seen[u] = True
                stack.append(u)
        while stack:
            u = stack.pop()
            for v in adjacency[u]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(v)
        return seen


def _analyze(rows, n: int, m: int, sided: str):
    """Feasibility of forcing level m plus the data a witness needs.

    Returns (feasible, graph, candidate node or None). Candidates are
    off-diagonal nodes lying on a cycle; feasibility can also come from
    transient nodes that only pass between cycles (or, one-sided, start at
    layer 0), in which case no periodic certificate exists.
    """
    g = _PairGraph(rows, n, m, sided)
    size = len(g.valid)
    cyc = g.cycle_nodes()
    cyc_list = [u for u in range(size) if cyc[u]]
    reach_cycle = g.closure(cyc_list, g.pred)  # nodes that can reach a cycle
    if sided == "two":
        from_cycle = g.closure(cyc_list, g.succ)
    else:
        layer0 = [u for u in range(size) if g.valid[u] and g.unpack(u)[0] == 0]
        from_cycle = g.closure(layer0, g.succ)
    feasible = False
    candidate = None
    for u in range(size):
        if not g.valid[u] or not g.off_diagonal(u):
            continue
        if from_cycle[u] and reach_cycle[u]:
            feasible = True
            if cyc[u]:
                candidate = u
                break  # node ids ascend, the first cycle candidate is minimal
    return feasible, g, candidate


def _shortest_cycle(g: _PairGraph, v: int) -> list[int]:
    # level-synchronous BFS; adjacency lists ascend, discovery order breaks
    # ties, so the returned cycle is deterministic
    parent = {v: None}
    level = [v]
    while level:
        for u in level:
            if v in g.succ[u]:  # closing edge found at the shortest level
                path = [u]
                while parent[path[-1]] is not None:
                    path.append(parent[path[-1]])
                path.reverse()  # v .. u
                path.append(v)
                return path  # v -> ... -> v, len(path)-1 edges
        nxt = []
        for u in level:
            for w in g.succ[u]:
                if w not in parent:
                    parent[w] = u
                    nxt.append(w)
        level = nxt
    raise RuntimeError("internal: candidate node lies on no cycle")


def _assemble_witness(g: _PairGraph, v: int) -> PairWitness:
    path = _shortest_cycle(g, v)[:-1]  # one node per position
    period = len(path)
    # rotate so a layer-0 node leads; cycle length is a multiple of n, so
    # layer 0 occurs
    k0 = min(i for i, u in enumerate(path) if g.unpack(u)[0] == 0)
    rot = path[k0:] + path[:k0]
    seq_a = tuple(g.unpack(u)[1] for u in rot)
    seq_b = tuple(g.unpack(u)[2] for u in rot)
    diffs = frozenset(t for t in range(period) if seq_a[t] != seq_b[t])
    return PairWitness(period=period, seq_a=seq_a, seq_b=seq_b,
                       difference_positions=diffs)


def exact_expansive_constant(space: SymbolicSpace, n: int) -> ExactGamma:
    """gamma(sigma_A^n) = q^-m* where m* maximizes, over admissible distinct
    pairs, the minimal residue weight of a difference position.

    Residue weights are distances to nZ (two-sided) or plain residues mod n
    (one-sided), so m* is capped by floor(n/2) resp. n-1. Feasibility of a
    forcing level is monotone, hence the descending scan returns on the
    first hit. The witness is a periodic pair assembled from a shortest
    cycle when one exists; some reducible matrices only attain the exponent
    along transient pairs, in which case witness is None.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rows = _rows_of(space.matrix)
    cap = n // 2 if space.sided == "two" else n - 1
    for m in range(cap, -1, -1):
        feasible, g, candidate = _analyze(rows, n, m, space.sided)
        if not feasible:
            continue
        witness = _assemble_witness(g, candidate) if candidate is not None else None
        note = "" if witness is not None else (
            "transient certificate: the exponent is attained only by "
            "eventually-diagonal pairs, no periodic witness exists"
        )
        return ExactGamma(value=space.q ** (-m), exponent=m, witness=witness,
                          note=note)
    return ExactGamma(value=INF, exponent=None, witness=None,
                      note="vacuously expansive: the space has a single point")


def verify_pair_witness(space: SymbolicSpace, n: int, w: PairWitness,
                        claimed: int) -> bool:
    """Check the certificate independently of the search.

    Admissibility (including the wrap edge) and a nonempty recorded
    difference set are hard errors; the claim check recomputes the minimal
    residue weight over all positions the periodic difference set visits
    modulo n and compares with the claimed exponent.
    """
    rows = _rows_of(space.matrix)
    s = len(rows)
    P = w.period
    if P < 1 or len(w.seq_a) != P or len(w.seq_b) != P:
        raise ValueError("malformed witness: period and sequence lengths disagree")
    for seq in (w.seq_a, w.seq_b):
        for t in range(P):
            a, b = seq[t], seq[(t + 1) % P]
            if not (0 <= a < s and 0 <= b < s):
                raise ValueError(f"symbol out of range in witness at {t}")
            if not rows[a][b]:
                raise ValueError(f"inadmissible transition {a}->{b} at position {t}")
    diffs = {t for t in range(P) if w.seq_a[t] != w.seq_b[t]}
    if not diffs:
        raise ValueError("witness sequences are identical")
    if frozenset(diffs) != frozenset(p % P for p in w.difference_positions):
        return False
    g = math.gcd(P, n)
    m_hat = min(
        _residue_weight(t + k * P, n, space.sided)
        for t in diffs
        for k in range(n // g)
    )
    return m_hat == claimed


def cylinder_lebesgue_exact(space: SymbolicSpace, n: int) -> float:
    """Exact Lebesgue number of the n-fold refinement of the 0-coordinate
    cylinder cover.

    Window-agreement analysis: delta_n is the largest delta such that
    d(w, w') < delta forces agreement on [0, n-1]. With ell* the shortest
    pair-graph distance from a synchronized (diagonal) state to a split,
    that gives q^-(n - ell*) once n reaches ell*, and 1 before; a space
    where no split is reachable at all (distinct points never agree) has
    delta_n = 1, and a single-point space returns the +inf sentinel.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rows = _rows_of(space.matrix)
    s = len(rows)
    if s == 1:
        return INF
    # BFS over symbol pairs from the diagonal
    dist = {(a, a): 0 for a in range(s)}
    frontier = sorted(dist)
    depth = 0
    while frontier:
        depth += 1
        nxt = []
        for a, b in frontier:
            for a2 in range(s):
                if not rows[a][a2]:
                    continue
                for b2 in range(s):
                    if rows[b][b2] and (a2, b2) not in dist:
                        if a2 != b2:
                            return space.q ** float(-max(0, n - depth))
                        dist[(a2, b2)] = depth
                        nxt.append((a2, b2))
        frontier = nxt
    return 1.0  # splits unreachable: every ball of radius 1 is a single point


# ------------------------------------------------------------- sequences

def gamma_sequence(space: SymbolicSpace, n_max: int) -> GammaSequence:
    entries = {n: exact_expansive_constant(space, n).value for n in range(1, n_max + 1)}
    return GammaSequence(
        entries=entries, kind="exact",
        source=f"sft gamma exact, q={space.q:g}, {space.sided}-sided",
    )


def delta_sequence(space: SymbolicSpace, n_max: int) -> GammaSequence:
    entries = {n: cylinder_lebesgue_exact(space, n) for n in range(1, n_max + 1)}
    return GammaSequence(
        entries=entries, kind="exact",
        source=f"sft cylinder lebesgue, q={space.q:g}, {space.sided}-sided",
    )


# ------------------------------------------------------------------ JSON

_SIDED_ALIASES = {"two": "two", "two-sided": "two", "one": "one",
                  "one-sided": "one"}


def space_from_json(doc: dict) -> SymbolicSpace:
    for key in ("size", "entries", "q", "sided"):
        if key not in doc:
            raise ValueError(f"symbolic spec missing field {key!r}")
    size = doc["size"]
    entries = doc["entries"]
    if not isinstance(size, int) or size < 1:
        raise ValueError("field 'size': must be a positive integer")
    if len(entries) != size:
        raise ValueError(f"field 'entries': expected {size} rows, got {len(entries)}")
    matrix = TransitionMatrix.from_rows(entries)
    sided = _SIDED_ALIASES.get(doc["sided"])
    if sided is None:
        raise ValueError("field 'sided': must be 'two' or 'one'")
    q = float(doc["q"])
    if not q > 1.0:
        raise ValueError("field 'q': must be > 1")
    return SymbolicSpace(matrix=matrix, q=q, sided=sided)


def space_to_json(space: SymbolicSpace) -> dict:
    return {
        "size": space.matrix.size,
        "entries": [list(r) for r in space.matrix.entries],
        "q": space.q,
        "sided": space.sided,
    }


def witness_to_json(w: PairWitness | None) -> dict | None:
    if w is None:
        return None
    return {
        "period": w.period,
        "seq_a": list(w.seq_a),
        "seq_b": list(w.seq_b),
        "difference_positions": sorted(w.difference_positions),
    }
