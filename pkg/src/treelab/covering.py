"""Covering matrices, covering error ratios, and the threshold machinery.

A covering matrix M prescribes, for a vertex colored s, exactly M(s, q)
neighbors of each color q (rows sum to the degree d).  The covering error
ratio c(G, M) is the smallest fraction of violating vertices over all
colorings of G.  For random d-regular graphs the ratio stays above a
threshold: the entropy route bounds the total variation between the
star-minus-one-leaf law and its independent version by
sqrt(eps * ln|S| * (d-1)/(d-2)), while near-coverings force it above
(delta(M, eps)^d - eps)/2 with delta a minimum state probability; epsilon_0
is the crossing point of the two curves.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceededError


@dataclass(frozen=True)
class CoveringMatrix:
    """Nonnegative integer matrix with constant row sum d and strongly
    connected support digraph."""

    mat: np.ndarray

    def __post_init__(self):
        mat = np.array(self.mat, dtype=np.int64)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1] or mat.shape[0] < 1:
            raise ValueError("covering matrix must be square and nonempty")
        if np.any(mat < 0):
            raise ValueError("entries must be nonnegative integers")
        sums = mat.sum(axis=1)
        if not np.all(sums == sums[0]):
            raise ValueError("all rows must sum to the same degree")
        if not _strongly_connected(mat > 0):
            raise ValueError("support digraph must be strongly connected")
        mat.setflags(write=False)
        object.__setattr__(self, "mat", mat)

    @property
    def s_count(self) -> int:
        return self.mat.shape[0]

    @property
    def d(self) -> int:
        return int(self.mat[0].sum())


def _strongly_connected(support: np.ndarray) -> bool:
    def reach(adj):
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for u in np.flatnonzero(adj[v]):
                if int(u) not in seen:
                    seen.add(int(u))
                    stack.append(int(u))
        return len(seen) == adj.shape[0]

    return reach(support) and reach(support.T)


def _support_diameter(mat: np.ndarray) -> int:
    s = mat.shape[0]
    support = mat > 0
    diam = 0
    for src in range(s):
        dist = {src: 0}
        frontier = [src]
        while frontier:
            nxt = []
            for v in frontier:
                for u in np.flatnonzero(support[v]):
                    if int(u) not in dist:
                        dist[int(u)] = dist[v] + 1
                        nxt.append(int(u))
            frontier = nxt
        diam = max(diam, max(dist.values()))
    return diam


def dominating_matrix(d: int) -> CoveringMatrix:
    """[[0, d], [1, d-1]]: color 0 is a dominating set hitting every vertex exactly once."""
    return CoveringMatrix([[0, d], [1, d - 1]])


def bipartite_matrix(d: int) -> CoveringMatrix:
    """[[0, d], [d, 0]]: proper 2-coloring, i.e. each class an independent set."""
    return CoveringMatrix([[0, d], [d, 0]])


def is_covering_at(graph, coloring, v: int, matrix: CoveringMatrix) -> bool:
    """True iff for every color q the vertex has exactly M(f(v), q) neighbors
    colored q, counted with multiplicity (a loop contributes 2)."""
    counts = np.zeros(matrix.s_count, dtype=np.int64)
    for w in graph.neighbors[v]:
        counts[coloring[int(w)]] += 1
    return bool(np.all(counts == matrix.mat[coloring[v]]))


def error_ratio(graph, coloring, matrix: CoveringMatrix) -> float:
    """Fraction of vertices at which the coloring is not a covering."""
    coloring = list(coloring)
    bad = sum(1 for v in range(graph.n) if not is_covering_at(graph, coloring, v, matrix))
    return bad / graph.n


def _matrix_automorphism_orbit_reps(matrix: CoveringMatrix) -> list[int]:
    """One color per orbit of the permutations preserving the matrix."""
    s = matrix.s_count
    mat = matrix.mat
    reps = set(range(s))
    for perm in itertools.permutations(range(s)):
        p = list(perm)
        if all(mat[p[a], p[b]] == mat[a, b] for a in range(s) for b in range(s)):
            for a in range(s):
                if p[a] < a and a in reps and p[a] in reps:
                    reps.discard(a)
    return sorted(reps)


def min_error_exact(graph, matrix: CoveringMatrix, budget: int = 10**8):
    """Exact covering error ratio by pruned exhaustive search.

    Returns ``(ratio, witness_coloring)``.  Vertices are colored in
    breadth-first order; a vertex's violation status is settled as soon as its
    closed neighborhood is colored, which drives the branch-and-bound prune.
    Color symmetries of the matrix pin the first vertex to orbit
    representatives.  Requires the graph degree to match the matrix degree
    (and hence d >= 3 graphs for d >= 3 matrices).
    """
    if graph.d != matrix.d:
        raise ValueError(f"graph degree {graph.d} does not match matrix degree {matrix.d}")
    s = matrix.s_count
    n = graph.n
    if s**n > budget:
        raise BudgetExceededError(f"{s}^{n} colorings exceed the search budget")

    # breadth-first vertex order from 0
    order = []
    seen = [False] * n
    queue = [0]
    seen[0] = True
    while queue:
        v = queue.pop(0)
        order.append(v)
        for w in graph.neighbors[v]:
            w = int(w)
            if not seen[w]:
                seen[w] = True
                queue.append(w)
    order += [v for v in range(n) if not seen[v]]
    pos = {v: i for i, v in enumerate(order)}
    # vertex u is decided once u and all its neighbors are colored
    decided_at: list[list[int]] = [[] for _ in range(n)]
    for u in range(n):
        last = max([pos[u]] + [pos[int(w)] for w in graph.neighbors[u]])
        decided_at[last].append(u)

    coloring = np.zeros(n, dtype=np.int64)
    best_count = n + 1
    best_coloring = coloring.copy()
    first_colors = _matrix_automorphism_orbit_reps(matrix)

    def dfs(depth: int, violations: int):
        nonlocal best_count, best_coloring
        if violations >= best_count:
            return
        if depth == n:
            best_count = violations
            best_coloring = coloring.copy()
            return
        v = order[depth]
        colors = first_colors if depth == 0 else range(s)
        for c in colors:
            coloring[v] = c
            extra = 0
            for u in decided_at[depth]:
                if not is_covering_at(graph, coloring, u, matrix):
                    extra += 1
            dfs(depth + 1, violations + extra)

    dfs(0, 0)
    return best_count / n, best_coloring.copy()


def min_error_local_search(graph, matrix: CoveringMatrix, restarts: int,
                           rng: np.random.Generator):
    """Steepest-descent single-vertex recoloring from random starts.

    Returns ``(ratio, witness_coloring)`` with ratio an upper bound on the
    exact minimum, non-increasing in the number of restarts.
    """
    if graph.d != matrix.d:
        raise ValueError(f"graph degree {graph.d} does not match matrix degree {matrix.d}")
    s = matrix.s_count
    n = graph.n
    best_count = n + 1
    best_coloring = None

    def violations(coloring) -> int:
        return sum(1 for v in range(n) if not is_covering_at(graph, coloring, v, matrix))

    for _ in range(max(1, restarts)):
        coloring = rng.integers(0, s, size=n)
        current = violations(coloring)
        improved = True
        while improved and current > 0:
            improved = False
            move = None
            for v in range(n):
                old = coloring[v]
                affected = [v] + [int(w) for w in graph.neighbors[v]]
                before = sum(1 for u in set(affected)
                             if not is_covering_at(graph, coloring, u, matrix))
                for c in range(s):
                    if c == old:
                        continue
                    coloring[v] = c
                    after = sum(1 for u in set(affected)
                                if not is_covering_at(graph, coloring, u, matrix))
                    gain = before - after
                    if gain > 0 and (move is None or gain > move[0]):
                        move = (gain, v, c)
                coloring[v] = old
            if move is not None:
                _, v, c = move
                coloring[v] = c
                current -= move[0]
                improved = True
        if current < best_count:
            best_count = current
            best_coloring = coloring.copy()
    return best_count / n, best_coloring


# ---------------------------------------------------------------------------
# the epsilon_0 threshold
# ---------------------------------------------------------------------------

def _delta_generic(matrix: CoveringMatrix, eps: float) -> float:
    k = _support_diameter(matrix.mat)
    d = matrix.d
    out = 1.0 / (matrix.s_count * d**k)
    out -= eps * sum(d**-i for i in range(1, k + 1))
    return out


def _delta_dominating(d: int, eps: float) -> float:
    return (1.0 - eps) / (d + 1.0)


def _delta_bipartite(eps: float) -> float:
    return 0.5 - eps


def delta_lower_bound(matrix: CoveringMatrix, eps: float) -> float:
    """Guaranteed minimum state probability of near-coverings.

    Generic bound: 1/(|S| d^K) - eps * sum_{i<=K} d^-i with K the support
    digraph diameter (a state of high probability feeds its neighbors along
    directed paths).  Sharper registered values override it: (1-eps)/(d+1)
    for the dominating matrix and 1/2 - eps for the bipartite matrix.  Raises
    when the bound degenerates to a nonpositive value (eps too large).
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    d = matrix.d
    if np.array_equal(matrix.mat, dominating_matrix(d).mat):
        value = _delta_dominating(d, eps)
    elif np.array_equal(matrix.mat, bipartite_matrix(d).mat):
        value = _delta_bipartite(eps)
    else:
        value = _delta_generic(matrix, eps)
    if value <= 0.0:
        raise ValueError(f"delta bound is nonpositive at eps={eps}: premise fails")
    return value


@dataclass(frozen=True)
class ThresholdReport:
    """First crossing of g(eps) = (delta^d - eps)/2 - sqrt(eps ln|S| (d-1)/(d-2))."""

    epsilon0: float
    d: int
    s_count: int
    delta_id: str
    rel_tol: float
    grid: np.ndarray = field(repr=False)
    grid_values: np.ndarray = field(repr=False)
    certificate_lo: float  # g just below the root: positive
    certificate_hi: float  # g just above the root: nonpositive


def _resolve_delta(family, d: int | None):
    if isinstance(family, CoveringMatrix):
        dd = family.d
        if np.array_equal(family.mat, dominating_matrix(dd).mat):
            return (lambda e: _delta_dominating(dd, e)), dd, family.s_count, "dominating"
        if np.array_equal(family.mat, bipartite_matrix(dd).mat):
            return _delta_bipartite, dd, family.s_count, "bipartite"
        return (lambda e: _delta_generic(family, e)), dd, family.s_count, "generic"
    if family == "dominating":
        if d is None:
            raise ValueError("family thresholds need d")
        return (lambda e: _delta_dominating(d, e)), d, 2, "dominating"
    if family in ("independence", "bipartite"):
        if d is None:
            raise ValueError("family thresholds need d")
        return _delta_bipartite, d, 2, "bipartite"
    raise ValueError(f"unknown delta family {family!r}")


def epsilon0(family, d: int | None = None, s_count: int | None = None,
             rel_tol: float = 1e-6) -> ThresholdReport:
    """Smallest eps where the entropy-route bound overtakes the covering bound.

    ``family`` is a CoveringMatrix or one of the registered ids
    ("dominating", "independence").  A 64-point logarithmic scan of
    [1e-16, 1/2] locates the first sign change of

        g(eps) = (delta(eps)^d - eps)/2 - sqrt(eps * ln(s) * (d-1)/(d-2))

    (natural logarithm), then bisection sharpens it to relative tolerance
    ``rel_tol``.  The full scan is retained in the report so a non-monotone g
    would be visible; eps values where the delta premise fails count as
    crossed.
    """
    delta_fn, d, s_default, delta_id = _resolve_delta(family, d)
    if d < 3:
        raise ValueError("d must be at least 3")
    s = s_default if s_count is None else s_count
    coef = math.log(s) * (d - 1.0) / (d - 2.0)

    def g(eps: float) -> float:
        dv = delta_fn(eps)
        if dv <= 0.0:
            return -math.inf
        return 0.5 * (dv**d - eps) - math.sqrt(eps * coef)

    grid = np.logspace(-16, math.log10(0.5), 64)
    # thresholds shrink like delta^(2d); extend the scan downward when the
    # default window starts past the crossing
    low_exp = -16
    while g(float(grid[0])) <= 0.0 and low_exp > -300:
        extension = np.logspace(low_exp - 24, low_exp, 48, endpoint=False)
        grid = np.concatenate([extension, grid])
        low_exp -= 24
    values = np.array([g(e) for e in grid])
    if values[0] <= 0.0:
        raise ValueError("g is already nonpositive at the smallest scanned eps")
    crossing = np.flatnonzero(values <= 0.0)
    if crossing.size == 0:
        raise ValueError("no crossing found on the scan grid")
    lo = float(grid[crossing[0] - 1])
    hi = float(grid[crossing[0]])
    while hi - lo > rel_tol * lo:
        mid = math.sqrt(lo * hi)
        if g(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    eps0 = 0.5 * (lo + hi)
    return ThresholdReport(
        epsilon0=eps0, d=d, s_count=s, delta_id=delta_id, rel_tol=rel_tol,
        grid=grid, grid_values=values,
        certificate_lo=g(eps0 * (1.0 - 1e-5)), certificate_hi=g(eps0 * (1.0 + 1e-5)),
    )


@dataclass(frozen=True)
class DominatingRow:
    d: int
    epsilon0: float
    dominating_bound: float  # 1/(d+1) + epsilon0


def dominating_table(d_from: int, d_to: int) -> list[DominatingRow]:
    """Per-degree thresholds and the dominating-ratio lower bounds they imply."""
    out = []
    for d in range(d_from, d_to + 1):
        row = epsilon0("dominating", d=d)
        out.append(DominatingRow(d=d, epsilon0=row.epsilon0,
                                 dominating_bound=1.0 / (d + 1.0) + row.epsilon0))
    return out


def format_dominating_table(rows: list[DominatingRow]) -> str:
    """Aligned-text rendering of a dominating table."""
    lines = [f"{'d':>3}  {'epsilon0':>12}  {'dominating_bound':>18}"]
    for row in rows:
        lines.append(f"{row.d:>3}  {row.epsilon0:>12.4e}  {row.dominating_bound:>18.10f}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class IndependenceRow:
    d: int
    epsilon0: float
    independence_bound: float  # 1/2 - epsilon0


def independence_threshold(d: int) -> IndependenceRow:
    """Upper bound 1/2 - epsilon0 on the independence ratio of random d-regular graphs."""
    row = epsilon0("independence", d=d)
    return IndependenceRow(d=d, epsilon0=row.epsilon0,
                           independence_bound=0.5 - row.epsilon0)


# ---------------------------------------------------------------------------
# rigidity of star laws
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RigidityVerdict:
    rigid: bool
    leaf_determined: bool
    rest_tv_from_product: float
    marginals_identical: bool

    @property
    def label(self) -> str:
        return "RIGID (not typical)" if self.rigid else "inconclusive"


def rigidity_check(star_joint, tol: float = 1e-9) -> RigidityVerdict:
    """Check rigidity of a star law: one leaf a function of the rest, rest not i.i.d.

    ``star_joint`` is an array over (center, leaf_1, ..., leaf_d); leaf_1
    plays the distinguished role.  Rigid laws cannot be modelled on random
    d-regular graphs.
    """
    joint = np.asarray(star_joint, dtype=float)
    if joint.ndim < 3:
        raise ValueError("star law needs a center and at least two leaves")
    if abs(joint.sum() - 1.0) > 1e-9 or np.any(joint < 0):
        raise ValueError("star law must be a probability array")

    # (i): the leaf on axis 1 is determined by the other coordinates
    support_per_rest = (joint > 0).sum(axis=1)
    leaf_determined = bool(np.all(support_per_rest <= 1))

    # (ii): the law on the remaining coordinates is not an i.i.d. product
    rest = joint.sum(axis=1)
    marginals = [
        rest.sum(axis=tuple(a for a in range(rest.ndim) if a != axis))
        for axis in range(rest.ndim)
    ]
    product = marginals[0]
    for m in marginals[1:]:
        product = np.multiply.outer(product, m)
    tv = 0.5 * float(np.abs(rest - product).sum())
    identical = all(
        0.5 * float(np.abs(m - marginals[0]).sum()) <= tol for m in marginals[1:]
    )
    not_iid = (tv > tol) or (not identical)
    return RigidityVerdict(
        rigid=leaf_determined and not_iid,
        leaf_determined=leaf_determined,
        rest_tv_from_product=tv,
        marginals_identical=identical,
    )


def read_covering_matrix(path) -> CoveringMatrix:
    """Text format: header ``s_count d``, then the integer matrix rows."""
    with open(path) as fh:
        tokens = [line.split() for line in fh if line.strip() and not line.startswith("#")]
    if not tokens or len(tokens[0]) != 2:
        raise ValueError(f"missing 's_count d' header in {path}")
    s, d = int(tokens[0][0]), int(tokens[0][1])
    rows = [[int(x) for x in row] for row in tokens[1 : 1 + s]]
    matrix = CoveringMatrix(rows)
    if matrix.s_count != s or matrix.d != d:
        raise ValueError("matrix body does not match its header")
    return matrix


def write_covering_matrix(matrix: CoveringMatrix, path) -> None:
    with open(path, "w") as fh:
        fh.write(f"{matrix.s_count} {matrix.d}\n")
        for row in matrix.mat:
            fh.write(" ".join(str(int(x)) for x in row) + "\n")
