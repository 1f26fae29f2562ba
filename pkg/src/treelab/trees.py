"""Finite truncated regular trees and branching Markov chains.

The arena is the depth-R truncation of the degree-d tree with free boundary:
the root has d children, every other internal vertex has d-1 children, and
leaves sit exactly at depth R.  The chain law restricted to any ball around an
interior vertex equals the infinite-tree law, so truncation introduces no bias
for interior observables; long-range statistics should be read off vertices of
depth at most R/2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceededError
from .kernels import TransitionKernel


@dataclass(frozen=True)
class TruncatedTree:
    """Truncated degree-d tree with breadth-first vertex numbering.

    ``neighbors`` is an (n, d) index table padded with the sentinel ``n``
    (parent first, then children); ``children`` likewise holds only children.
    """

    d: int
    depth: int
    parent: np.ndarray
    depth_of: np.ndarray
    neighbors: np.ndarray
    neighbor_count: np.ndarray
    children: np.ndarray
    child_count: np.ndarray

    @property
    def n(self) -> int:
        return self.parent.size

    def level(self, ell: int) -> np.ndarray:
        """Vertex indices at depth ell (contiguous by construction)."""
        return np.flatnonzero(self.depth_of == ell)


def tree_vertex_count(d: int, depth: int) -> int:
    """1 + d * ((d-1)^depth - 1) / (d - 2) vertices in the truncated tree."""
    return 1 + d * ((d - 1) ** depth - 1) // (d - 2)


def build_tree(d: int, depth: int, max_vertices: int = 5_000_000) -> TruncatedTree:
    """Build the depth-``depth`` truncation of the degree-``d`` tree.

    Breadth-first numbering: root is 0, each vertex's children are contiguous,
    so the layout is deterministic.
    """
    if d < 3:
        raise ValueError("degree must be at least 3")
    if depth < 1:
        raise ValueError("depth must be at least 1")
    n = tree_vertex_count(d, depth)
    if n > max_vertices:
        raise BudgetExceededError(f"tree would have {n} vertices, over the budget of {max_vertices}")

    parent = np.full(n, -1, dtype=np.int64)
    depth_of = np.zeros(n, dtype=np.int64)
    children = np.full((n, d), n, dtype=np.int64)
    child_count = np.zeros(n, dtype=np.int64)

    next_free = 1
    level_start, level_size = 0, 1
    for ell in range(depth):
        for v in range(level_start, level_start + level_size):
            nkids = d if v == 0 else d - 1
            kids = np.arange(next_free, next_free + nkids)
            children[v, :nkids] = kids
            child_count[v] = nkids
            parent[kids] = v
            depth_of[kids] = ell + 1
            next_free += nkids
        level_start += level_size
        level_size = d if ell == 0 else level_size * (d - 1)
    assert next_free == n

    neighbors = np.full((n, d), n, dtype=np.int64)
    neighbor_count = np.zeros(n, dtype=np.int64)
    neighbors[0, :d] = children[0, :d]
    neighbor_count[0] = d
    for v in range(1, n):
        cc = int(child_count[v])
        neighbors[v, 0] = parent[v]
        neighbors[v, 1 : 1 + cc] = children[v, :cc]
        neighbor_count[v] = 1 + cc

    for arr in (parent, depth_of, neighbors, neighbor_count, children, child_count):
        arr.setflags(write=False)
    return TruncatedTree(d, depth, parent, depth_of, neighbors, neighbor_count, children, child_count)


def tree_distance(tree: TruncatedTree, u: int, v: int) -> int:
    """Graph distance between two vertices (walks both up to the common ancestor)."""
    du, dv = int(tree.depth_of[u]), int(tree.depth_of[v])
    dist = 0
    while du > dv:
        u, du, dist = int(tree.parent[u]), du - 1, dist + 1
    while dv > du:
        v, dv, dist = int(tree.parent[v]), dv - 1, dist + 1
    while u != v:
        u, v = int(tree.parent[u]), int(tree.parent[v])
        dist += 2
    return dist


@dataclass(frozen=True)
class Configuration:
    """A state labeling of the tree vertices, entries in {0..k-1}."""

    tree: TruncatedTree
    states: np.ndarray

    def __post_init__(self):
        if self.states.shape != (self.tree.n,):
            raise ValueError("state array length must equal the vertex count")


@dataclass(frozen=True)
class RealField:
    """A real label per tree vertex (e.g. i.i.d. uniform marks)."""

    tree: TruncatedTree
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (self.tree.n,):
            raise ValueError("value array length must equal the vertex count")


def _categorical_rows(cum_rows: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Draw one category per row from row-wise cumulative distributions.

    ``cum_rows`` must end at exactly 1.0 per row (callers rescale), so every
    u in [0, 1) lands in a bin.
    """
    return (u[..., None] < cum_rows).argmax(axis=-1)


def _normalized_cumsum(probs: np.ndarray) -> np.ndarray:
    cum = np.cumsum(probs, axis=-1)
    return cum / cum[..., -1:]


def sample_bmc_batch(kernel: TransitionKernel, tree: TruncatedTree, rng: np.random.Generator,
                     replicas: int) -> np.ndarray:
    """(n, replicas) states: root drawn from pi, children from the parent's q-row.

    Exact sampler; each replica is an independent draw of the chain on the
    truncated tree.
    """
    n = tree.n
    states = np.empty((n, replicas), dtype=np.int64)
    cum_pi = _normalized_cumsum(kernel.pi)
    states[0] = _categorical_rows(cum_pi[None, :], rng.random(replicas))
    cum_q = _normalized_cumsum(kernel.q)
    for ell in range(1, tree.depth + 1):
        verts = tree.level(ell)
        par_states = states[tree.parent[verts]]
        u = rng.random((verts.size, replicas))
        states[verts] = _categorical_rows(cum_q[par_states], u)
    return states


def sample_bmc(kernel: TransitionKernel, tree: TruncatedTree, rng: np.random.Generator) -> Configuration:
    """One exact draw of the branching chain on the truncated tree."""
    return Configuration(tree, sample_bmc_batch(kernel, tree, rng, 1)[:, 0])


def sample_iid(dist, tree: TruncatedTree, rng: np.random.Generator) -> Configuration:
    """Independent per-vertex draws from a finite distribution."""
    dist = np.asarray(dist, dtype=float)
    if dist.ndim != 1 or abs(dist.sum() - 1.0) > 1e-9 or np.any(dist < 0):
        raise ValueError("dist must be a probability vector")
    cum = _normalized_cumsum(dist)
    states = _categorical_rows(cum[None, :], rng.random(tree.n))
    return Configuration(tree, states.astype(np.int64))


def sample_uniform_labels(tree: TruncatedTree, rng: np.random.Generator) -> RealField:
    """Independent uniform [0, 1) labels, one per vertex."""
    return RealField(tree, rng.random(tree.n))


def exact_bmc_marginals(kernel: TransitionKernel, pattern: str, d: int | None = None,
                        budget: int = 10**8) -> np.ndarray:
    """Exact chain law on a small vertex pattern.

    - ``vertex``: the stationary vector pi, shape (k,).
    - ``edge``: pi[s] * q[s, t], shape (k, k).
    - ``star``: pi[s] * prod_i q[s, t_i] over ordered leaf tuples,
      shape (k,) * (d+1) with the center on axis 0.
    """
    k = kernel.state_count
    if pattern == "vertex":
        return kernel.pi.copy()
    if pattern == "edge":
        steps = 1
    elif pattern == "star":
        if d is None or d < 1:
            raise ValueError("star pattern needs the degree d")
        steps = d
    else:
        raise ValueError(f"unknown pattern {pattern!r}")
    if k ** (steps + 1) > budget:
        raise BudgetExceededError(f"pattern table of size {k ** (steps + 1)} exceeds budget")
    out = kernel.pi.copy()
    for _ in range(steps):
        out = out[..., None] * kernel.q.reshape((k,) + (1,) * (out.ndim - 1) + (k,))
    return out


@dataclass(frozen=True)
class CorrelationEstimate:
    value: float
    stderr: float
    replicas: int
    distance: int


def estimate_correlation(kernel: TransitionKernel, distance: int, encoding,
                         replicas: int, rng: np.random.Generator) -> CorrelationEstimate:
    """Monte Carlo Pearson correlation of encoded states at tree distance k.

    The two observation points are the root and a depth-k descendant, whose
    joint law is the k-step stationary chain, so only the path is sampled.
    """
    encoding = np.asarray(encoding, dtype=float)
    if encoding.shape != (kernel.state_count,):
        raise ValueError("encoding must assign one real per state")
    mean = float(kernel.pi @ encoding)
    if float(kernel.pi @ (encoding - mean) ** 2) <= 0.0:
        raise ValueError("encoding has zero variance under the stationary law")
    if distance == 0:
        return CorrelationEstimate(1.0, 0.0, replicas, 0)
    if replicas < 2:
        raise ValueError("need at least 2 replicas")
    cum_pi = _normalized_cumsum(kernel.pi)
    cum_q = _normalized_cumsum(kernel.q)
    x = _categorical_rows(cum_pi[None, :], rng.random(replicas))
    g0 = encoding[x]
    for _ in range(distance):
        x = _categorical_rows(cum_q[x], rng.random(replicas))
    gk = encoding[x]
    c = np.corrcoef(g0, gk)
    r = float(c[0, 1])
    stderr = (1.0 - r * r) / np.sqrt(replicas - 1)
    return CorrelationEstimate(r, float(stderr), replicas, distance)


def local_correlation_bound(distance: int, d: int) -> float:
    """(k + 1 - 2k/d) * (d-1)^(-k/2): the correlation ceiling for local processes."""
    if distance < 1:
        raise ValueError("distance must be at least 1")
    k = distance
    return (k + 1.0 - 2.0 * k / d) * (d - 1.0) ** (-k / 2.0)


def exact_correlations(kernel: TransitionKernel, encoding, k_max: int) -> np.ndarray:
    """Exact stationary correlations at distances 1..k_max via transfer matrices."""
    encoding = np.asarray(encoding, dtype=float)
    pi, q = kernel.pi, kernel.q
    mean = float(pi @ encoding)
    var = float(pi @ (encoding - mean) ** 2)
    if var <= 0.0:
        raise ValueError("encoding has zero variance under the stationary law")
    out = np.empty(k_max)
    v = encoding.copy()
    for k in range(1, k_max + 1):
        v = q @ v
        out[k - 1] = (float(pi @ (encoding * v)) - mean * mean) / var
    return out


@dataclass(frozen=True)
class CorrelationVerdict:
    verdict: str  # "VIOLATES" or "CONSISTENT"
    witness: int | None
    k_max: int
    correlations: np.ndarray
    bounds: np.ndarray


def classify_correlation_decay(kernel: TransitionKernel, d: int, encoding,
                               k_max: int) -> CorrelationVerdict:
    """Compare exact chain correlations against the local-process ceiling.

    Returns VIOLATES with the first witness distance where |correlation|
    exceeds the bound (so the chain cannot be a weak limit of local rules),
    or CONSISTENT up to k_max.  No sampling is involved.
    """
    corr = exact_correlations(kernel, encoding, k_max)
    bounds = np.array([local_correlation_bound(k, d) for k in range(1, k_max + 1)])
    exceed = np.abs(corr) > bounds + 1e-12
    if exceed.any():
        witness = int(np.flatnonzero(exceed)[0]) + 1
        return CorrelationVerdict("VIOLATES", witness, k_max, corr, bounds)
    return CorrelationVerdict("CONSISTENT", None, k_max, corr, bounds)


def dump_configuration(config: Configuration) -> str:
    """One line per vertex: ``depth index state``."""
    lines = [
        f"{int(config.tree.depth_of[v])} {v} {int(config.states[v])}"
        for v in range(config.tree.n)
    ]
    return "\n".join(lines) + "\n"
