"""Finite reversible Markov kernels.

A kernel is the seed of every branching chain in this package: a row-stochastic
matrix ``q`` together with its stationary distribution ``pi`` satisfying
detailed balance.  This module provides the standard model families (two-state
symmetric, uniform-switch multi-state, simple random walk on a regular graph),
the exact Dobrushin coefficient of the heat-bath update on a degree-d vertex,
and the spectral radius of the kernel.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceededError

ATOL = 1e-12


@dataclass(frozen=True)
class TransitionKernel:
    """Reversible Markov kernel with its stationary distribution.

    Invariants, checked at construction within 1e-12:

    - every row of ``q`` sums to 1 and all entries lie in [0, 1];
    - ``pi`` has strictly positive entries summing to 1;
    - detailed balance: ``pi[s] * q[s, t] == pi[t] * q[t, s]`` for all s, t.
    """

    q: np.ndarray
    pi: np.ndarray

    def __post_init__(self):
        q = np.array(self.q, dtype=float)
        pi = np.array(self.pi, dtype=float)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise ValueError("transition matrix must be square")
        k = q.shape[0]
        if k < 1:
            raise ValueError("kernel needs at least one state")
        if pi.shape != (k,):
            raise ValueError("stationary vector has wrong length")
        if np.any(q < -ATOL) or np.any(q > 1.0 + ATOL):
            raise ValueError("transition probabilities must lie in [0, 1]")
        if np.max(np.abs(q.sum(axis=1) - 1.0)) > ATOL:
            raise ValueError("rows of the transition matrix must sum to 1")
        if np.any(pi <= 0.0):
            raise ValueError("stationary distribution must be strictly positive")
        if abs(pi.sum() - 1.0) > ATOL:
            raise ValueError("stationary distribution must sum to 1")
        flux = pi[:, None] * q
        if np.max(np.abs(flux - flux.T)) > ATOL:
            raise ValueError("detailed balance fails: kernel is not reversible")
        q.setflags(write=False)
        pi.setflags(write=False)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "pi", pi)

    @property
    def state_count(self) -> int:
        return self.q.shape[0]


@dataclass(frozen=True)
class NeighborConfig:
    """Multiset of the d neighbor states of a vertex (order-free)."""

    states: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(sorted(int(s) for s in self.states)))
        if len(self.states) == 0:
            raise ValueError("neighbor configuration cannot be empty")
        if self.states[0] < 0:
            raise ValueError("states are nonnegative indices")


def make_ising(theta: float) -> TransitionKernel:
    """Two-state symmetric kernel: keep the current state with probability (1+theta)/2.

    Requires |theta| < 1.  Stationary distribution is uniform.
    """
    if not -1.0 < theta < 1.0:
        raise ValueError("theta must lie in the open interval (-1, 1)")
    a = (1.0 + theta) / 2.0
    b = (1.0 - theta) / 2.0
    return TransitionKernel(q=[[a, b], [b, a]], pi=[0.5, 0.5])


def make_potts(k: int, p: float) -> TransitionKernel:
    """k-state uniform-switch kernel.

    With probability ``p`` the chain moves to a uniformly chosen *different*
    state, otherwise it stays put: diagonal ``1 - p``, off-diagonal
    ``p / (k - 1)``.  Stationary distribution is uniform and the spectral
    radius is ``|1 - p*k/(k-1)|`` exactly.  ``make_potts(2, p)`` coincides with
    ``make_ising(1 - 2*p)``.
    """
    if k < 2:
        raise ValueError("k must be at least 2")
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    off = p / (k - 1)
    q = np.full((k, k), off)
    np.fill_diagonal(q, 1.0 - p)
    return TransitionKernel(q=q, pi=np.full(k, 1.0 / k))


def uniform_kernel(k: int) -> TransitionKernel:
    """Kernel with all entries 1/k: every step is an independent uniform draw."""
    if k < 1:
        raise ValueError("k must be positive")
    return TransitionKernel(q=np.full((k, k), 1.0 / k), pi=np.full(k, 1.0 / k))


def make_walk_kernel(graph) -> TransitionKernel:
    """Simple-random-walk kernel on a connected regular (multi)graph.

    ``q[s, t]`` is the multiplicity of the edge st divided by the graph degree
    (a loop at s contributes 2 to its own row entry).  Regularity forces the
    uniform stationary distribution.
    """
    n = graph.n
    if not _connected(graph):
        raise ValueError("walk kernel requires a connected graph")
    q = np.zeros((n, n))
    for v in range(n):
        for w in graph.neighbors[v]:
            q[v, w] += 1.0 / graph.d
    return TransitionKernel(q=q, pi=np.full(n, 1.0 / n))


def _connected(graph) -> bool:
    n = graph.n
    if n == 0:
        return False
    seen = np.zeros(n, dtype=bool)
    stack = [0]
    seen[0] = True
    while stack:
        v = stack.pop()
        for w in graph.neighbors[v]:
            if not seen[w]:
                seen[w] = True
                stack.append(int(w))
    return bool(seen.all())


def kernel_from_matrix(q) -> TransitionKernel:
    """Build a kernel from a bare transition matrix.

    The stationary distribution is recovered from the left Perron eigenvector;
    construction then validates reversibility, so non-reversible matrices are
    rejected.
    """
    q = np.asarray(q, dtype=float)
    if q.ndim != 2 or q.shape[0] != q.shape[1]:
        raise ValueError("transition matrix must be square")
    evals, evecs = np.linalg.eig(q.T)
    idx = int(np.argmin(np.abs(evals - 1.0)))
    pi = np.real(evecs[:, idx])
    s = pi.sum()
    if s == 0:
        raise ValueError("could not extract a stationary distribution")
    pi = pi / s
    return TransitionKernel(q=q, pi=pi)


def load_kernel(path) -> TransitionKernel:
    """Read a kernel from a plain-text matrix file (one row per line)."""
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rows.append([float(tok) for tok in line.split()])
    if not rows:
        raise ValueError(f"empty kernel file: {path}")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError("ragged rows in kernel file")
    return kernel_from_matrix(np.array(rows))


def write_kernel(kernel: TransitionKernel, path) -> None:
    with open(path, "w") as fh:
        for row in kernel.q:
            fh.write(" ".join(repr(float(x)) for x in row) + "\n")


def conditional_weights(kernel: TransitionKernel, neighbor_states) -> np.ndarray:
    """Unnormalized heat-bath weights pi[s] * prod_u q[s, omega_u]."""
    if isinstance(neighbor_states, NeighborConfig):
        neighbor_states = neighbor_states.states
    w = kernel.pi.copy()
    for u in neighbor_states:
        w = w * kernel.q[:, int(u)]
    return w


def dobrushin_coefficient(kernel: TransitionKernel, d: int, budget: int = 10**8) -> float:
    """Exact Dobrushin coefficient of the heat-bath update at a degree-d vertex.

    Supremum, over all pairs of neighbor configurations differing in a single
    coordinate, of the total variation distance between the two conditional
    laws of the center state.  Deterministic: enumerates the unordered
    multisets of the d-1 shared neighbor states (the conditional law is
    exchangeable in the neighbors) times ordered pairs of differing states,
    which cuts the cost from k^d to C(k+d-2, d-1) * k^2.

    Configurations of probability zero under the chain carry no conditional
    law and are skipped.
    """
    if d < 1:
        raise ValueError("d must be positive")
    k = kernel.state_count
    n_multisets = math.comb(k + d - 2, d - 1)
    if n_multisets * k * k > budget:
        raise BudgetExceededError(
            f"Dobrushin enumeration needs {n_multisets * k * k} conditional-law "
            f"evaluations, over the budget of {budget}"
        )
    q = kernel.q
    best = 0.0
    for shared in itertools.combinations_with_replacement(range(k), d - 1):
        w = kernel.pi.copy()
        for u in shared:
            w = w * q[:, u]
        cond = w[:, None] * q  # column a: weights of the center given shared + {a}
        totals = cond.sum(axis=0)
        live = totals > 0.0
        if np.count_nonzero(live) < 2:
            continue
        cond = cond[:, live] / totals[live]
        diffs = 0.5 * np.abs(cond[:, :, None] - cond[:, None, :]).sum(axis=0)
        best = max(best, float(diffs.max()))
    return best


def spectral_radius(kernel: TransitionKernel) -> float:
    """Largest |eigenvalue| of q after removing the Perron eigenvalue 1.

    Computed on the symmetrization diag(pi)^(1/2) q diag(pi)^(-1/2), whose
    spectrum is real by reversibility; accurate to about 1e-10.
    """
    s = np.sqrt(kernel.pi)
    sym = kernel.q * (s[:, None] / s[None, :])
    evals = np.linalg.eigvalsh(0.5 * (sym + sym.T))
    if evals.size == 1:
        return 0.0
    rest = np.delete(evals, int(np.argmax(evals)))
    return float(np.max(np.abs(rest)))
