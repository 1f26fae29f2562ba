"""Random regular graphs from the pairing model, exactly uniform.

Each vertex gets d half-edge slots; a uniform perfect matching of the slots
is a d-regular multigraph, and rejecting loops and parallel edges leaves the
uniform law on simple d-regular graphs.  Matchings are also countable: the
number of perfect matchings of m points is (m-1)!!, and fixing a coloring
turns matching counts into an exact combinatorial identity.
"""

import numpy as np

from treelab import (eigen_experiment, girth_profile, make_walk_kernel,
                     matching_identity_check, pm_count, sample_regular_graph,
                     spectral_radius)

rng = np.random.default_rng(12)

graph = sample_regular_graph(1000, 3, simple=True, rng=rng)
print(f"sampled a simple 3-regular graph on {graph.n} vertices "
      f"({len(graph.edges)} edges)")
for L in (3, 4, 6):
    print(f"  fraction of vertices on a cycle of length <= {L}: "
          f"{girth_profile(graph, L):.4f}")
print("short cycles are O(1) in number, so locally the graph is a tree")

print()
print("perfect-matching counts (m-1)!!:")
for m in (2, 4, 6, 10, 20):
    print(f"  PM({m:2d}) = {pm_count(m)}")

print()
print("colored-matching identity |M_f| H(mu, n) = PM(n) H(nu, n/2), all")
print("achievable two-color pairs at n = 6:")
for rec in matching_identity_check(6):
    print(f"  mu={rec.mu_counts} nu={rec.nu_counts}: {rec.m_f:3d} x {rec.colorings_mu:3d}"
          f" = {rec.lhs:5d} = {pm_count(6):2d} x {rec.pair_colorings_nu:3d} -> {rec.holds}")

print()
print("spectral check: the walk kernel of sampled cubic graphs sits near the")
print("expander target 2 sqrt(d-1)/d = 0.943:")
for seed in range(5):
    g = sample_regular_graph(500, 3, simple=True, rng=rng)
    print(f"  seed draw {seed}: spectral radius {spectral_radius(make_walk_kernel(g)):.4f}")

print()
print("quantizing an eigenvector to few values breaks the eigenvector")
print("equation somewhere; the failure fraction is the point of the")
print("finitely-many-values obstruction (residuals in units of the")
print("eigenvector scale, tolerance 0.2 / sqrt(n)):")
g = sample_regular_graph(500, 3, simple=True, rng=rng)
tol = 0.2 / np.sqrt(g.n)
for levels in (None, 64, 16, 4, 2):
    rep = eigen_experiment(g, 1, levels, tol=tol, seed=0)
    label = "none" if levels is None else f"{levels:4d}"
    print(f"  levels {label}: error ratio {rep.error_ratio:.4f}, "
          f"max residual {rep.max_residual:.2e}")
