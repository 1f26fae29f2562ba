"""Local statistics of colored graphs and the colored-neighborhood metric.

The sampling unit is the canonical rooted colored r-ball; distributions over
balls compare in total variation, families of distributions compare in
Hausdorff distance, and the weighted double sum over radii and color counts
is the local-global distance between two graphs (computed exactly on tiny
instances, sampled with a flag otherwise).
"""

from treelab import (ball_distribution, canonical_ball, complete_bipartite,
                     complete_graph, cycle_graph, dcn_estimate, graph_from_edges,
                     tv_distance)

print("canonical forms ignore presentation, keep structure:")
star = [(0, 1), (0, 2), (0, 3)]
a = canonical_ball(star, [9, 1, 2, 2], 0)
b = canonical_ball([(0, 3), (0, 1), (0, 2)], [9, 2, 2, 1], 0)
print(f"  two presentations of one colored star agree: {a == b}")
path = [(0, 1), (1, 2)]
print(f"  path rooted at an end vs at the center differ: "
      f"{canonical_ball(path, [0, 0, 0], 0) != canonical_ball(path, [0, 0, 0], 1)}")
print(f"  double edge differs from single edge: "
      f"{canonical_ball([(0, 1)], [0, 0], 0) != canonical_ball([(0, 1), (0, 1)], [0, 0], 0)}")

print()
print("ball laws: a monochromatic 7-cycle has one radius-2 ball type;")
print("a colored complete graph has as many as there are colors:")
print(f"  7-cycle: {len(ball_distribution(cycle_graph(7), [0] * 7, 2))} ball type(s)")
print(f"  K4 colored 0,1,1,2 at r=1: "
      f"{len(ball_distribution(complete_graph(4), [0, 1, 1, 2], 1))} ball types")

print()
print("total variation between the coloring profiles of K4 and the other")
print("cubic multigraph on 4 vertices (two double edges), one fixed coloring:")
other = graph_from_edges(4, 3, [(0, 1), (0, 1), (2, 3), (2, 3), (0, 2), (1, 3)])
coloring = [0, 1, 0, 1]
tv = tv_distance(ball_distribution(complete_graph(4), coloring, 1),
                 ball_distribution(other, coloring, 1))
print(f"  TV = {tv}")

print()
print("exact local-global distance on tiny instances (all 2^n colorings):")
base = complete_bipartite(3, 3)
perm = [4, 2, 0, 5, 3, 1]
iso = graph_from_edges(6, 3, [(perm[u], perm[v]) for u, v in base.edges])
est = dcn_estimate(base, iso, 2, 2, coloring_budget=64)
print(f"  relabeled K33 vs K33: value {est.value} (exact={est.exact}, "
      f"tail < {est.tail_bound:.3f})")

prism = graph_from_edges(6, 3, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3),
                                (0, 3), (1, 4), (2, 5)])
est2 = dcn_estimate(base, prism, 2, 2, coloring_budget=64)
print(f"  K33 vs triangular prism:  value {est2.value:.5f} "
      f"(terms {[(kr, round(v, 4)) for kr, v in sorted(est2.terms.items())]})")
print("  the prism has triangles, K33 does not: already r=1 profiles differ")
