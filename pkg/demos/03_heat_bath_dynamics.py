"""Simultaneous heat-bath dynamics driven by i.i.d. labels.

One sweep wakes the radius-2 local maxima of a fresh uniform label field (a
3-separated set of density 1/(d^2+1) in the interior) and resamples each
woken vertex from its conditional law given its neighbors.  Three facts are
demonstrated at small scale:

  1. the branching-chain law is an exact fixed point of the sweep;
  2. under D < 1/d, coupled sweeps contract the disagreement between two
     copies at a measurable geometric rate;
  3. iterating from pure noise therefore drags an i.i.d. field onto the
     chain law, with a computable distance bound per sweep.
"""

import numpy as np

from treelab import (build_tree, converge_from_iid, estimate_hamming_decay,
                     fixed_point_test, make_ising, sample_uniform_labels,
                     wake_probability, waking_set)

rng = np.random.default_rng(7)
kernel = make_ising(0.25)

tree = build_tree(3, 5)
ws = waking_set(tree, sample_uniform_labels(tree, rng))
print(f"waking set on a {tree.n}-vertex tree: {int(ws.member.sum())} members "
      f"(interior density target {wake_probability(3):.2f})")

print()
print("1. Fixed point: sweep chain samples 30 times, compare window laws")
rep = fixed_point_test(kernel, d=3, depth=6, sweeps=30, replicas=3000, rng=rng)
print(f"   vertex TV {rep.tv_vertex:.2e} vs 3-sigma floor {3 * rep.floor_vertex:.2e}"
      f" -> {'ok' if rep.vertex_ok else 'DRIFT'}")
print(f"   edge   TV {rep.tv_edge:.2e} vs floor {3 * rep.floor_edge:.2e}"
      f" -> {'ok' if rep.edge_ok else 'DRIFT'}")
print(f"   star   TV {rep.tv_star:.2e} vs floor {3 * rep.floor_star:.2e}"
      f" -> {'ok' if rep.star_ok else 'DRIFT'}")

print()
print("2. Contraction: two independent chain samples under shared sweeps")
decay = estimate_hamming_decay(kernel, d=3, depth=7, sweeps=50, replicas=800, rng=rng)
print(f"   Dobrushin D = {decay.dobrushin}, wake probability p = {decay.p_wake}")
print(f"   fitted rate {decay.rate:.4f} vs bound 1 - p(1 - dD) = "
      f"{decay.contraction_bound:.4f}")
print("   sweep:    ", "  ".join(f"{s:5d}" for s in decay.sweeps[:6]))
print("   distance: ", "  ".join(f"{m:.3f}" for m in decay.mean_distance[:6]))

print()
print("3. From noise to the chain: distance upper bound per sweep")
conv = converge_from_iid(kernel, d=3, depth=7, sweeps=120, replicas=600, rng=rng)
print(f"   initial {conv.mean_distance[0]:.3f} (predicted {conv.predicted_initial}),"
      f" after 120 sweeps {conv.final_distance:.4f} +- {conv.final_stderr:.4f}")
marks = [0, 10, 20, 40, 80, 120]
print("   sweep:    ", "  ".join(f"{s:5d}" for s in marks))
print("   bound:    ", "  ".join(f"{conv.mean_distance[s]:.3f}" for s in marks))
print()
print("The residual floor is a truncation artifact: leaves never wake, and the")
print("frozen boundary feeds a disagreement gradient that halves per level.")
