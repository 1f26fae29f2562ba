"""Reversible kernels, their Dobrushin coefficients, and spectral radii.

The Dobrushin coefficient D measures how much the heat-bath conditional law
at a degree-d vertex can move when a single neighbor changes state.  D < 1/d
is the contraction regime in which the simultaneous dynamics of demo 03
converges; this script computes D exactly for the standard families.
"""

from treelab import (dobrushin_coefficient, make_ising, make_potts, spectral_radius,
                     uniform_kernel)

print("Two-state symmetric kernels (keep probability (1+theta)/2)")
print("theta   spectral  D(d=3)   D(d=4)    D < 1/3?")
for theta in (0.0, 0.1, 0.25, 1 / 3, 0.5, 0.8):
    kernel = make_ising(theta - 1e-12 if theta == 1 / 3 else theta)
    d3 = dobrushin_coefficient(kernel, 3)
    d4 = dobrushin_coefficient(kernel, 4)
    print(f"{theta:5.3f}   {spectral_radius(kernel):7.4f}  {d3:7.4f}  {d4:7.4f}"
          f"    {'yes' if d3 < 1 / 3 else 'no'}")

print()
print("At odd d the coefficient equals theta itself; at even d the supremum")
print("sits at the balanced neighbor split and equals theta/(1+theta^2):")
theta = 0.4
print(f"  theta=0.4, d=4: enumerated {dobrushin_coefficient(make_ising(0.4), 4):.12f}"
      f" vs closed form {theta / (1 + theta**2):.12f}")

print()
print("Multi-state switch kernels (move to a uniform other state w.p. p)")
print("k   p      spectral = |1 - pk/(k-1)|   D(d=3)")
for k, p in ((7, 0.3), (7, 6 / 7), (5, 0.5), (12, 0.9)):
    kernel = make_potts(k, p)
    rho = spectral_radius(kernel)
    print(f"{k:2d}  {p:5.3f}  {rho:8.5f} = {abs(1 - p * k / (k - 1)):8.5f}"
          f"          {dobrushin_coefficient(kernel, 3):7.4f}")

print()
print("The uniform kernel forgets its neighbors entirely:")
print(f"  D = {dobrushin_coefficient(uniform_kernel(6), 3)},"
      f" spectral radius = {spectral_radius(uniform_kernel(6)):.2e}")

print()
print("Many states buy room: with k > 2d the switch kernel can have tiny")
print("spectral radius while staying strictly inside the Dobrushin regime.")
d = 3
for k in (7, 9, 15):
    p = (k - 1) / k  # spectral radius exactly zero
    kernel = make_potts(k, p)
    print(f"  k={k:2d}, p=(k-1)/k: spectral={spectral_radius(kernel):.1e},"
          f" D={dobrushin_coefficient(kernel, d):.4f} (1/d = {1 / d:.4f})")
