"""Curvature of one graph under two ambient metrics.

A spacelike graph u(x, y) with |Du| < 1 is a surface in R^3 in two ways: with the
Euclidean metric and with the Lorentz-Minkowski metric dx^2 + dy^2 - dz^2.  This
script evaluates both sets of invariants on the catalog surfaces.
"""

import numpy as np

from spacelike import catalog
from spacelike import curvature as cv

pts = np.array([[2.0, 0.0], [1.5, 1.0], [0.0, -2.5]])

for name in ("plane", "helicoid", "hyperboloid"):
    entry = catalog.get(name)
    inv = cv.invariants(entry.surface.jet(pts[:, 0], pts[:, 1]))
    print(f"\n{entry.name}")
    print("      x      y      H_R       H_L       K_R       K_L")
    for p, hr, hl, kr, kl in zip(pts, inv.h_r, inv.h_l, inv.k_r, inv.k_l):
        print(f"  {p[0]:5.2f}  {p[1]:5.2f}  {hr:8.5f}  {hl:8.5f}  {kr:8.5f}  {kl:8.5f}")

# The Gaussian curvatures always have opposite signs.  The normal curvatures in a
# tangent direction v are tied by |v|_R^2 k^R / cos(theta) = -|v|_L^2 k^L / cosh(psi).
jet = catalog.hyperboloid().surface.jet(np.array(1.0), np.array(0.0))
inv = cv.invariants(jet)
v = cv.lift(jet, [0.6, 0.8])
kr = cv.normal_curvature(jet, v, "R")
kl = cv.normal_curvature(jet, v, "L")
print("\nhyperboloid at (1, 0), direction over (0.6, 0.8)")
print("  k^R =", kr, " k^L =", kl)
print("  weighted sum =", cv.inner(v, v, "R") / inv.cos_theta * kr + cv.inner(v, v, "L") / inv.cosh_psi * kl)

# The surface operator Q = 2 H_L - 2 H_R degenerates only where Du = 0.
for s in (0.0, 0.3, 0.6, 0.9):
    print(f"  |Du| = {s:.1f}: ellipticity gap {cv.ellipticity_gap(s * s):.5f}")
