"""Surfaces that are not solutions.

A spherical cap bulges above the convex hull of its boundary, and the search
built from the existence argument (maximize the distance to a point far below the
hull) lands on the apex, where K_R = 1/R^2.  The hyperboloid is refused outright
by every check whose hypothesis is H_R = H_L.
"""

import math

from spacelike import analysis, catalog
from spacelike import curvature as cv
from spacelike import field as F
from spacelike.errors import NotASolution

cap = F.sample(catalog.sphere_cap(2.0).surface, F.DomainMask.from_shape(F.disc(0.9), 0.02))
verdict = analysis.hull_containment(cap)
print("sphere cap contained in boundary hull:", verdict.contained)
print(f"  worst violation {verdict.worst_violation:.4f} (expected about {2 - math.sqrt(4 - 0.81):.4f})")

node = analysis.find_elliptic_point(cap)
x, y = cap.mask.node_point(node)
print(f"  elliptic point at ({x:.3f}, {y:.3f}), K_R = {float(cv.invariants(F.fd_jet(cap, node)).k_r):.4f}")

hyp = F.sample(catalog.hyperboloid().surface, F.DomainMask.from_shape(F.disc(1.0), 0.05))
try:
    analysis.verify_field(hyp)
except NotASolution as exc:
    print("hyperboloid refused:", exc)
