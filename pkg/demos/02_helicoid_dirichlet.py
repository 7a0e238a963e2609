"""Recovering the helicoid from its boundary values.

The helicoid u = atan2(y, x) has H_R = H_L = 0.  Solving the Dirichlet problem on
an annular sector with the helicoid's own boundary trace should give the helicoid
back, with an error that falls by about four when h is halved.
"""

import numpy as np

from spacelike import catalog
from spacelike import field as F
from spacelike.solver import solve_dirichlet

helicoid = catalog.helicoid().surface
shape = F.sector(1.2, 3.0)

prev = None
for h in (0.1, 0.05, 0.025):
    mask = F.DomainMask.from_shape(shape, h)
    mask = mask.with_boundary_values(lambda x, y: np.arctan2(y, x))
    u, report = solve_dirichlet(mask)

    X, Y = mask.coords()
    inside = mask.interior
    err = np.max(np.abs(u.values[inside] - helicoid.eval(X[inside], Y[inside]).u))
    ratio = "" if prev is None else f"  ratio {prev / err:.2f}"
    print(
        f"h = {h:<6} nodes {inside.sum():6d}  newton steps {report.iterations}"
        f"  (init {report.init})  max error {err:.3e}{ratio}"
    )
    prev = err

print("residual history at the finest grid:", ["%.2e" % r for r in report.residual_history])
