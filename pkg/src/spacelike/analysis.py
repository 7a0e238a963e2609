"""Global verdicts on a surface patch given as a `GridField`.

The solution-conditional checks (sign of K_R, width bound, level-curve inequality)
first confirm that the field satisfies the H_R = H_L equation up to a residual
threshold and raise `NotASolution` otherwise.  Hull containment and the
elliptic-point search make sense for any compact patch.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import ndimage
from scipy.spatial import ConvexHull, QhullError

from . import curvature as cv
from .errors import NotASolution, TheoremViolation
from .field import GridField, fd_jets
from .solver import _jsonable, residual

# max |fd - exact| / h^2 over the helicoid sector (1.2 < r < 3, |arg| < 3pi/4) is
# 0.064 for K_R, 0.097 for H_R and 1.6 for H_L at h = 0.05 ... 0.0125; x10 margin
C_FD = 16.0
# helicoid sampling residual is ~7 h^2 on the same sector
C_SOLUTION = 20.0


def fd_tolerance(h):
    return C_FD * h * h


def default_solution_tol(h):
    return C_SOLUTION * h * h


def default_margin(h):
    """Rings of nodes skipped by the pointwise checks on solved fields.

    Dirichlet data sampled at off-curve boundary nodes perturbs the discrete
    solution by grid-scale oscillations that decay geometrically inward; they
    fall below ``h^2`` after about ``log2(1/h)`` rings.
    """
    return max(2, math.ceil(math.log2(1.0 / h)))


@dataclass
class CheckResult:
    name: str
    holds: bool
    lhs: float
    rhs: float
    tolerance: float
    worst_node: tuple[int, int] | None
    details: dict

    def to_dict(self):
        return _jsonable(asdict(self))


@dataclass(frozen=True, eq=False)
class RegionStar:
    """Interior nodes with non-horizontal tangent plane, and their width."""

    members: np.ndarray  # bool grid
    width: float
    width_error: float
    inf_abs_hl: float
    tol_grad: float
    argmin_hl: tuple[int, int] | None

    @property
    def empty(self):
        return not self.members.any()


@dataclass(frozen=True)
class HullVerdict:
    contained: bool
    worst_point: tuple[int, int]
    worst_violation: float
    tol_hull: float
    planar: bool


def require_solution(field: GridField, solution_tol=None):
    tol = default_solution_tol(field.h) if solution_tol is None else solution_tol
    res = residual(field)
    if not res.norm_inf <= tol:
        raise NotASolution(
            f"|Q_h(u)|_inf = {res.norm_inf:.3e} exceeds {tol:.3e}; the field does not "
            "satisfy H_R = H_L"
        )
    return res


def _jets_and_invariants(field: GridField):
    jets = fd_jets(field)
    return jets, cv.invariants(jets)


def bulk_nodes(mask, rings):
    """Interior nodes at least ``rings`` lattice steps (chessboard) from non-interior nodes."""
    if rings <= 0:
        return mask.interior.copy()
    return ndimage.binary_erosion(
        mask.interior, structure=np.ones((3, 3), bool), iterations=rings
    )


def _node(field, flat_index):
    I, J = np.nonzero(field.mask.interior)
    return int(I[flat_index]), int(J[flat_index])


# --------------------------------------------------------------------------
# Omega* and its width


def region_star(field: GridField, tol_grad=None) -> RegionStar:
    """Nodes where ``|Du_h| > tol_grad`` and the width of that set.

    The default threshold ``10 h max|D^2u_h|`` follows the resolvable gradient.
    Width is twice the largest lattice distance from a member node to a
    non-member node; the true width lies within ``width_error = 2h``.
    """
    jets, inv = _jets_and_invariants(field)
    h = field.h
    if tol_grad is None:
        deep = bulk_nodes(field.mask, 2)[field.mask.interior]
        d2 = np.abs(jets.d2u[deep] if deep.any() else jets.d2u)
        tol_grad = max(10.0 * h * float(np.max(d2)), 1e-12)
    g = np.sqrt(jets.grad_sq)
    member_flat = g > tol_grad
    members = np.zeros(field.dims, bool)
    members[field.mask.interior] = member_flat
    if not member_flat.any():
        return RegionStar(members, 0.0, 2 * h, math.inf, tol_grad, None)
    padded = np.pad(members, 1)
    dist = ndimage.distance_transform_edt(padded)[1:-1, 1:-1] * h
    width = 2.0 * float(dist.max())
    abs_hl = np.where(member_flat, np.abs(inv.h_l), np.inf)
    k = int(np.argmin(abs_hl))
    return RegionStar(members, width, 2 * h, float(abs_hl[k]), tol_grad, _node(field, k))


def check_width_bound(field: GridField, solution_tol=None, tol_width=0.0) -> CheckResult:
    """``width(Omega*) <= 1 / (sqrt(2) inf |H_L|)``, with the weaker bound ``2 / inf |H_R|`` reported.

    The lattice width is shrunk by its error bar before comparing, so rounding
    never produces a false violation.
    """
    require_solution(field, solution_tol)
    star = region_star(field)
    inf_hl = star.inf_abs_hl
    rhs = math.inf if inf_hl == 0.0 or math.isinf(inf_hl) else 1.0 / (math.sqrt(2.0) * inf_hl)
    jets, inv = _jets_and_invariants(field)
    member_flat = star.members[field.mask.interior]
    inf_hr = float(np.min(np.abs(inv.h_r[member_flat]))) if member_flat.any() else math.inf
    rhs_hr = math.inf if inf_hr == 0.0 or math.isinf(inf_hr) else 2.0 / inf_hr
    lhs = star.width
    holds = max(lhs - star.width_error, 0.0) <= rhs + tol_width
    return CheckResult(
        "width_bound",
        bool(holds),
        lhs,
        rhs,
        tol_width,
        star.argmin_hl,
        {
            "width_error": star.width_error,
            "inf_abs_HL": inf_hl,
            "rhs_hr": rhs_hr,
            "tol_grad": star.tol_grad,
            "members": int(star.members.sum()),
        },
    )


# --------------------------------------------------------------------------
# sign of the Euclidean Gaussian curvature


def _inner_nodes(field, margin):
    margin = default_margin(field.h) if margin is None else int(margin)
    inner = bulk_nodes(field.mask, margin)[field.mask.interior]
    if not inner.any():
        inner = np.ones_like(inner)
    return margin, inner


def check_kr_nonpositive(
    field: GridField, solution_tol=None, tol_k=None, tol_h=None, margin=None
) -> CheckResult:
    """``K_R <= tol_K`` everywhere, plus the quantitative form of "K_R = 0 forces H_R = 0".

    On a solution, in the frame of level curve and gradient line,
    ``H_L^2 <= K_L / 3`` and ``K_R = -A^4 K_L``, hence ``|H_R| <= sqrt(|K_R| / 3) / A^2``.
    Each node must satisfy this with ``|K_R| + tol_K`` under the root and
    ``tol_H`` added.  Nodes within ``margin`` rings of the boundary are skipped
    (``None`` picks `default_margin`).
    """
    require_solution(field, solution_tol)
    tol_k = fd_tolerance(field.h) if tol_k is None else tol_k
    tol_h = tol_k if tol_h is None else tol_h
    margin, inner = _inner_nodes(field, margin)
    _, inv = _jets_and_invariants(field)
    k_r = np.where(inner, inv.k_r, -np.inf)
    k = int(np.argmax(k_r))
    max_kr = float(k_r[k])
    bound = np.sqrt((np.abs(inv.k_r) + tol_k) / 3.0) / inv.a_factor**2 + tol_h
    excess = np.where(inner, np.abs(inv.h_r) - bound, -np.inf)
    z = int(np.argmax(excess))
    holds = max_kr <= tol_k and excess[z] <= 0.0
    return CheckResult(
        "kr_nonpositive",
        bool(holds),
        max_kr,
        0.0,
        tol_k,
        _node(field, k),
        {
            "zero_case_max_excess": float(excess[z]),
            "zero_case_node": _node(field, z),
            "tol_H": tol_h,
            "margin": margin,
        },
    )


# --------------------------------------------------------------------------
# convex hull of the boundary


def _surface_points(field: GridField, which):
    X, Y = field.mask.coords()
    sel = getattr(field.mask, which)
    return np.column_stack([X[sel], Y[sel], field.values[sel]]), np.argwhere(sel)


def hull_containment(field: GridField, tol_hull=None) -> HullVerdict:
    """Is every interior point ``(x, y, u)`` inside the hull of the boundary points?

    The violation of a point is its largest signed distance to the hull's facet
    planes (positive outside).  Coplanar boundary data has a flat hull; there the
    violation is ``max(|distance to the plane|, in-plane distance outside the 2-D
    hull)``, which is zero for points of the plane region.
    """
    tol_hull = field.h**2 if tol_hull is None else tol_hull
    bpts, _ = _surface_points(field, "boundary")
    ipts, inodes = _surface_points(field, "interior")
    centre = bpts.mean(axis=0)
    _, sv, vt = np.linalg.svd(bpts - centre, full_matrices=False)
    scale = max(sv[0], 1.0)
    planar = sv[-1] <= 1e-10 * scale
    if not planar:
        try:
            hull = ConvexHull(bpts)
        except QhullError:
            planar = True
    if planar:
        normal = vt[-1]
        basis = vt[:2]
        d_plane = np.abs((ipts - centre) @ normal)
        b2 = (bpts - centre) @ basis.T
        i2 = (ipts - centre) @ basis.T
        hull2 = ConvexHull(b2)
        v2 = np.max(i2 @ hull2.equations[:, :2].T + hull2.equations[:, 2], axis=1)
        viol = np.maximum(d_plane, v2)
    else:
        viol = np.max(ipts @ hull.equations[:, :3].T + hull.equations[:, 3], axis=1)
    k = int(np.argmax(viol))
    worst = float(viol[k])
    return HullVerdict(
        bool(worst <= tol_hull), tuple(int(c) for c in inodes[k]), worst, tol_hull, bool(planar)
    )


def _hull_check(field: GridField, tol_hull=None) -> CheckResult:
    v = hull_containment(field, tol_hull)
    return CheckResult(
        "hull_containment",
        v.contained,
        v.worst_violation,
        0.0,
        v.tol_hull,
        v.worst_point,
        {"planar_boundary": v.planar},
    )


# --------------------------------------------------------------------------
# elliptic points


def find_elliptic_point(field: GridField, tol_k=None, tol_hull=None):
    """Interior node with ``K_R > tol_K`` when the patch leaves its boundary hull.

    Mirrors the existence argument: take the worst hull violator ``p'``, put a
    centre ``q`` on the line from the boundary centroid ``c`` through ``p'`` at
    distance twice the boundary circumradius behind ``c``, and maximise
    ``|p - q|^2`` over the patch.  Returns ``None`` for hull-contained patches.
    Raises `TheoremViolation` when the patch leaves the hull yet no node is
    elliptic at tolerance.
    """
    tol_k = fd_tolerance(field.h) if tol_k is None else tol_k
    verdict = hull_containment(field, tol_hull)
    if verdict.contained:
        return None
    bpts, _ = _surface_points(field, "boundary")
    ipts, inodes = _surface_points(field, "interior")
    c = bpts.mean(axis=0)
    circ = float(np.max(np.linalg.norm(bpts - c, axis=1)))
    X, Y = field.mask.coords()
    i, j = verdict.worst_point
    p_out = np.array([X[i, j], Y[i, j], field.values[i, j]])
    d = p_out - c
    d /= np.linalg.norm(d)
    q = c - 2.0 * circ * d
    f = np.sum((ipts - q) ** 2, axis=1)
    _, inv = _jets_and_invariants(field)
    # interior rows of fd_jets and of _surface_points are both row-major
    order = np.argsort(-f)
    for k in order[: max(1, len(order) // 100)]:
        if inv.k_r[k] > tol_k:
            return tuple(int(x) for x in inodes[k])
    k = int(np.argmax(inv.k_r))
    if inv.k_r[k] > tol_k:
        return tuple(int(x) for x in inodes[k])
    raise TheoremViolation(
        f"patch leaves its boundary hull by {verdict.worst_violation:.3e} but "
        f"max K_R = {inv.k_r[k]:.3e} <= {tol_k:.3e}"
    )


# --------------------------------------------------------------------------
# level curves


def levelcurve_identity_defect(jet):
    """``2 H_L - f(|Du|) k`` pointwise; vanishes on solutions where ``Du != 0``."""
    inv = cv.invariants(jet)
    k = cv.level_curve_curvature(jet)
    return 2.0 * inv.h_l - cv.level_curve_factor(np.sqrt(jet.grad_sq)) * k


def check_levelcurve_inequality(
    field: GridField, solution_tol=None, tol_h=None, margin=None
) -> CheckResult:
    """``2 sqrt(2) |H_L| <= |k|`` on Omega*, with ``k`` the level-curve curvature.

    Both sides carry finite-difference error, so the ratio is taken against
    ``|k| + tol_H``; ``worst_ratio <= 1`` is the pass condition.  Nodes within
    ``margin`` rings of the boundary are skipped (``None`` picks `default_margin`).
    """
    require_solution(field, solution_tol)
    tol_h = fd_tolerance(field.h) if tol_h is None else tol_h
    margin, inner = _inner_nodes(field, margin)
    star = region_star(field)
    member_flat = star.members[field.mask.interior] & inner
    if not member_flat.any():
        return CheckResult("levelcurve_inequality", True, 0.0, 1.0, tol_h, None, {"members": 0})
    jets = fd_jets(field)[member_flat]
    inv = cv.invariants(jets)
    k = cv.level_curve_curvature(jets)
    ratio = 2.0 * math.sqrt(2.0) * np.abs(inv.h_l) / (np.abs(k) + tol_h)
    w = int(np.argmax(ratio))
    defect = levelcurve_identity_defect(jets)
    flat_idx = np.flatnonzero(member_flat)[w]
    return CheckResult(
        "levelcurve_inequality",
        bool(ratio[w] <= 1.0),
        float(ratio[w]),
        1.0,
        tol_h,
        _node(field, int(flat_idx)),
        {
            "members": int(member_flat.sum()),
            "identity_defect_max": float(np.max(np.abs(defect))),
            "margin": margin,
        },
    )


# --------------------------------------------------------------------------
# identity check on a field and the full report


def check_normal_curvature_identity(field: GridField, seed=0, rtol=1e-10) -> CheckResult:
    """Random tangent directions at every node satisfy the two-metric identity."""
    rng = np.random.default_rng(seed)
    jets = fd_jets(field)
    inv = cv.invariants(jets)
    ang = rng.uniform(0.0, 2 * np.pi, size=jets.u.shape)
    v = cv.lift(jets, np.stack([np.cos(ang), np.sin(ang)], -1))
    tr = cv.inner(v, v, "R") / inv.cos_theta * cv.normal_curvature(jets, v, "R")
    tl = cv.inner(v, v, "L") / inv.cosh_psi * cv.normal_curvature(jets, v, "L")
    scale = np.abs(tr) + np.abs(tl)
    rel = np.where(scale > 0, np.abs(tr + tl) / np.where(scale > 0, scale, 1.0), 0.0)
    k = int(np.argmax(rel))
    return CheckResult(
        "normal_curvature_identity",
        bool(rel[k] <= rtol),
        float(rel[k]),
        0.0,
        rtol,
        _node(field, k),
        {"seed": int(seed)},
    )


SOLUTION_CHECKS = ("kr_nonpositive", "hull_containment", "width_bound", "levelcurve_inequality")


def verify_field(field: GridField, solution_tol=None, seed=0, margin=None) -> dict:
    """Run every check; raises `NotASolution` if the residual is not small.

    ``margin`` is forwarded to the two pointwise checks; the default suits fields
    produced by `solve_dirichlet` from sampled boundary data.
    """
    res = require_solution(field, solution_tol)
    checks = [
        check_kr_nonpositive(field, solution_tol, margin=margin),
        _hull_check(field),
        check_width_bound(field, solution_tol),
        check_levelcurve_inequality(field, solution_tol, margin=margin),
        check_normal_curvature_identity(field, seed),
    ]
    return {
        "residual_norm_inf": res.norm_inf,
        "solution_tol": default_solution_tol(field.h) if solution_tol is None else solution_tol,
        "h": field.h,
        "margin": default_margin(field.h) if margin is None else int(margin),
        "all_hold": all(c.holds for c in checks),
        "checks": [c.to_dict() for c in checks],
    }


def write_report(report: dict, path):
    with open(path, "w") as fh:
        json.dump(_jsonable(report), fh, indent=2, sort_keys=True)
        fh.write("\n")
