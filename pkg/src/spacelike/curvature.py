"""Pointwise curvature invariants of a spacelike graph under both ambient metrics.

Orientation: ``N_R`` points upward (Euclidean unit), ``N_L`` is future-directed
(Lorentzian unit timelike).  With these choices

    H_R = +1/2 tr A_R,   H_L = -1/2 tr A_L,
    kappa^R_v = <D_t t, N_R>_R,   kappa^L_v = <D_t t, N_L>_L.

Every function broadcasts over arrays of jets.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDirection, NoLevelCurve, NotSpacelike, TangencyError
from .field import DELTA_SPACE, GridField, ScalarJet, fd_jets, require_spacelike

METRICS = ("R", "L")


@dataclass(frozen=True, eq=False)
class CurvatureSample:
    h_r: np.ndarray
    h_l: np.ndarray
    k_r: np.ndarray
    k_l: np.ndarray
    cos_theta: np.ndarray
    cosh_psi: np.ndarray
    a_factor: np.ndarray
    ellipticity_gap: np.ndarray
    n_r: np.ndarray
    n_l: np.ndarray


def _hess_form(jet: ScalarJet, a1, a2):
    return jet.uxx * a1 * a1 + 2.0 * jet.uxy * a1 * a2 + jet.uyy * a2 * a2


def a_factor(grad_sq):
    """``A = sqrt((1 - |Du|^2) / (1 + |Du|^2))``, i.e. ``cos(theta) / cosh(psi)``."""
    return np.sqrt((1.0 - grad_sq) / (1.0 + grad_sq))


def ellipticity_gap(grad_sq):
    """``(1/sqrt(1-|Du|^2) - 1/sqrt(1+|Du|^2))^2``; zero exactly when ``Du = 0``."""
    return (1.0 / np.sqrt(1.0 - grad_sq) - 1.0 / np.sqrt(1.0 + grad_sq)) ** 2


def invariants(jet: ScalarJet, delta_space: float = DELTA_SPACE) -> CurvatureSample:
    require_spacelike(jet, delta_space)
    w2 = jet.grad_sq
    lap = jet.uxx + jet.uyy
    hdd = _hess_form(jet, jet.ux, jet.uy)
    det = jet.uxx * jet.uyy - jet.uxy**2
    wl = 1.0 - w2
    wr = 1.0 + w2
    h_l = 0.5 * (wl * lap + hdd) / wl**1.5
    h_r = 0.5 * (wr * lap - hdd) / wr**1.5
    one = np.ones_like(w2)
    n_l = np.stack([jet.ux, jet.uy, one], axis=-1) / np.sqrt(wl)[..., None]
    n_r = np.stack([-jet.ux, -jet.uy, one], axis=-1) / np.sqrt(wr)[..., None]
    return CurvatureSample(
        h_r=h_r,
        h_l=h_l,
        k_r=det / wr**2,
        k_l=-det / wl**2,
        cos_theta=1.0 / np.sqrt(wr),
        cosh_psi=1.0 / np.sqrt(wl),
        a_factor=a_factor(w2),
        ellipticity_gap=ellipticity_gap(w2),
        n_r=n_r,
        n_l=n_l,
    )


# --------------------------------------------------------------------------
# tangent vectors and metrics


def inner(v, w, metric):
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    s = v[..., 0] * w[..., 0] + v[..., 1] * w[..., 1]
    if metric == "R":
        return s + v[..., 2] * w[..., 2]
    if metric == "L":
        return s - v[..., 2] * w[..., 2]
    raise ValueError(f"metric must be 'R' or 'L', got {metric!r}")


def lift(jet: ScalarJet, a):
    """Tangent vector of the graph over the plane direction ``a = (a1, a2)``."""
    a = np.asarray(a, dtype=float)
    a1, a2 = a[..., 0], a[..., 1]
    return np.stack([a1, a2, jet.ux * a1 + jet.uy * a2], axis=-1)


def orthonormal_pair(jet: ScalarJet, angle, metric):
    """An orthonormal tangent basis for ``metric``, rotated by ``angle`` in the plane.

    Gram-Schmidt on the lifts of ``(cos, sin)`` and ``(-sin, cos)``.
    """
    c, s = np.cos(angle), np.sin(angle)
    v1 = lift(jet, np.stack([c + 0 * jet.ux, s + 0 * jet.ux], -1))
    v2 = lift(jet, np.stack([-s + 0 * jet.ux, c + 0 * jet.ux], -1))
    v1 = v1 / np.sqrt(inner(v1, v1, metric))[..., None]
    v2 = v2 - inner(v2, v1, metric)[..., None] * v1
    v2 = v2 / np.sqrt(inner(v2, v2, metric))[..., None]
    return v1, v2


def normal_curvature(jet: ScalarJet, v, metric, delta_space: float = DELTA_SPACE):
    """Normal curvature ``kappa_v`` of the graph in tangent direction ``v``.

    Computed as the second fundamental form quotient: with ``a = (v1, v2)``,

        kappa^R_v =  a.D2u.a / (sqrt(1 + |Du|^2) |v|_R^2)
        kappa^L_v = -a.D2u.a / (sqrt(1 - |Du|^2) |v|_L^2)
    """
    require_spacelike(jet, delta_space)
    v = np.asarray(v, dtype=float)
    if v.shape[-1] != 3:
        raise ValueError("v must be a 3-vector")
    scale = np.sqrt(inner(v, v, "R"))
    if np.any(scale == 0.0):
        raise DegenerateDirection("zero tangent direction")
    off = v[..., 2] - (jet.ux * v[..., 0] + jet.uy * v[..., 1])
    if np.any(np.abs(off) > 1e-10 * scale):
        raise TangencyError("direction is not tangent to the graph")
    q = _hess_form(jet, v[..., 0], v[..., 1])
    w2 = jet.grad_sq
    if metric == "R":
        return q / (np.sqrt(1.0 + w2) * inner(v, v, "R"))
    if metric == "L":
        return -q / (np.sqrt(1.0 - w2) * inner(v, v, "L"))
    raise ValueError(f"metric must be 'R' or 'L', got {metric!r}")


def level_curve_direction(jet: ScalarJet):
    """``alpha' = (-u_y, u_x, 0)``, tangent to the lifted level curve."""
    return np.stack([-jet.uy, jet.ux, np.zeros_like(jet.ux)], axis=-1)


def gradient_direction(jet: ScalarJet):
    """``beta' = (u_x, u_y, |Du|^2)``, tangent to the lifted gradient line."""
    return np.stack([jet.ux, jet.uy, jet.grad_sq], axis=-1)


def level_curve_curvature(jet: ScalarJet):
    """Curvature of the planar level curve of ``u`` through the jet's point.

    Frenet frame ``t = (-u_y, u_x)/|Du|``, ``n = -Du/|Du|``; the returned value is
    ``<D_t t, n> = t.D2u.t / |Du|``.  This is the unique sign for which
    ``kappa^L_{alpha'} = -k |Du| / sqrt(1 - |Du|^2)``.
    """
    g = np.sqrt(jet.grad_sq)
    if np.any(g == 0.0):
        raise NoLevelCurve("gradient vanishes; no level curve")
    tx, ty = -jet.uy / g, jet.ux / g
    return _hess_form(jet, tx, ty) / g


def level_curve_factor(s):
    """``f(s) = (A+1)/(A^2+A+1) * s/sqrt(1+s^2)`` with ``A = A(s)``.

    On solutions ``2 H_L = f(|Du|) k``; ``f`` increases from 0 to ``1/sqrt(2)``.
    """
    s = np.asarray(s, dtype=float)
    if np.any(s >= 1.0) or np.any(s < 0.0):
        raise NotSpacelike("level_curve_factor needs 0 <= s < 1")
    a = a_factor(s * s)
    out = (a + 1.0) / (a * a + a + 1.0) * s / np.sqrt(1.0 + s * s)
    return out if out.ndim else float(out)


def operator_coefficients(du, normalized=True):
    """Coefficients ``(a11, a12, a22)`` of ``Q(u) = a11 u_xx + 2 a12 u_xy + a22 u_yy``.

    Expanding both divergences gives ``a = (c_L - c_R) I + (d_L + d_R) Du Du^T`` with
    ``c = (1 -+ |Du|^2)^(-1/2)`` and ``d = (1 -+ |Du|^2)^(-3/2)``.  Its determinant is
    ``(c_L - c_R)(d_L - d_R)``.  With ``normalized=True`` the matrix is rescaled by
    the positive factor ``sqrt((c_L - c_R)/(d_L - d_R))`` so that the determinant is
    exactly `ellipticity_gap`.  Both vanish at ``Du = 0``.
    """
    du = np.asarray(du, dtype=float)
    p, q = du[..., 0], du[..., 1]
    w2 = p * p + q * q
    cl, cr = (1.0 - w2) ** -0.5, (1.0 + w2) ** -0.5
    dl, dr = (1.0 - w2) ** -1.5, (1.0 + w2) ** -1.5
    a11 = (cl - cr) + (dl + dr) * p * p
    a12 = (dl + dr) * p * q
    a22 = (cl - cr) + (dl + dr) * q * q
    if normalized:
        with np.errstate(invalid="ignore", divide="ignore"):
            lam = np.where(w2 > 0, np.sqrt((cl - cr) / (dl - dr)), 0.0)
        a11, a12, a22 = lam * a11, lam * a12, lam * a22
    return a11, a12, a22


# --------------------------------------------------------------------------
# field-wide evaluation

CSV_COLUMNS = ("x1", "x2", "H_R", "H_L", "K_R", "K_L", "cos_theta", "cosh_psi", "gap")


def field_invariants(field: GridField, delta_space: float = DELTA_SPACE):
    """Invariants of central-difference jets at interior nodes as full-grid arrays.

    Masked and non-spacelike nodes hold NaN.
    """
    jets = fd_jets(field)
    ok = np.sqrt(jets.grad_sq) <= 1.0 - delta_space
    grids = {name: np.full(field.dims, np.nan) for name in CSV_COLUMNS[2:]}
    if ok.any():
        cs = invariants(jets[ok], delta_space)
        I, J = np.nonzero(field.mask.interior)
        I, J = I[ok], J[ok]
        for name, arr in zip(
            CSV_COLUMNS[2:],
            (cs.h_r, cs.h_l, cs.k_r, cs.k_l, cs.cos_theta, cs.cosh_psi, cs.ellipticity_gap),
        ):
            grids[name][I, J] = arr
    return grids


def write_invariants_csv(field: GridField, path, delta_space: float = DELTA_SPACE):
    grids = field_invariants(field, delta_space)
    X, Y = field.mask.coords()
    nx, ny = field.dims
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for i in range(nx):
            for j in range(ny):
                row = [X[i, j], Y[i, j]] + [grids[c][i, j] for c in CSV_COLUMNS[2:]]
                w.writerow([f"{val:.17g}" for val in row])
    return grids
