"""The H_R = H_L surface equation on grids.

    Q(u) = div(Du / sqrt(1 - |Du|^2)) - div(Du / sqrt(1 + |Du|^2))

is discretized in conservative form: the flux ``F(g) = g (phi_L - phi_R)(|g|^2)``
is evaluated at the midpoint of every grid edge from a face-centred gradient
(two-point normal difference, four-point tangential average), and the residual at
a node is the net outflux divided by ``h``.  The Dirichlet problem is solved by
damped Newton with an exact sparse Jacobian.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, fields
from typing import Any

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .curvature import ellipticity_gap
from .errors import InadmissibleBoundary, LineSearchStalled, NotSpacelike
from .field import DELTA_SPACE, DomainMask, GridField, fd_jets

log = logging.getLogger(__name__)


def _phi(s):
    return (1.0 - s) ** -0.5 - (1.0 + s) ** -0.5


def _dphi(s):
    return 0.5 * (1.0 - s) ** -1.5 + 0.5 * (1.0 + s) ** -1.5


class FluxOperator:
    """Face bookkeeping for one mask; evaluates ``Q_h`` and its Jacobian."""

    def __init__(self, mask: DomainMask, delta_space: float = DELTA_SPACE):
        self.mask = mask
        self.h = mask.h
        self.delta_space = delta_space
        nx, ny = mask.dims
        interior = mask.interior
        self.index = np.full(mask.dims, -1, dtype=np.int64)
        self.index[interior] = np.arange(int(interior.sum()))
        self.n = int(interior.sum())

        # x-faces join (i, j) and (i+1, j); y-faces join (i, j) and (i, j+1)
        need_x = interior[:-1, 1:-1] | interior[1:, 1:-1]
        xi, xj = np.nonzero(need_x)
        self.xf = (xi, xj + 1)
        need_y = interior[1:-1, :-1] | interior[1:-1, 1:]
        yi, yj = np.nonzero(need_y)
        self.yf = (yi + 1, yj)

    # --- face gradients -------------------------------------------------------

    def _x_faces(self, v):
        i, j = self.xf
        h = self.h
        gn = (v[i + 1, j] - v[i, j]) / h
        gt = (v[i, j + 1] + v[i + 1, j + 1] - v[i, j - 1] - v[i + 1, j - 1]) / (4 * h)
        return gn, gt

    def _y_faces(self, v):
        i, j = self.yf
        h = self.h
        gn = (v[i, j + 1] - v[i, j]) / h
        gt = (v[i + 1, j] + v[i + 1, j + 1] - v[i - 1, j] - v[i - 1, j + 1]) / (4 * h)
        return gn, gt

    def face_gradient_max(self, v):
        gx = np.hypot(*self._x_faces(v))
        gy = np.hypot(*self._y_faces(v))
        return max(gx.max(initial=0.0), gy.max(initial=0.0))

    def check_faces(self, v):
        lim = 1.0 - self.delta_space
        X, Y = self.mask.coords()
        for (i, j), (gn, gt), (di, dj) in (
            (self.xf, self._x_faces(v), (1, 0)),
            (self.yf, self._y_faces(v), (0, 1)),
        ):
            g = np.hypot(gn, gt)
            bad = ~(g <= lim)
            if np.any(bad):
                k = int(np.argmax(np.where(bad, np.nan_to_num(g, nan=np.inf), -np.inf)))
                a, b = (i[k], j[k]), (i[k] + di, j[k] + dj)
                mid = (0.5 * (X[a] + X[b]), 0.5 * (Y[a] + Y[b]))
                raise NotSpacelike(
                    f"face gradient {g[k]:.6g} >= 1 - {self.delta_space:g} between "
                    f"nodes {a} and {b} (x = {mid[0]:.6g}, y = {mid[1]:.6g})",
                    where=mid,
                )

    # --- residual and Jacobian -----------------------------------------------

    def residual_grid(self, v, check=True):
        if check:
            self.check_faces(v)
        h = self.h
        out = np.zeros(self.mask.dims)
        for (i, j), (gn, gt), (di, dj) in (
            (self.xf, self._x_faces(v), (1, 0)),
            (self.yf, self._y_faces(v), (0, 1)),
        ):
            flux = gn * _phi(gn * gn + gt * gt) / h
            np.add.at(out, (i, j), flux)
            np.add.at(out, (i + di, j + dj), -flux)
        return out

    def residual(self, v, check=True):
        return self.residual_grid(v, check)[self.mask.interior]

    def jacobian(self, v, check=True):
        if check:
            self.check_faces(v)
        h = self.h
        idx = self.index
        rows, cols, vals = [], [], []
        for (i, j), (gn, gt), (di, dj) in (
            (self.xf, self._x_faces(v), (1, 0)),
            (self.yf, self._y_faces(v), (0, 1)),
        ):
            s = gn * gn + gt * gt
            d = _dphi(s)
            f_n = _phi(s) + 2.0 * gn * gn * d
            f_t = 2.0 * gn * gt * d
            # tangential offsets: (ti, tj) is the unit step along the face
            ti, tj = dj, di
            stencil = (
                ((i + di, j + dj), f_n / h),
                ((i, j), -f_n / h),
                ((i + ti, j + tj), f_t / (4 * h)),
                ((i + di + ti, j + dj + tj), f_t / (4 * h)),
                ((i - ti, j - tj), -f_t / (4 * h)),
                ((i + di - ti, j + dj - tj), -f_t / (4 * h)),
            )
            for (ri, rj), sign in (((i, j), 1.0 / h), ((i + di, j + dj), -1.0 / h)):
                r = idx[ri, rj]
                for (ci, cj), dF in stencil:
                    c = idx[ci, cj]
                    keep = (r >= 0) & (c >= 0)
                    rows.append(r[keep])
                    cols.append(c[keep])
                    vals.append(sign * dF[keep])
        rows = np.concatenate(rows)
        cols = np.concatenate(cols)
        vals = np.concatenate(vals)
        return sp.csr_matrix((vals, (rows, cols)), shape=(self.n, self.n))


# --------------------------------------------------------------------------
# public residual / Jacobian


@dataclass(frozen=True, eq=False)
class Residual:
    """``Q_h(u)`` at interior nodes (row-major order) and its norms."""

    values: np.ndarray
    norm_inf: float
    norm_2: float
    mask: DomainMask

    def grid(self):
        out = np.full(self.mask.dims, np.nan)
        out[self.mask.interior] = self.values
        return out


def residual(field: GridField, delta_space: float = DELTA_SPACE) -> Residual:
    r = FluxOperator(field.mask, delta_space).residual(field.values)
    return Residual(r, float(np.max(np.abs(r))), float(np.linalg.norm(r)), field.mask)


def jacobian(field: GridField, delta_space: float = DELTA_SPACE) -> sp.csr_matrix:
    """Exact derivative of `residual` with respect to the interior values."""
    return FluxOperator(field.mask, delta_space).jacobian(field.values)


# --------------------------------------------------------------------------
# Dirichlet solve


@dataclass
class SolverParams:
    tol_res: float | None = None  # None: 1e-10 * (1 + |r_0|_inf)
    max_iter: int = 50
    delta_space: float = DELTA_SPACE
    mu0: float = 1e-8
    gap_min: float = 1e-12
    min_step_exp: int = 20
    armijo: float = 1e-4

    @classmethod
    def from_config(cls, cfg: dict[str, Any]) -> "SolverParams":
        """Build from ``key=value`` strings; unknown keys are an error."""
        kinds = {f.name: f.type for f in fields(cls)}
        kw = {}
        for key, raw in cfg.items():
            key = key.strip().replace("-", "_")
            if key not in kinds:
                raise KeyError(f"unknown solver parameter {key!r}")
            if raw is None or (isinstance(raw, str) and raw.strip().lower() in ("", "none")):
                if key != "tol_res":
                    raise ValueError(f"solver parameter {key!r} needs a value")
                kw[key] = None
            elif key in ("max_iter", "min_step_exp"):
                kw[key] = int(raw)
            else:
                kw[key] = float(raw)
        return cls(**kw)


@dataclass
class SolveReport:
    converged: bool
    iterations: int
    residual_history: list[float]
    final_gradient_max: float
    min_gradient: float
    damping_events: int
    tol_res: float
    init: str
    verification: dict | None = None

    def to_dict(self):
        return asdict(self)

    def to_json(self, path=None):
        text = json.dumps(_jsonable(self.to_dict()), indent=2, sort_keys=True)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text + "\n")
        return text


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def affine_fit(mask: DomainMask):
    """Least-squares plane ``a x + b y + c`` through the boundary data."""
    if mask.boundary_values is None:
        raise InadmissibleBoundary("mask carries no boundary values")
    X, Y = mask.coords()
    b = mask.boundary
    A = np.column_stack([X[b], Y[b], np.ones(int(b.sum()))])
    coef, *_ = np.linalg.lstsq(A, mask.boundary_values[b], rcond=None)
    return tuple(float(c) for c in coef)


def harmonic_extension(mask: DomainMask):
    """Discrete harmonic interpolant of the boundary data (5-point Laplacian)."""
    op = FluxOperator(mask)
    idx = op.index
    I, J = np.nonzero(mask.interior)
    g = np.where(mask.boundary, mask.boundary_values, 0.0)
    rows, cols, vals = [np.arange(op.n)], [np.arange(op.n)], [np.full(op.n, -4.0)]
    rhs = np.zeros(op.n)
    for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        c = idx[I + di, J + dj]
        inner = c >= 0
        rows.append(np.flatnonzero(inner))
        cols.append(c[inner])
        vals.append(np.ones(int(inner.sum())))
        rhs -= np.where(inner, 0.0, g[I + di, J + dj])
    L = sp.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(op.n, op.n)
    )
    out = np.where(mask.active, g, np.nan)
    out[mask.interior] = spla.spsolve(L.tocsc(), rhs)
    return out


def _initial_values(mask, init, params):
    g = np.where(mask.boundary, mask.boundary_values, np.nan)
    if isinstance(init, GridField):
        if init.dims != mask.dims:
            raise ValueError("initial field does not match the mask")
        out = np.where(mask.boundary, g, init.values)
        return {"given": out}

    a, b, c = affine_fit(mask)
    if math.hypot(a, b) > 1.0 - params.delta_space:
        raise InadmissibleBoundary(
            f"affine fit of the boundary data has slope {math.hypot(a, b):.6g} >= 1; "
            "supply an initial field"
        )
    candidates = {}
    if init in ("auto", "affine"):
        X, Y = mask.coords()
        out = np.where(mask.boundary, g, a * X + b * Y + c)
        candidates["affine"] = np.where(mask.active, out, np.nan)
    if init in ("auto", "harmonic"):
        candidates["harmonic"] = harmonic_extension(mask)
    if not candidates:
        raise ValueError(f"unknown init {init!r}")
    return candidates


def solve_dirichlet(
    mask: DomainMask,
    init="auto",
    params: SolverParams | None = None,
    verify: bool = False,
):
    """Solve ``Q(u) = 0`` in the interior with ``u = g`` on BOUNDARY nodes.

    ``init`` is ``"affine"`` (least-squares plane through the data), ``"harmonic"``,
    ``"auto"`` (affine, falling back to harmonic when the affine guess is not
    spacelike at the boundary) or a `GridField`.

    Returns ``(field, report)``.  Hitting ``max_iter`` is reported with
    ``converged=False``; an exhausted line search raises `LineSearchStalled`.
    """
    params = params or SolverParams()
    if mask.boundary_values is None:
        raise InadmissibleBoundary("mask carries no boundary values")
    op = FluxOperator(mask, params.delta_space)
    interior = mask.interior

    v = None
    first_error = None
    for name, cand in _initial_values(mask, init, params).items():
        try:
            op.check_faces(cand)
        except NotSpacelike as exc:
            first_error = first_error or exc
            continue
        v, init_name = cand.copy(), name
        break
    if v is None:
        raise first_error

    r = op.residual(v, check=False)
    norm = float(np.max(np.abs(r))) if r.size else 0.0
    tol = params.tol_res if params.tol_res is not None else 1e-10 * (1.0 + norm)
    history = [norm]
    damping = 0
    it = 0
    while norm > tol and it < params.max_iter:
        J = op.jacobian(v, check=False)
        jets = fd_jets(GridField(mask, v))
        if np.min(ellipticity_gap(jets.grad_sq)) < params.gap_min:
            # shift along the sign of the (negative) diagonal
            J = J - params.mu0 * norm * sp.identity(op.n, format="csr")
        delta = spla.spsolve(J.tocsc(), -r)
        if not np.all(np.isfinite(delta)):
            raise LineSearchStalled(
                f"singular Newton system at iteration {it}",
                field=GridField(mask, v),
                report=None,
            )
        step = np.zeros(mask.dims)
        step[interior] = delta
        accepted = False
        for k in range(params.min_step_exp + 1):
            lam = 2.0**-k
            trial = v + lam * step
            if op.face_gradient_max(trial) > 1.0 - params.delta_space:
                continue
            rt = op.residual(trial, check=False)
            nt = float(np.max(np.abs(rt)))
            if nt <= (1.0 - params.armijo * lam) * norm:
                accepted = True
                break
        it += 1
        if not accepted:
            report = _report(op, v, False, it, history, damping, tol, init_name)
            raise LineSearchStalled(
                f"line search exhausted at iteration {it} (|r|_inf = {norm:.3e})",
                field=GridField(mask, v),
                report=report,
            )
        damping += k > 0
        v, r, norm = trial, rt, nt
        history.append(norm)
        log.debug("newton %d: lambda=%g |r|_inf=%.3e", it, lam, norm)

    converged = norm <= tol
    field = GridField(mask, v)
    report = _report(op, v, converged, it, history, damping, tol, init_name)
    if verify and converged:
        from .analysis import verify_field

        report.verification = verify_field(field, solution_tol=max(10 * tol, 1e-8))
    return field, report


def _report(op, v, converged, it, history, damping, tol, init_name):
    g = np.sqrt(fd_jets(GridField(op.mask, v)).grad_sq)
    return SolveReport(
        converged=bool(converged),
        iterations=it,
        residual_history=[float(x) for x in history],
        final_gradient_max=float(op.face_gradient_max(v)),
        min_gradient=float(g.min()),
        damping_events=int(damping),
        tol_res=float(tol),
        init=init_name,
    )
