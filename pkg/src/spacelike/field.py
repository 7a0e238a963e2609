"""Graph functions over planar domains: masks, grid samples and second-order jets.

A surface is always the graph ``x3 = u(x1, x2)``.  Analytic surfaces carry exact
derivatives; grid samples produce jets through central differences.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import ndimage

from .errors import DomainError, NotSpacelike, StencilError

DELTA_SPACE = 1e-6


class NodeClass(enum.IntEnum):
    OUTSIDE = 0
    INTERIOR = 1
    BOUNDARY = 2


# --------------------------------------------------------------------------
# jets


@dataclass(frozen=True, eq=False)
class ScalarJet:
    """Second-order jet ``(u, Du, D^2u)`` at one point or at an array of points.

    ``d2u`` is stored as the triple ``(u_xx, u_xy, u_yy)`` along the last axis.
    All fields broadcast, so one jet object may describe a whole grid.
    """

    point: np.ndarray
    u: np.ndarray
    du: np.ndarray
    d2u: np.ndarray

    def __post_init__(self):
        d2u = np.asarray(self.d2u, dtype=float)
        if d2u.shape[-2:] == (2, 2):
            d2u = np.stack(
                [d2u[..., 0, 0], 0.5 * (d2u[..., 0, 1] + d2u[..., 1, 0]), d2u[..., 1, 1]],
                axis=-1,
            )
        if d2u.shape[-1] != 3:
            raise ValueError("d2u must be (..., 3) or (..., 2, 2)")
        du = np.asarray(self.du, dtype=float)
        if du.shape[-1] != 2:
            raise ValueError("du must have a trailing axis of length 2")
        object.__setattr__(self, "point", np.asarray(self.point, dtype=float))
        object.__setattr__(self, "u", np.asarray(self.u, dtype=float))
        object.__setattr__(self, "du", du)
        object.__setattr__(self, "d2u", d2u)

    @property
    def ux(self):
        return self.du[..., 0]

    @property
    def uy(self):
        return self.du[..., 1]

    @property
    def uxx(self):
        return self.d2u[..., 0]

    @property
    def uxy(self):
        return self.d2u[..., 1]

    @property
    def uyy(self):
        return self.d2u[..., 2]

    @property
    def grad_sq(self):
        return self.ux**2 + self.uy**2

    @property
    def hessian(self):
        return np.stack(
            [np.stack([self.uxx, self.uxy], -1), np.stack([self.uxy, self.uyy], -1)], -2
        )

    @property
    def spacelike(self):
        return self.grad_sq < 1.0

    def __getitem__(self, idx):
        return ScalarJet(
            self.point[idx], self.u[idx], self.du[idx], self.d2u[idx]
        )


def require_spacelike(jet: ScalarJet, delta_space: float = DELTA_SPACE):
    """Raise `NotSpacelike` unless every ``|du| <= 1 - delta_space``."""
    g = np.sqrt(jet.grad_sq)
    bad = ~(g <= 1.0 - delta_space)
    if np.any(bad):
        where = np.asarray(jet.point)[bad] if np.ndim(g) else jet.point
        raise NotSpacelike(
            f"jet gradient norm {np.max(np.where(bad, g, -np.inf)):.17g} is not "
            f"below 1 - {delta_space:g}",
            where=where,
        )


# --------------------------------------------------------------------------
# domains


@dataclass(frozen=True)
class Shape:
    """A planar region given by a signed-distance-like predicate (negative inside)."""

    name: str
    sdf: Callable[[np.ndarray, np.ndarray], np.ndarray]
    bbox: tuple[float, float, float, float]

    def contains(self, x, y):
        return self.sdf(x, y) < 0.0


def disc(radius=1.0, center=(0.0, 0.0)) -> Shape:
    cx, cy = center
    return Shape(
        "disc",
        lambda x, y: np.hypot(x - cx, y - cy) - radius,
        (cx - radius, cx + radius, cy - radius, cy + radius),
    )


def annulus(r_inner=1.2, r_outer=3.0, center=(0.0, 0.0)) -> Shape:
    if not 0 <= r_inner < r_outer:
        raise ValueError("need 0 <= r_inner < r_outer")
    cx, cy = center

    def sdf(x, y):
        r = np.hypot(x - cx, y - cy)
        return np.maximum(r_inner - r, r - r_outer)

    return Shape("annulus", sdf, (cx - r_outer, cx + r_outer, cy - r_outer, cy + r_outer))


def rectangle(x0=0.0, x1=1.0, y0=0.0, y1=1.0) -> Shape:
    def sdf(x, y):
        return np.maximum.reduce([x0 - x, x - x1, y0 - y, y - y1])

    return Shape("rectangle", sdf, (x0, x1, y0, y1))


def square(side=1.0) -> Shape:
    """The square ``[0, side]^2``."""
    return rectangle(0.0, side, 0.0, side)


def sector(r_inner=1.2, r_outer=3.0, half_angle=0.75 * math.pi, direction=0.0) -> Shape:
    """Annular sector ``r_inner < r < r_outer``, ``|arg - direction| < half_angle``.

    The default opening keeps clear of the negative x-axis, where ``atan2`` jumps.
    """
    if not 0 < half_angle <= math.pi:
        raise ValueError("half_angle must lie in (0, pi]")
    ring = annulus(r_inner, r_outer)

    def sdf(x, y):
        phi = np.angle(np.exp(1j * (np.arctan2(y, x) - direction)))
        return np.maximum(ring.sdf(x, y), (np.abs(phi) - half_angle) * np.hypot(x, y))

    return Shape("sector", sdf, ring.bbox)


@dataclass(frozen=True, eq=False)
class DomainMask:
    """Node classification of a uniform grid plus Dirichlet data on BOUNDARY nodes.

    Node ``(i, j)`` sits at ``origin + h * (i, j)``.  Construction enforces that every
    INTERIOR node has all eight neighbours inside the domain (so both the jet and the
    flux stencils are well defined) and that INTERIOR is 4-connected.
    """

    origin: tuple[float, float]
    h: float
    classes: np.ndarray
    boundary_values: np.ndarray | None = None

    def __post_init__(self):
        if not self.h > 0:
            raise ValueError("spacing h must be positive")
        classes = np.array(self.classes, dtype=np.int8)
        if classes.ndim != 2:
            raise ValueError("classes must be a 2-D array")
        classes.setflags(write=False)
        object.__setattr__(self, "classes", classes)
        object.__setattr__(self, "origin", (float(self.origin[0]), float(self.origin[1])))

        interior = classes == NodeClass.INTERIOR
        if not interior.any():
            raise DomainError("mask has no interior nodes")
        if interior[0, :].any() or interior[-1, :].any() or interior[:, 0].any() or interior[:, -1].any():
            raise DomainError("interior node on the grid edge; pad the grid")
        ring = ndimage.binary_dilation(interior, structure=np.ones((3, 3), bool))
        if np.any(ring & (classes == NodeClass.OUTSIDE)):
            raise DomainError("an interior node has an OUTSIDE neighbour")
        _, ncomp = ndimage.label(interior)
        if ncomp != 1:
            raise DomainError(f"interior splits into {ncomp} components")

        if self.boundary_values is not None:
            bv = np.array(self.boundary_values, dtype=float)
            if bv.shape != classes.shape:
                raise ValueError("boundary_values must match the grid dims")
            bv = np.where(classes == NodeClass.BOUNDARY, bv, np.nan)
            if not np.all(np.isfinite(bv[classes == NodeClass.BOUNDARY])):
                raise ValueError("boundary_values must be finite on BOUNDARY nodes")
            bv.setflags(write=False)
            object.__setattr__(self, "boundary_values", bv)

    @classmethod
    def from_shape(cls, shape: Shape, h: float, pad: int = 2) -> "DomainMask":
        """Classify nodes of an ``h``-grid aligned to integer multiples of ``h``.

        Alignment makes the ``h`` grid a subset of the ``h/2`` grid.
        """
        xmin, xmax, ymin, ymax = shape.bbox
        i0 = math.floor(xmin / h + 1e-9) - pad
        i1 = math.ceil(xmax / h - 1e-9) + pad
        j0 = math.floor(ymin / h + 1e-9) - pad
        j1 = math.ceil(ymax / h - 1e-9) + pad
        x = np.arange(i0, i1 + 1) * h
        y = np.arange(j0, j1 + 1) * h
        X, Y = np.meshgrid(x, y, indexing="ij")
        interior = shape.contains(X, Y)
        labels, ncomp = ndimage.label(interior)
        if ncomp > 1:
            raise DomainError(
                f"shape {shape.name!r} at h={h:g} resolves into {ncomp} pieces"
            )
        boundary = ndimage.binary_dilation(interior, structure=np.ones((3, 3), bool)) & ~interior
        classes = np.full(X.shape, NodeClass.OUTSIDE, dtype=np.int8)
        classes[interior] = NodeClass.INTERIOR
        classes[boundary] = NodeClass.BOUNDARY
        return cls((i0 * h, j0 * h), h, classes)

    @property
    def dims(self):
        return self.classes.shape

    @property
    def interior(self):
        return self.classes == NodeClass.INTERIOR

    @property
    def boundary(self):
        return self.classes == NodeClass.BOUNDARY

    @property
    def active(self):
        return self.classes != NodeClass.OUTSIDE

    def coords(self):
        nx, ny = self.dims
        i0 = round(self.origin[0] / self.h)
        j0 = round(self.origin[1] / self.h)
        if np.isclose(i0 * self.h, self.origin[0]) and np.isclose(j0 * self.h, self.origin[1]):
            x = (i0 + np.arange(nx)) * self.h
            y = (j0 + np.arange(ny)) * self.h
        else:
            x = self.origin[0] + np.arange(nx) * self.h
            y = self.origin[1] + np.arange(ny) * self.h
        return np.meshgrid(x, y, indexing="ij")

    def node_point(self, node):
        X, Y = self.coords()
        return float(X[node]), float(Y[node])

    def nearest_node(self, point):
        i = round((point[0] - self.origin[0]) / self.h)
        j = round((point[1] - self.origin[1]) / self.h)
        return int(i), int(j)

    def with_boundary_values(self, g) -> "DomainMask":
        """Attach Dirichlet data, either an array over the grid or a callable ``g(x, y)``."""
        if callable(g):
            X, Y = self.coords()
            vals = np.full(self.dims, np.nan)
            b = self.boundary
            vals[b] = g(X[b], Y[b])
        else:
            vals = g
        return DomainMask(self.origin, self.h, self.classes, vals)


# --------------------------------------------------------------------------
# surfaces and grid fields


@dataclass(frozen=True)
class AnalyticSurface:
    """A graph with exact derivatives: ``eval(x, y) -> ScalarJet``."""

    name: str
    eval: Callable[[np.ndarray, np.ndarray], ScalarJet]
    domain: Callable[[np.ndarray, np.ndarray], np.ndarray]

    def jet(self, x, y) -> ScalarJet:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if not np.all(self.domain(x, y)):
            raise DomainError(f"point outside the domain of {self.name}")
        return self.eval(x, y)


@dataclass(frozen=True, eq=False)
class GridField:
    """Samples of ``u`` on the nodes of a `DomainMask`; OUTSIDE values are NaN."""

    mask: DomainMask
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.shape != self.mask.dims:
            raise ValueError("values must match mask dims")
        vals[~self.mask.active] = np.nan
        if not np.all(np.isfinite(vals[self.mask.active])):
            raise ValueError("field values must be finite on interior and boundary nodes")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def origin(self):
        return self.mask.origin

    @property
    def h(self):
        return self.mask.h

    @property
    def dims(self):
        return self.mask.dims

    def with_values(self, values) -> "GridField":
        return GridField(self.mask, values)

    def gradient_norms(self):
        """Central-difference ``|Du_h|`` at interior nodes (NaN elsewhere)."""
        jets = fd_jets(self)
        out = np.full(self.dims, np.nan)
        out[self.mask.interior] = np.sqrt(jets.grad_sq)
        return out

    def check_admissible(self, delta_space: float = DELTA_SPACE):
        g = self.gradient_norms()[self.mask.interior]
        if np.any(g > 1.0 - delta_space):
            idx = np.argwhere(self.mask.interior)[np.argmax(g)]
            raise NotSpacelike(
                f"discrete gradient {g.max():.6g} exceeds 1 - {delta_space:g} "
                f"at node {tuple(idx)}",
                where=self.mask.node_point(tuple(idx)),
            )
        return self

    # --- CSV ---------------------------------------------------------------

    def to_csv(self, path):
        X, Y = self.mask.coords()
        names = {c.value: c.name for c in NodeClass}
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x1", "x2", "u", "class"])
            nx, ny = self.dims
            for i in range(nx):
                for j in range(ny):
                    w.writerow(
                        [
                            f"{X[i, j]:.17g}",
                            f"{Y[i, j]:.17g}",
                            f"{self.values[i, j]:.17g}",
                            names[int(self.mask.classes[i, j])],
                        ]
                    )

    @classmethod
    def from_csv(cls, path) -> "GridField":
        """Read a field written by `to_csv`; BOUNDARY values become Dirichlet data."""
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        if not rows:
            raise ValueError(f"{path}: empty field file")
        x = np.array([float(r["x1"]) for r in rows])
        y = np.array([float(r["x2"]) for r in rows])
        u = np.array([float(r["u"]) for r in rows])
        cls_ = np.array([NodeClass[r["class"]].value for r in rows], dtype=np.int8)
        xs = np.unique(x)
        ys = np.unique(y)
        nx, ny = len(xs), len(ys)
        if nx * ny != len(rows):
            raise ValueError(f"{path}: nodes do not form a full grid")
        h = (xs[-1] - xs[0]) / (nx - 1)
        classes = cls_.reshape(nx, ny)
        values = u.reshape(nx, ny)
        mask = DomainMask((xs[0], ys[0]), h, classes, np.where(classes == NodeClass.BOUNDARY, values, np.nan))
        return cls(mask, values)


def sample(surface: AnalyticSurface, mask: DomainMask) -> GridField:
    """Evaluate ``surface`` on all non-OUTSIDE nodes; BOUNDARY values become the data."""
    X, Y = mask.coords()
    act = mask.active
    if not np.all(surface.domain(X[act], Y[act])):
        bad = tuple(int(i) for i in np.argwhere(act & ~np.where(act, surface.domain(X, Y), True))[0])
        raise DomainError(
            f"{surface.name} is undefined at node {bad} = ({X[bad]:.6g}, {Y[bad]:.6g})"
        )
    vals = np.full(mask.dims, np.nan)
    vals[act] = surface.eval(X[act], Y[act]).u
    return GridField(mask.with_boundary_values(vals), vals)


def _central_jets(field: GridField, I, J) -> ScalarJet:
    v = field.values
    h = field.h
    c = v[I, J]
    e, w = v[I + 1, J], v[I - 1, J]
    n, s = v[I, J + 1], v[I, J - 1]
    ne, nw = v[I + 1, J + 1], v[I - 1, J + 1]
    se, sw = v[I + 1, J - 1], v[I - 1, J - 1]
    du = np.stack([(e - w) / (2 * h), (n - s) / (2 * h)], axis=-1)
    d2u = np.stack(
        [
            (e - 2 * c + w) / h**2,
            (ne - nw - se + sw) / (4 * h**2),
            (n - 2 * c + s) / h**2,
        ],
        axis=-1,
    )
    X, Y = field.mask.coords()
    point = np.stack([X[I, J], Y[I, J]], axis=-1)
    return ScalarJet(point, c, du, d2u)


def fd_jets(field: GridField) -> ScalarJet:
    """Central-difference jets at every interior node, flattened in row-major order."""
    I, J = np.nonzero(field.mask.interior)
    return _central_jets(field, I, J)


def fd_jet(field: GridField, node) -> ScalarJet:
    """Central-difference jet at a single interior node ``(i, j)``.

    Second order for smooth ``u`` and exact for polynomials of degree two.
    """
    i, j = node
    nx, ny = field.dims
    if not (0 <= i < nx and 0 <= j < ny) or not field.mask.interior[i, j]:
        raise StencilError(f"node {node} is not an interior node")
    return _central_jets(field, np.intp(i), np.intp(j))


def field_to_grid(field: GridField, flat: np.ndarray) -> np.ndarray:
    """Scatter a per-interior-node array back onto the grid (NaN elsewhere)."""
    out = np.full(field.dims, np.nan)
    out[field.mask.interior] = flat
    return out
