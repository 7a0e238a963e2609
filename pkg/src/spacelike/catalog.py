"""Closed-form reference surfaces used as oracles.

==============  ======================  =================  ==========
name            u                       domain             Q(u) = 0?
==============  ======================  =================  ==========
plane(a,b,c)    a x + b y + c           a^2 + b^2 < 1      yes
helicoid        atan2(y, x)             slit r > 1         yes
hyperboloid     sqrt(1 + r^2)           all of R^2         no
sphere_cap(R)   sqrt(R^2 - r^2)         r < R / sqrt(2)    no
==============  ======================  =================  ==========

Planes and the helicoid are the only surfaces that are minimal and maximal at once;
the other two are negative controls.

The helicoid graph is single valued only off a slit; its domain here is
``r > 1`` with ``|arg| < 0.95 pi``, so a full annulus is rejected and the
annular sector is the natural test domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError
from .field import AnalyticSurface, ScalarJet


@dataclass(frozen=True)
class CatalogEntry:
    surface: AnalyticSurface
    known: dict[str, Callable]
    is_solution: bool

    @property
    def name(self):
        return self.surface.name


def _point(x, y):
    return np.stack(np.broadcast_arrays(x, y), axis=-1)


def _zero(x, y):
    return np.zeros(np.broadcast(x, y).shape)


def plane(a=0.3, b=0.4, c=0.0) -> CatalogEntry:
    if not a * a + b * b < 1.0:
        raise DomainError("plane slope must satisfy a^2 + b^2 < 1")

    def ev(x, y):
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        du = np.stack([np.full(x.shape, a), np.full(x.shape, b)], -1)
        return ScalarJet(_point(x, y), a * x + b * y + c, du, np.zeros(x.shape + (3,)))

    surf = AnalyticSurface(
        f"plane({a:g},{b:g},{c:g})", ev, lambda x, y: np.ones(np.broadcast(x, y).shape, bool)
    )
    known = {k: _zero for k in ("H_R", "H_L", "K_R", "K_L", "Q")}
    return CatalogEntry(surf, known, True)


def helicoid() -> CatalogEntry:
    def ev(x, y):
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        r2 = x * x + y * y
        r4 = r2 * r2
        du = np.stack([-y / r2, x / r2], -1)
        d2u = np.stack([2 * x * y / r4, (y * y - x * x) / r4, -2 * x * y / r4], -1)
        return ScalarJet(_point(x, y), np.arctan2(y, x), du, d2u)

    def k_r(x, y):
        r2 = x * x + y * y
        return -(1 / r2**2) / (1 + 1 / r2) ** 2

    def k_l(x, y):
        r2 = x * x + y * y
        return (1 / r2**2) / (1 - 1 / r2) ** 2

    surf = AnalyticSurface(
        "helicoid",
        ev,
        lambda x, y: (np.hypot(x, y) > 1.0) & (np.abs(np.arctan2(y, x)) < 0.95 * math.pi),
    )
    known = {"H_R": _zero, "H_L": _zero, "K_R": k_r, "K_L": k_l, "Q": _zero}
    return CatalogEntry(surf, known, True)


def hyperboloid() -> CatalogEntry:
    def ev(x, y):
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        u = np.sqrt(1 + x * x + y * y)
        u3 = u**3
        du = np.stack([x / u, y / u], -1)
        d2u = np.stack([1 / u - x * x / u3, -x * y / u3, 1 / u - y * y / u3], -1)
        return ScalarJet(_point(x, y), u, du, d2u)

    def h_r(x, y):
        r2 = x * x + y * y
        return (1 + r2) / (1 + 2 * r2) ** 1.5

    def q(x, y):
        r2 = x * x + y * y
        return 2 - (2 + 2 * r2) * (1 + 2 * r2) ** -1.5

    known = {
        "H_L": lambda x, y: np.ones(np.broadcast(x, y).shape),
        "H_R": h_r,
        "K_R": lambda x, y: 1 / (1 + 2 * (x * x + y * y)) ** 2,
        "K_L": lambda x, y: -np.ones(np.broadcast(x, y).shape),
        "Q": q,
    }
    surf = AnalyticSurface(
        "hyperboloid", ev, lambda x, y: np.ones(np.broadcast(x, y).shape, bool)
    )
    return CatalogEntry(surf, known, False)


def sphere_cap(radius=2.0) -> CatalogEntry:
    R = float(radius)
    if not R > 0:
        raise DomainError("sphere_cap radius must be positive")

    def ev(x, y):
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        u = np.sqrt(R * R - x * x - y * y)
        u3 = u**3
        du = np.stack([-x / u, -y / u], -1)
        d2u = np.stack([-1 / u - x * x / u3, -x * y / u3, -1 / u - y * y / u3], -1)
        return ScalarJet(_point(x, y), u, du, d2u)

    def h_l(x, y):
        r2 = x * x + y * y
        return -(R * R - r2) / (R * R - 2 * r2) ** 1.5

    known = {
        "H_R": lambda x, y: np.full(np.broadcast(x, y).shape, -1 / R),
        "H_L": h_l,
        "K_R": lambda x, y: np.full(np.broadcast(x, y).shape, 1 / R**2),
        "K_L": lambda x, y: -R * R / (R * R - 2 * (x * x + y * y)) ** 2,
        "Q": lambda x, y: 2 * h_l(x, y) + 2 / R,
    }
    surf = AnalyticSurface(
        f"sphere_cap({R:g})", ev, lambda x, y: np.hypot(x, y) < R / math.sqrt(2)
    )
    return CatalogEntry(surf, known, False)


_FACTORIES = {
    "plane": plane,
    "helicoid": helicoid,
    "hyperboloid": hyperboloid,
    "sphere_cap": sphere_cap,
}

NAMES = tuple(_FACTORIES)


def get(name: str, *params) -> CatalogEntry:
    """Look up a catalog surface.

    ``name`` may carry parameters inline, e.g. ``"plane:0.2,0.1,0.05"`` or
    ``"sphere_cap:2"``.
    """
    if ":" in name:
        name, _, tail = name.partition(":")
        params = tuple(float(p) for p in tail.split(",") if p.strip()) + tuple(params)
    try:
        factory = _FACTORIES[name]
    except KeyError:
        raise KeyError(f"unknown surface {name!r}; choose from {', '.join(NAMES)}") from None
    return factory(*params)
