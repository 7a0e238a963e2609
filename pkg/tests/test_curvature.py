import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spacelike import catalog
from spacelike import curvature as cv
from spacelike.errors import DegenerateDirection, NoLevelCurve, NotSpacelike, TangencyError
from spacelike.field import ScalarJet

from conftest import helicoid_sector, random_spacelike_jets


def jet(du, d2u):
    return ScalarJet(np.zeros(2), 0.0, du, d2u)


grads = st.tuples(st.floats(-0.7, 0.7), st.floats(-0.7, 0.7)).filter(lambda g: math.hypot(*g) > 1e-3)
hessians = st.tuples(*[st.floats(-5, 5)] * 3)


def rel(a, b):
    return np.abs(a - b) / (np.abs(a) + np.abs(b) + 1e-300)


# --- examples ---------------------------------------------------------------


def test_plane_jet():
    inv = cv.invariants(jet([0.3, 0.4], [0, 0, 0]))
    assert inv.h_r == inv.h_l == inv.k_r == inv.k_l == 0.0
    assert inv.cosh_psi == pytest.approx(2 / math.sqrt(3), abs=1e-7)
    assert inv.cos_theta == pytest.approx(1 / math.sqrt(1.25), abs=1e-7)


def test_helicoid_jet_at_2_0():
    inv = cv.invariants(jet([0, 0.5], [0, -0.25, 0]))
    assert abs(inv.h_r) < 1e-15 and abs(inv.h_l) < 1e-15
    assert inv.k_r == pytest.approx(-0.04, rel=1e-14)
    assert inv.k_l == pytest.approx((1 / 16) / 0.75**2, rel=1e-14)


def test_hyperboloid_jet_at_1_0():
    j = catalog.hyperboloid().surface.jet(np.array(1.0), np.array(0.0))
    inv = cv.invariants(j)
    assert inv.h_l == pytest.approx(1.0, abs=1e-12)
    assert inv.h_r == pytest.approx(2 / 3**1.5, abs=1e-12)
    # (sqrt2 - sqrt(2/3))^2, not the (sqrt2 - 1/sqrt2)^2 one might guess
    assert inv.ellipticity_gap == pytest.approx((math.sqrt(2) - math.sqrt(2 / 3)) ** 2, rel=1e-13)
    assert inv.ellipticity_gap == pytest.approx(0.3572655899, abs=1e-9)


def test_hyperboloid_circle_direction():
    j = catalog.hyperboloid().surface.jet(np.array(1.0), np.array(0.0))
    v = np.array([0.0, 1.0, 0.0])
    assert cv.normal_curvature(j, v, "L") == pytest.approx(-1.0, abs=1e-12)
    assert cv.normal_curvature(j, v, "R") == pytest.approx(1 / math.sqrt(3), abs=1e-12)
    assert cv.level_curve_curvature(j) == pytest.approx(1.0, abs=1e-12)


def test_plane_normal_curvatures_vanish():
    j = jet([0.3, 0.4], [0, 0, 0])
    for a in ([1, 0], [0.3, -2.0]):
        v = cv.lift(j, a)
        assert cv.normal_curvature(j, v, "R") == 0.0
        assert cv.normal_curvature(j, v, "L") == 0.0
    assert cv.level_curve_curvature(j) == 0.0


def test_helicoid_x_direction_opposite_signs():
    j = jet([0, 0.5], [0, -0.25, 0])
    j2 = jet([0, 0.5], [0.1, -0.25, 0.0])  # perturbed so the curvatures are nonzero
    for jj in (j, j2):
        v = np.array([1.0, 0.0, 0.0])
        kr, kl = cv.normal_curvature(jj, v, "R"), cv.normal_curvature(jj, v, "L")
        inv = cv.invariants(jj)
        lhs = cv.inner(v, v, "R") / inv.cos_theta * kr + cv.inner(v, v, "L") / inv.cosh_psi * kl
        assert abs(lhs) <= 1e-12 * (abs(kr) + abs(kl) + 1e-300) or lhs == 0
        assert kr * kl <= 0


def test_helicoid_level_curves_are_straight():
    # level sets of atan2 are rays, so the curvature is zero, consistent with the
    # alpha' normal curvature contract
    j = catalog.helicoid().surface.jet(np.array(2.0), np.array(0.0))
    k = cv.level_curve_curvature(j)
    assert abs(k) < 1e-12
    kl = cv.normal_curvature(j, cv.level_curve_direction(j), "L")
    g = math.sqrt(float(j.grad_sq))
    assert kl == pytest.approx(-k * g / math.sqrt(1 - g * g), abs=1e-12)


def test_level_curve_factor_values():
    assert cv.level_curve_factor(0.0) == 0.0
    a = math.sqrt(0.6)
    assert cv.a_factor(0.25) == pytest.approx(a, rel=1e-15)
    expected = (a + 1) / (a * a + a + 1) * 0.5 / math.sqrt(1.25)
    assert cv.level_curve_factor(0.5) == pytest.approx(expected, rel=1e-15)
    assert cv.level_curve_factor(1 - 1e-12) == pytest.approx(1 / math.sqrt(2), abs=1e-5)
    s = np.linspace(0, 0.999, 200)
    assert np.all(np.diff(cv.level_curve_factor(s)) > 0)
    with pytest.raises(NotSpacelike):
        cv.level_curve_factor(1.0)


def test_errors():
    j = jet([0.1, 0.2], [1, 0, 1])
    with pytest.raises(TangencyError):
        cv.normal_curvature(j, [1.0, 0.0, 0.0], "R")
    with pytest.raises(DegenerateDirection):
        cv.normal_curvature(j, [0.0, 0.0, 0.0], "L")
    with pytest.raises(NoLevelCurve):
        cv.level_curve_curvature(jet([0, 0], [1, 0, 1]))
    with pytest.raises(NotSpacelike):
        cv.invariants(jet([0.8, 0.6], [0, 0, 0]))
    with pytest.raises(ValueError):
        cv.normal_curvature(j, cv.lift(j, [1, 0]), "X")


def test_operator_coefficients():
    du = np.array([0.3, -0.5])
    a11, a12, a22 = cv.operator_coefficients(du)
    w2 = du @ du
    assert a11 * a22 - a12**2 == pytest.approx(cv.ellipticity_gap(w2), rel=1e-12)
    b11, b12, b22 = cv.operator_coefficients(du, normalized=False)
    cl, cr = (1 - w2) ** -0.5, (1 + w2) ** -0.5
    dl, dr = (1 - w2) ** -1.5, (1 + w2) ** -1.5
    assert b11 * b22 - b12**2 == pytest.approx((cl - cr) * (dl - dr), rel=1e-12)
    z = cv.operator_coefficients(np.zeros(2))
    assert z == (0.0, 0.0, 0.0)
    assert cv.ellipticity_gap(0.0) == 0.0


def test_normals():
    jets = random_spacelike_jets(np.random.default_rng(1), 500)
    inv = cv.invariants(jets)
    assert np.all(inv.n_l[:, 2] > 0) and np.all(inv.n_r[:, 2] > 0)
    assert np.allclose(cv.inner(inv.n_l, inv.n_l, "L"), -1.0)
    assert np.allclose(cv.inner(inv.n_r, inv.n_r, "R"), 1.0)
    t = cv.lift(jets, np.random.default_rng(2).normal(size=(500, 2)))
    assert np.allclose(cv.inner(t, inv.n_l, "L"), 0, atol=1e-12)
    assert np.allclose(cv.inner(t, inv.n_r, "R"), 0, atol=1e-12)


def test_field_invariants_csv(tmp_path):
    f = helicoid_sector(0.1)
    grids = cv.write_invariants_csv(f, tmp_path / "c.csv")
    lines = (tmp_path / "c.csv").read_text().splitlines()
    assert lines[0] == ",".join(cv.CSV_COLUMNS)
    assert len(lines) == 1 + f.dims[0] * f.dims[1]
    assert np.all(np.isnan(grids["H_L"][~f.mask.interior]))
    assert np.all(np.isfinite(grids["H_L"][f.mask.interior]))


# --- properties -------------------------------------------------------------


@settings(max_examples=200, deadline=None)
@given(grads, hessians, st.tuples(st.floats(-3, 3), st.floats(-3, 3)).filter(lambda a: math.hypot(*a) > 1e-3))
def test_weighted_normal_curvatures_cancel(g, hs, a):
    j = jet(g, hs)
    inv = cv.invariants(j)
    v = cv.lift(j, a)
    tr = cv.inner(v, v, "R") / inv.cos_theta * cv.normal_curvature(j, v, "R")
    tl = cv.inner(v, v, "L") / inv.cosh_psi * cv.normal_curvature(j, v, "L")
    assert abs(tr + tl) <= 1e-10 * (abs(tr) + abs(tl)) + 1e-300
    assert tr * tl <= 0


@settings(max_examples=200, deadline=None)
@given(grads, hessians)
def test_a_relations(g, hs):
    j = jet(g, hs)
    A = cv.a_factor(j.grad_sq)
    al, be = cv.level_curve_direction(j), cv.gradient_direction(j)
    kra, kla = cv.normal_curvature(j, al, "R"), cv.normal_curvature(j, al, "L")
    krb, klb = cv.normal_curvature(j, be, "R"), cv.normal_curvature(j, be, "L")
    assert abs(kra + A * kla) <= 1e-10 * (abs(kra) + abs(A * kla)) + 1e-300
    assert abs(krb + A**3 * klb) <= 1e-10 * (abs(krb) + abs(A**3 * klb)) + 1e-300


@settings(max_examples=200, deadline=None)
@given(grads, hessians)
def test_gauss_sign_coupling(g, hs):
    inv = cv.invariants(jet(g, hs))
    assert inv.k_r * inv.k_l <= 0
    assert (inv.k_r == 0) == (inv.k_l == 0)


@settings(max_examples=200, deadline=None)
@given(grads, hessians, st.floats(0, 2 * math.pi))
def test_mean_curvature_from_orthonormal_pairs(g, hs, angle):
    j = jet(g, hs)
    inv = cv.invariants(j)
    v1, v2 = cv.orthonormal_pair(j, angle, "R")
    assert abs(cv.inner(v1, v2, "R")) < 1e-12
    hr = 0.5 * (cv.normal_curvature(j, v1, "R") + cv.normal_curvature(j, v2, "R"))
    w1, w2 = cv.orthonormal_pair(j, angle, "L")
    assert abs(cv.inner(w1, w2, "L")) < 1e-12
    hl = -0.5 * (cv.normal_curvature(j, w1, "L") + cv.normal_curvature(j, w2, "L"))
    scale = abs(hs[0]) + abs(hs[1]) + abs(hs[2]) + 1e-300
    assert abs(hr - inv.h_r) <= 1e-10 * scale
    assert abs(hl - inv.h_l) <= 1e-10 * scale


@settings(max_examples=200, deadline=None)
@given(grads, st.tuples(*[st.floats(-10, 10)] * 3))
def test_angle_relation(g, X):
    inv = cv.invariants(jet(g, [0, 0, 0]))
    lhs = cv.inner(np.array(X), inv.n_l, "L") / inv.cosh_psi
    rhs = -cv.inner(np.array(X), inv.n_r, "R") / inv.cos_theta
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5))
def test_hyperboloid_umbilic(x, y):
    j = catalog.hyperboloid().surface.jet(np.array(x), np.array(y))
    assert cv.invariants(j).h_l == pytest.approx(1.0, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(grads, hessians)
def test_level_curve_contract(g, hs):
    j = jet(g, hs)
    k = cv.level_curve_curvature(j)
    s = math.sqrt(float(j.grad_sq))
    kl = cv.normal_curvature(j, cv.level_curve_direction(j), "L")
    assert kl == pytest.approx(-k * s / math.sqrt(1 - s * s), rel=1e-10, abs=1e-12)
