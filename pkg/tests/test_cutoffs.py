import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kahler_bounds import cpm_geometry as geo
from kahler_bounds.cpm_geometry import ProjectivePoint as P
from kahler_bounds.cutoffs import (ANNULUS_LOWER, ANNULUS_UPPER, PSI_BAR_LOWER, PSI_LOWER, Annulus,
                                   annulus_cutoff, psi, psi_bar, psi_bar_boundary_value,
                                   psi_boundary_value)

W = P([1, 0, 0])


def at_distance(rng, w, d, n=1):
    return geo.sphere_points_at_distance(rng, w, d, n)


# psi

def test_psi_at_centre():
    assert psi(0.3, W, W) == pytest.approx(0.5)


def test_psi_vanishes_at_support_boundary(rng):
    R = 0.3
    vals = psi(R, W, at_distance(rng, W, 2 * R * (1 - 1e-12), 20))
    assert np.max(vals) < 1e-10
    assert np.all(psi(R, W, at_distance(rng, W, 2 * R * (1 + 1e-9), 20)) == 0)


def test_psi_example(rng):
    # t = 1 at R = pi/8, so the value is cos^2(pi/8) - 1/2
    v = psi(np.pi / 8, W, at_distance(rng, W, np.pi / 8, 5))
    np.testing.assert_allclose(v, np.cos(np.pi / 8) ** 2 - 0.5, atol=1e-12)
    assert v[0] == pytest.approx(0.35355339059327373, abs=1e-12)


@pytest.mark.parametrize("R", [0.0, np.pi / 4, -1.0])
def test_psi_domain(R):
    with pytest.raises(ValueError):
        psi(R, W, W)


def test_psi_lower_bound_on_ball(rng):
    for m in (1, 2, 3):
        for R in np.linspace(0, np.pi / 4, 202)[1:-1]:
            w = geo.random_points(rng, 1, m)[0]
            s = R * np.sqrt(rng.uniform(0, 1, 1000))
            s[0] = R * (1 - 1e-12)
            pts = geo.chart_to_point(w, _directions(rng, m, 1000) * np.tan(s)[:, None])
            assert psi(R, w, pts).min() >= PSI_LOWER - 1e-9


def _directions(rng, m, n):
    d = rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))
    return d / np.linalg.norm(d, axis=1, keepdims=True)


# psi_bar

def test_psi_bar_on_cut_locus():
    assert psi_bar(0.5, W, P([0, 1, 1j])) == pytest.approx(1 / 3)


def test_psi_bar_vanishes_on_inner_boundary(rng):
    r = 0.8
    assert np.max(np.abs(psi_bar(r, W, at_distance(rng, W, r / 2 * (1 + 1e-12), 10)))) < 1e-10
    assert np.all(psi_bar(r, W, at_distance(rng, W, r / 2 * (1 - 1e-9), 10)) == 0)


def test_psi_bar_example(rng):
    v = psi_bar(np.pi / 3, W, at_distance(rng, W, np.pi / 3, 5))
    np.testing.assert_allclose(v, 8 / 33, atol=1e-12)


@pytest.mark.parametrize("r", [0.0, np.pi / 2, 3.0])
def test_psi_bar_domain(r):
    with pytest.raises(ValueError):
        psi_bar(r, W, W)


def test_psi_bar_lower_bound_off_ball(rng):
    for m in (1, 2, 3):
        for r in np.linspace(0, np.pi / 2, 202)[1:-1]:
            w = geo.random_points(rng, 1, m)[0]
            s = np.minimum(rng.uniform(r, np.pi / 2, 1000), np.pi / 2 - 1e-9)
            s[0] = r
            pts = geo.chart_to_point(w, _directions(rng, m, 1000) * np.tan(s)[:, None])
            assert psi_bar(r, w, pts).min() >= PSI_BAR_LOWER - 1e-9


# monotonicity, boundary values, Lipschitz sanity

@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 0.78), st.floats(0.01, 1.56), st.integers(0, 2**32 - 1))
def test_radial_monotonicity(R, r, seed):
    rng = np.random.default_rng(seed)
    w = geo.random_points(rng, 1, 2)[0]
    direction = _directions(rng, 2, 1)
    s = np.linspace(0, np.pi / 2 - 1e-6, 400)
    pts = geo.chart_to_point(w, direction * np.tan(s)[:, None])
    assert np.all(np.diff(psi(R, w, pts)) <= 1e-12)
    assert np.all(np.diff(psi_bar(r, w, pts)) >= -1e-12)


def test_boundary_value_formulas(rng):
    for R in (0.05, 0.2, 0.5, 0.75):
        np.testing.assert_allclose(psi(R, W, at_distance(rng, W, R, 10)), psi_boundary_value(R), atol=1e-9)
    for r in (0.05, 0.4, 1.0, 1.5):
        np.testing.assert_allclose(psi_bar(r, W, at_distance(rng, W, r, 10)), psi_bar_boundary_value(r), atol=1e-9)


def test_infimum_limits():
    radii = [0.4, 0.2, 0.1, 0.05, 0.01, 1e-3]
    pv = [psi_boundary_value(R) for R in radii]
    phi = [1 / (1 + np.tan(r) ** 2 / np.tan(r / 2) ** 2) for r in radii]
    assert all(a >= b for a, b in zip(pv, pv[1:]))
    assert all(a <= b for a, b in zip(phi, phi[1:]))
    assert pv[-1] == pytest.approx(0.3, abs=1e-4)
    assert phi[-1] == pytest.approx(0.2, abs=1e-4)


def test_lipschitz_sanity(rng):
    h = 1e-7
    worst = 0.0
    for _ in range(300):
        w = geo.random_points(rng, 1, 2)[0]
        R, r = rng.uniform(0.05, 0.7), rng.uniform(0.05, 1.5)
        zeta = _directions(rng, 2, 1)[0] * np.tan(rng.uniform(0, 1.5))
        e = _directions(rng, 2, 1)[0]
        # chart FS length of the displacement e*h
        g = geo.chart_fs_hermitian(zeta)
        step = h * np.sqrt(np.real(np.conj(e) @ g @ e))
        for f in (lambda p: psi(R, w, p), lambda p: psi_bar(r, w, p)):
            a, b = f(geo.chart_to_point(w, zeta)), f(geo.chart_to_point(w, zeta + h * e))
            worst = max(worst, abs(b - a) / step)
    assert worst < 10.0


# annulus cutoff

def test_annulus_validation():
    with pytest.raises(ValueError):
        Annulus(W, 0.3, 0.2)
    with pytest.raises(ValueError):
        Annulus(W, -0.1, 0.2)
    with pytest.raises(ValueError):
        annulus_cutoff(Annulus(W, 0.0, np.pi / 4), W)


def test_annulus_doubled():
    d = Annulus(W, 0.2, 0.3).doubled()
    assert (d.inner, d.outer) == (0.1, 0.6)


def test_cutoff_vanishes_off_double(rng):
    a = Annulus(W, 0.2, 0.3)
    assert np.all(annulus_cutoff(a, at_distance(rng, W, 0.61, 50)) == 0)
    assert np.all(annulus_cutoff(a, at_distance(rng, W, 0.09, 50)) == 0)


def test_cutoff_bounds(rng):
    for m in (1, 2, 3):
        for _ in range(200):
            R = rng.uniform(1e-3, np.pi / 4 - 1e-6)
            r = rng.uniform(0, R)
            w = geo.random_points(rng, 1, m)[0]
            a = Annulus(P(w), r, R)
            inside = geo.chart_to_point(w, _directions(rng, m, 200) * np.tan(rng.uniform(r, R, 200))[:, None])
            assert annulus_cutoff(a, inside).min() >= ANNULUS_LOWER - 1e-9
            anywhere = geo.random_points(rng, 200, m)
            assert annulus_cutoff(a, anywhere).max() <= ANNULUS_UPPER + 1e-12


def test_ball_cutoff_is_psi(rng):
    a = Annulus(W, 0.0, 0.4)
    pts = geo.random_points(rng, 100, 2)
    np.testing.assert_array_equal(annulus_cutoff(a, pts), psi(0.4, W, pts))
    assert annulus_cutoff(a, W) == pytest.approx(0.5)
