import math

import numpy as np
import pytest
from scipy.integrate import quad

from convexstab import corpus as cp
from convexstab import setcalc as sc
from convexstab import sphgrid as sg
from convexstab.acceptance import weak_form_residual
from convexstab.setcalc import NearlySphericalSet, SetError
from convexstab.sphgrid import SpectralCoeffs

A = 0.05
Y20_NORM = math.sqrt(5.0 / (16.0 * math.pi))


def y20(theta):
    return Y20_NORM * (3 * np.cos(theta) ** 2 - 1)


def dy20(theta):
    return -6 * Y20_NORM * np.cos(theta) * np.sin(theta)


def mode_set(l, m, a, L=16, n=3):
    c = np.zeros(sg.n_modes(n, L))
    c[sg.mode_index(n, l, m)] = a
    return NearlySphericalSet.from_coeffs(SpectralCoeffs(n, L, c))


def const_set(c, L=16):
    return NearlySphericalSet.from_function(lambda w: np.full(len(w), c), 3, L)


def shifted_ball(x0, L=32):
    x0 = np.asarray(x0, dtype=float)

    def radius(w):
        b = w @ x0
        return b + np.sqrt(b * b - x0 @ x0 + 1.0) - 1.0

    return NearlySphericalSet.from_function(radius, 3, L)


# 1D surface-of-revolution oracles for r(theta) = 1 + a Y20(theta)
def r_axi(t):
    return 1 + A * y20(t)


def oracle_volume():
    return 2 * math.pi / 3 * quad(lambda t: r_axi(t) ** 3 * math.sin(t), 0, math.pi, epsabs=1e-14, epsrel=1e-14)[0]


def oracle_perimeter():
    f = lambda t: r_axi(t) * math.sin(t) * math.sqrt(r_axi(t) ** 2 + (A * dy20(t)) ** 2)
    return 2 * math.pi * quad(f, 0, math.pi, epsabs=1e-14, epsrel=1e-14)[0]


def oracle_symdiff_ball():
    f = lambda t: abs(r_axi(t) ** 3 - 1) * math.sin(t)
    # the integrand kinks where Y20 = 0
    t0 = math.acos(1 / math.sqrt(3))
    pts = [0, t0, math.pi - t0, math.pi]
    return 2 * math.pi / 3 * sum(quad(f, a, b, epsabs=1e-14, epsrel=1e-14)[0] for a, b in zip(pts, pts[1:]))


def test_ball_values():
    B = sc.ball(3, 16)
    assert abs(sc.volume(B) - 4 * math.pi / 3) < 1e-12
    assert abs(sc.perimeter(B) - 4 * math.pi) < 1e-12
    assert np.max(np.abs(sc.mean_curvature(B).S.samples - 2)) < 1e-8
    assert np.linalg.norm(sc.barycenter(B)) < 1e-14


def test_constant_deviation_is_dilation():
    E = const_set(0.1)
    assert abs(sc.volume(E) - 4 * math.pi / 3 * 1.331) < 1e-12
    assert abs(sc.perimeter(const_set(-0.1)) - 4 * math.pi * 0.81) < 1e-12
    S = sc.mean_curvature(E).S.samples
    assert np.max(np.abs(S - 2 / 1.1)) < 1e-10
    assert abs(sc.convexity_margin(E) - 1 / 1.1) < 1e-10


def test_axisymmetric_volume_perimeter_symdiff_against_1d_quadrature():
    E = mode_set(2, 0, A)
    assert abs(sc.volume(E) - oracle_volume()) < 1e-12
    assert abs(sc.perimeter(E) - oracle_perimeter()) < 1e-8
    assert abs(sc.symdiff(E, sc.ball(3, 16)) - oracle_symdiff_ball()) < 1e-4


def test_axisymmetric_barycenter_against_1d_quadrature():
    E = mode_set(2, 0, A)
    E = NearlySphericalSet.from_coeffs(E.coeffs + mode_set(1, 0, 0.02).coeffs)
    r = lambda t: 1 + A * y20(t) + 0.02 * math.sqrt(3 / (4 * math.pi)) * math.cos(t)
    vol = 2 * math.pi / 3 * quad(lambda t: r(t) ** 3 * math.sin(t), 0, math.pi, epsabs=1e-14)[0]
    mz = 2 * math.pi / 4 * quad(lambda t: r(t) ** 4 * math.cos(t) * math.sin(t), 0, math.pi, epsabs=1e-14)[0]
    np.testing.assert_allclose(sc.barycenter(E), [0, 0, mz / vol], atol=1e-12)


def test_translated_ball():
    x0 = [0.1, 0.0, 0.0]
    E = shifted_ball(x0)
    np.testing.assert_allclose(sc.barycenter(E), x0, atol=1e-9)
    F = sc.recenter(E, x0)
    assert np.max(np.abs(F.coeffs.data)) < 1e-9


def test_symdiff_nested_and_identical():
    E = mode_set(2, 0, A)
    assert sc.symdiff(E, E) == 0
    B, B2 = sc.ball(3, 16), sc.ball(3, 16, radius=1.1)
    assert abs(sc.symdiff(B, B2) - 0.331 * 4 * math.pi / 3) < 1e-12


def test_mean_curvature_linearization():
    a = 1e-3
    E = mode_set(2, 0, a)
    cf = sc.mean_curvature(E)
    g = cf.S.grid
    want = 2 + 4 * a * sg.harmonic(g, 2, 0).samples
    assert np.max(np.abs(cf.S.samples - want)) < 1e-5
    assert cf.confident


def test_mean_curvature_weak_and_strong_agree():
    E = cp.random_bandlimited(3, 16, 0.05, cp._rng(3, 0))
    cf = sc.mean_curvature(E)
    strong = sc.mean_curvature_strong(E, cf.S.grid)
    assert np.max(np.abs(strong - cf.S.samples)) < 1e-6


def test_weak_form_identity():
    E = cp.random_bandlimited(3, 16, 0.05, cp._rng(4, 0))
    phis = np.random.Generator(np.random.Philox(key=4)).standard_normal((20, sg.n_modes(3, 16)))
    assert np.max(np.abs(weak_form_residual(E, phis))) < 1e-8


def test_recenter_identity_and_idempotent_barycentering():
    B = sc.ball(3, 16)
    assert np.max(np.abs(sc.recenter(B, [0, 0, 0]).coeffs.data)) == 0
    E = mode_set(2, 0, A, L=16)
    E = NearlySphericalSet.from_coeffs(E.coeffs + mode_set(1, 1, 0.03).coeffs + mode_set(3, -2, 0.01).coeffs)
    F = sc.recenter(E, sc.barycenter(E), L=24)
    assert np.linalg.norm(sc.barycenter(F)) < 1e-8


def test_recenter_rejects_large_shift():
    with pytest.raises(SetError):
        sc.recenter(sc.ball(3, 8), [0.6, 0, 0])


def test_rescale_volume():
    B = sc.ball(3, 16)
    F, rho = sc.rescale_volume(B, 4 * math.pi / 3 * 1.331)
    assert abs(rho - 1.1) < 1e-12
    E = mode_set(2, 0, A)
    _, rho = sc.rescale_volume(E, sc.volume(E))
    assert abs(rho - 1) < 1e-14
    F, rho = sc.rescale_volume(E, 4 * math.pi / 3)
    assert abs(rho - (4 * math.pi / 3 / sc.volume(E)) ** (1 / 3)) < 1e-14
    assert abs(sc.volume(F) - 4 * math.pi / 3) < 1e-12


@pytest.mark.parametrize("rho", [0.8, 0.9, 1.1, 1.2])
def test_scaling_laws(rho):
    E = cp.random_bandlimited(3, 16, 0.05, cp._rng(5, 0))
    F = NearlySphericalSet.from_coeffs(SpectralCoeffs(3, 16, rho * E.coeffs.data + (rho - 1) * math.sqrt(4 * math.pi) * np.eye(1, sg.n_modes(3, 16))[0]))
    assert abs(sc.volume(F) / sc.volume(E) - rho**3) < 1e-9
    assert abs(sc.perimeter(F) / sc.perimeter(E) - rho**2) < 1e-9
    SE, SF = sc.mean_curvature(E).S.samples, sc.mean_curvature(F).S.samples
    assert np.max(np.abs(SF * rho - SE)) < 1e-9


def test_convexity_margin_sign():
    assert abs(sc.convexity_margin(sc.ball(3, 16)) - 1) < 1e-12
    assert sc.convexity_margin(mode_set(2, 0, A)) > 0
    assert sc.convexity_margin(mode_set(8, 0, 0.2, L=16)) < 0


def test_sobolev_norms():
    nm = sc.sobolev_c_norms(const_set(0.03))
    assert abs(nm["Linf"] - 0.03) < 1e-14 and nm["W1inf"] < 1e-12 and nm["C2"] < 1e-11
    nm = sc.sobolev_c_norms(mode_set(1, 1, 0.02))
    # |D Y_1| is maximal on the great circle orthogonal to e_x, where it equals sqrt(3/4pi)
    assert abs(nm["W1inf"] - 0.02 * math.sqrt(3 / (4 * math.pi))) < 1e-4 * 0.02


def test_isoperimetric_check():
    r = sc.isoperimetric_check(sc.ball(3, 16))
    assert abs(r["deficit"]) < 1e-12 and r["asymmetry"] < 1e-12
    r = sc.isoperimetric_check(sc.ball(3, 16, radius=0.9))
    assert abs(r["deficit"]) < 1e-12 and r["asymmetry"] < 1e-12
    r = sc.isoperimetric_check(mode_set(2, 0, A))
    assert r["deficit"] > 0 and r["deficit"] >= 0.01 * r["asymmetry"] ** 2


def test_isoperimetric_inequality_on_corpus():
    for E in cp.generate(cp.CorpusSpec("random_bandlimited", count=10, seed=9, sigma=0.05, L=16)):
        assert sc.perimeter(E) >= sc.isoperimetric_lower_bound(sc.volume(E), 3) - 1e-9


def test_rejects_large_deviation():
    with pytest.raises(SetError):
        const_set(0.6)
