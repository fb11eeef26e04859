import math

import numpy as np
import pytest
from scipy.special import sph_harm_y

from convexstab import sphgrid as sg
from convexstab.sphgrid import SpectralCoeffs, SphericalField


def real_harmonic(l, m, theta, phi):
    """Independent real orthonormal harmonic from scipy's complex ones
    (cos-type for m > 0, sin-type for m < 0, no Condon-Shortley phase)."""
    if m == 0:
        return sph_harm_y(l, 0, theta, phi).real
    y = sph_harm_y(l, abs(m), theta, phi) * (-1) ** m
    return math.sqrt(2.0) * (y.real if m > 0 else y.imag)


def angles(grid):
    x = grid.nodes
    return np.arccos(np.clip(x[:, 2], -1, 1)), np.arctan2(x[:, 1], x[:, 0])


def rng(k=0):
    return np.random.Generator(np.random.Philox(key=1000 + k))


def test_circle_grid_is_equispaced():
    g = sg.make_grid(2, 8)
    assert g.N == 18
    np.testing.assert_allclose(g.weights, 2 * math.pi / 18, rtol=0, atol=1e-15)


@pytest.mark.parametrize("n,area", [(2, 2 * math.pi), (3, 4 * math.pi)])
def test_weights_sum_to_sphere_area(n, area):
    g = sg.make_grid(n, 16)
    assert abs(g.weights.sum() - area) <= 1e-12 * area


def test_y31_unit_norm_against_scipy():
    g = sg.make_grid(3, 16)
    th, ph = angles(g)
    y = real_harmonic(3, 1, th, ph)
    assert abs(g.integrate(y * y) - 1.0) < 1e-12


@pytest.mark.parametrize("l,m", [(0, 0), (1, -1), (2, 1), (3, -2), (5, 4), (7, -7)])
def test_basis_matches_scipy(l, m):
    g = sg.make_grid(3, 8)
    th, ph = angles(g)
    np.testing.assert_allclose(sg.harmonic(g, l, m).samples, real_harmonic(l, m, th, ph), atol=1e-13)


def test_quadrature_exact_for_products_up_to_2L():
    L = 12
    g = sg.make_grid(3, L)
    r = rng(1)
    a, b = r.standard_normal((2, sg.n_modes(3, L)))
    assert abs(g.integrate(g.synth(a) * g.synth(b)) - a @ b) < 1e-12 * np.linalg.norm(a) * np.linalg.norm(b)


def test_analyze_basis_element():
    g = sg.make_grid(3, 16)
    c = sg.analyze(sg.harmonic(g, 2, 0)).data
    k = sg.mode_index(3, 2, 0)
    assert abs(c[k] - 1) < 1e-12
    assert np.max(np.abs(np.delete(c, k))) < 1e-12


def test_zero_coefficients_give_zero_field():
    g = sg.make_grid(3, 8)
    f = sg.synthesize(SpectralCoeffs(3, 8, np.zeros(sg.n_modes(3, 8))), g)
    assert np.all(f.samples == 0)


@pytest.mark.parametrize("n", [2, 3])
def test_round_trip_and_parseval(n):
    L = 32
    g = sg.make_grid(n, L)
    a = rng(2).standard_normal(sg.n_modes(n, L))
    v = g.synth(a)
    b = g.analyze_array(v)
    assert np.max(np.abs(g.synth(b) - v)) < 1e-10
    assert abs(a @ a - g.integrate(v * v)) < 1e-10 * (a @ a)


def test_laplacian_of_y20():
    g = sg.make_grid(3, 16)
    y = sg.harmonic(g, 2, 0)
    np.testing.assert_allclose(sg.laplace_tau(y).samples, -6 * y.samples, atol=1e-12)


def test_gradient_of_constant_vanishes():
    g = sg.make_grid(3, 16)
    V = sg.grad_tau(SphericalField(g, np.full(g.N, 3.0)))
    # analysis round-off (~1e-15 per mode) amplified by derivatives of size ~L^2
    assert np.max(np.abs(V.components)) < 1e-11


@pytest.mark.parametrize("m", [-1, 0, 1])
def test_dirichlet_energy_of_degree_one(m):
    g = sg.make_grid(3, 16)
    V = sg.grad_tau(sg.harmonic(g, 1, m))
    assert abs(g.integrate(V.norm_squared()) - 2.0) < 1e-12


def test_divergence_integrates_to_zero_and_green_identity():
    L = 12
    g = sg.make_grid(3, L)
    r = rng(3)
    a, b = r.standard_normal((2, sg.n_modes(3, L))) / (1 + sg.mode_degrees(3, L)) ** 2
    f, h = sg.synthesize(SpectralCoeffs(3, L, a), g), sg.synthesize(SpectralCoeffs(3, L, b), g)
    assert abs(g.integrate(sg.div_tau(sg.grad_tau(f)).samples)) < 1e-10
    lhs = g.integrate(f.samples * sg.laplace_tau(h).samples)
    rhs = -g.integrate(np.sum(sg.grad_tau(f).components * sg.grad_tau(h).components, axis=1))
    assert abs(lhs - rhs) < 1e-9


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_padded_quadrature_of_powers(k):
    L = 16
    g = sg.make_grid(3, L)
    a = rng(4).standard_normal(sg.n_modes(3, L)) * 0.02 / (1 + sg.mode_degrees(3, L)) ** 2
    fine = sg.oversampled(g)
    ref = sg.make_grid(3, 4 * L)
    got = fine.integrate((1 + fine.synth(a)) ** k)
    want = ref.integrate((1 + ref.synth(a)) ** k)
    assert abs(got - want) < 1e-10


def test_evaluate_off_grid_against_scipy():
    g = sg.make_grid(3, 10)
    r = rng(5)
    a = r.standard_normal(sg.n_modes(3, 10))
    th, ph = r.uniform(0.01, 3.13, 200), r.uniform(-math.pi, math.pi, 200)
    dirs = np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=1)
    want = sum(a[sg.mode_index(3, l, m)] * real_harmonic(l, m, th, ph) for l in range(11) for m in range(-l, l + 1))
    np.testing.assert_allclose(g.evaluate(a, dirs), want, atol=1e-12)


def test_evaluate_gradient_matches_grid_gradient():
    g = sg.make_grid(3, 12)
    a = rng(6).standard_normal(sg.n_modes(3, 12))
    _, grad = g.evaluate(a, g.nodes, with_grad=True)
    amb = np.einsum("id,idk->ik", g.grad_frame(a), g.frame())
    np.testing.assert_allclose(grad, amb, atol=1e-11)


def test_eigenvalues():
    np.testing.assert_array_equal(sg.laplace_eigenvalues(3, 3), [0, 2, 2, 2, 6, 6, 6, 6, 6, 12, 12, 12, 12, 12, 12, 12])
