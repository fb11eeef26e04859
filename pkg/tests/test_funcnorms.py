import math

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from convexstab import funcnorms as fn
from convexstab import setcalc as sc
from convexstab import sphgrid as sg
from convexstab.funcnorms import NormError
from convexstab.sphgrid import SpectralCoeffs, SphericalField


def field(a, L=8, n=3):
    return sg.synthesize(SpectralCoeffs(n, L, np.asarray(a, dtype=float)), sg.make_grid(n, L))


def rng(k):
    return np.random.Generator(np.random.Philox(key=2000 + k))


def test_single_mode_norms():
    g = sg.make_grid(3, 8)
    y = sg.harmonic(g, 2, 1)
    assert abs(fn.l2_norm(y) - 1) < 1e-12
    assert abs(fn.w12_norm(y) - math.sqrt(7)) < 1e-12
    assert abs(fn.wm12_norm(y) - 1 / math.sqrt(7)) < 1e-12


def test_constant_norms():
    g = sg.make_grid(3, 8)
    f = SphericalField(g, np.full(g.N, -1.5))
    for v in (fn.l2_norm(f), fn.w12_norm(f), fn.wm12_norm(f)):
        assert abs(v - 1.5 * math.sqrt(4 * math.pi)) < 1e-12


def test_multiplier_monotonicity_and_cauchy_schwarz():
    r = rng(1)
    for _ in range(1000):
        f = field(r.standard_normal(sg.n_modes(3, 8)))
        wm, l2, w1 = fn.wm12_norm(f), fn.l2_norm(f), fn.w12_norm(f)
        assert wm <= l2 * (1 + 1e-14) and l2 <= w1 * (1 + 1e-14)
        assert l2 * l2 <= wm * w1 * (1 + 1e-12)


def test_inf_mu_constant_field():
    g = sg.make_grid(3, 8)
    f = SphericalField(g, np.full(g.N, 5.0))
    for norm in ("Wm12", "L2", "Linf"):
        mu, val = fn.inf_mu(f, norm)
        assert abs(mu - 5) < 1e-12 and abs(val) < 1e-12
    mu, val = fn.inf_mu(f, "Lp", 4)
    assert mu == 5 and val == 0


def test_inf_mu_wm12_orthogonality():
    g = sg.make_grid(3, 8)
    f = SphericalField(g, 2 + sg.harmonic(g, 2, 0).samples)
    mu, val = fn.inf_mu(f, "Wm12")
    assert abs(mu - 2) < 1e-12 and abs(val - 1 / math.sqrt(7)) < 1e-12


def test_inf_mu_lp_against_scalar_search():
    g = sg.make_grid(3, 16)
    f = SphericalField(g, np.maximum(sg.harmonic(g, 1, 0).samples, 0.0))
    mu, val = fn.inf_mu(f, "Lp", 4)
    obj = lambda m: float(g.weights @ np.abs(f.samples - m) ** 4)
    ref = minimize_scalar(obj, bounds=(f.samples.min(), f.samples.max()), method="bounded", options={"xatol": 1e-12})
    assert abs(mu - ref.x) < 1e-8
    assert abs(val - obj(ref.x) ** 0.25) < 1e-10


def test_inf_mu_errors():
    g = sg.make_grid(3, 4)
    f = SphericalField(g, g.nodes[:, 0])
    with pytest.raises(NormError):
        fn.inf_mu(f, "H3")
    with pytest.raises(NormError):
        fn.inf_mu(f, "Lp", 1.0)


def test_pythagoras_for_l2_infimum():
    f = field(rng(2).standard_normal(sg.n_modes(3, 8)))
    mu, val = fn.inf_mu(f, "L2")
    assert abs(val**2 + 4 * math.pi * mu**2 - fn.l2_norm(f) ** 2) < 1e-10


def test_poincare_gap():
    a = rng(3).standard_normal(sg.n_modes(3, 10))
    a[:4] = 0.0
    f = field(a, L=10)
    assert fn.gradient_l2_squared(f) >= 6 * fn.l2_norm(f) ** 2 - 1e-10


def test_lp_on_boundary():
    g = sg.make_grid(3, 8)
    one = SphericalField(g, np.ones(g.N))
    assert abs(fn.lp_norm_on_boundary(sc.ball(3, 8), one, 1) - 4 * math.pi) < 1e-12
    assert abs(fn.lp_norm_on_boundary(sc.ball(3, 8, radius=0.9), one, 1) - 0.81 * 4 * math.pi) < 1e-12
    c = np.zeros(sg.n_modes(3, 8))
    c[sg.mode_index(3, 2, 0)] = 0.05
    E = sc.NearlySphericalSet.from_coeffs(SpectralCoeffs(3, 8, c))
    assert abs(fn.lp_norm_on_boundary(E, one, 1) - sc.perimeter(E)) < 1e-10


def test_norm_report():
    f = field(rng(4).standard_normal(sg.n_modes(3, 8)))
    rep = fn.norm_report(f)
    assert rep.Wm12 <= rep.L2 <= rep.W12
    assert set(rep.Lp) == {2.0, 4.0}
    assert abs(rep.Lp[2.0] - rep.L2) < 1e-12


def test_duality_pairing():
    r = rng(5)
    g = sg.make_grid(3, 8)
    for _ in range(200):
        f = field(r.standard_normal(sg.n_modes(3, 8)))
        h = field(r.standard_normal(sg.n_modes(3, 8)))
        assert abs(g.integrate(f.samples * h.samples)) <= fn.wm12_norm(f) * fn.w12_norm(h) * (1 + 1e-12)
