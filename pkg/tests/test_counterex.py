import math

import numpy as np
import pytest

from convexstab import counterex as cx
from convexstab import setcalc as sc
from convexstab.counterex import CounterexampleConfig, CounterexampleError


@pytest.fixture(scope="module")
def theta_sets():
    return {th: cx.build_E_theta(CounterexampleConfig(theta=th)) for th in (0.3, 0.1)}


def test_config_validation():
    for bad in ({"theta": 0.0}, {"theta": 0.6}, {"chart_radius": 0.3}, {"delta_c": 0.0}):
        with pytest.raises(CounterexampleError):
            CounterexampleConfig(**bad)
    c = CounterexampleConfig(theta=0.5)
    assert c.delta == 0.2 * math.exp(-8.0)


def test_planar_kernel_laplacian_bounded():
    r = cx.planar_kernel_check()
    assert r["bounded_by_4"]
    assert r["max_fd_error"] < 1e-5
    x, y = np.array([0.3, -0.1]), np.array([0.2, 0.5])
    np.testing.assert_allclose(cx.planar_kernel_laplacian(x, y), 8 * x * y / (x * x + y * y))
    assert cx.planar_kernel(0.0, 0.0) == 0.0


def test_cutoff():
    t = np.linspace(0, 1.2, 1201)
    c = cx.cutoff(t)
    assert np.all(c[t <= 0.3] == 1) and np.all(c[t >= 1] == 0)
    assert np.all(np.diff(c) <= 1e-15)
    # C^1 at both ends
    assert abs(cx.cutoff(0.3 + 1e-6) - 1) < 1e-12 and abs(cx.cutoff(1 - 1e-6)) < 1e-12


def test_transplant_consistency_scales_with_chart_radius():
    a = cx.transplant_consistency(R=0.2)
    b = cx.transplant_consistency(R=0.1)
    assert a["max_difference"] > b["max_difference"]
    assert a["C"] < 10 and b["C"] < 10


def test_perimeter_integrand_convex_near_origin():
    r = cx.F_convexity_check(samples=50)
    assert r["psd"]
    assert r["expansion_C"] < 10


def test_E_theta_volume_and_nonconvexity(theta_sets):
    for th, ts in theta_sets.items():
        assert abs(sc.volume(ts.E) - 4 * math.pi / 3) < 1e-12
        assert ts.margin < 0
        assert ts.brackets["hessian"]
        assert abs(ts.hess_inf - 1 / th) < 1e-9 / th


def test_E_theta_hessian_scaling(theta_sets):
    ratio = theta_sets[0.1].hess_inf / theta_sets[0.3].hess_inf
    assert abs(ratio / 3 - 1) < 0.25


def test_E_theta_resolution_is_reported(theta_sets):
    for ts in theta_sets.values():
        assert not ts.resolved
        assert ts.required_L > 32
        d = ts.to_dict()
        assert "E" not in d and "bracket_all" in d


def test_ball_is_rejected():
    with pytest.raises(CounterexampleError):
        cx.sharpness_experiment(sets=[(0.2, sc.ball(3, 8))], L=8)
