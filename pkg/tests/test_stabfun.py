import math

import numpy as np
import pytest

from convexstab import stabfun
from convexstab.stabfun import KINK, f, f_prime, f_second

SAMPLES = 10_000


def rng():
    return np.random.Generator(np.random.Philox(key=3000))


def test_values():
    assert f(0.5) == KINK
    assert abs(f(KINK) - 1 / math.e) < 1e-16
    assert abs(f(0.1) - 0.1 / math.log(10)) < 1e-16
    assert abs(f(0.1) - 0.0434294481903252) < 1e-15
    assert abs(f_prime(0.1) - (1 + math.log(10)) / math.log(10) ** 2) < 1e-15
    assert abs(f_prime(0.1) - 0.6229061) < 1e-7
    assert f(0.0) == 0.0


def test_kink_derivative():
    assert f_prime(KINK) == 2.0
    assert f_prime(np.nextafter(KINK, 1)) == 0.0
    assert abs(f_prime(np.nextafter(KINK, 0)) - 2.0) < 1e-12


def test_derivatives_against_finite_differences():
    t = np.linspace(0.01, 0.35, 50)
    h = 1e-6
    np.testing.assert_allclose(f_prime(t), (f(t + h) - f(t - h)) / (2 * h), rtol=1e-7)
    np.testing.assert_allclose(f_second(t), (f_prime(t + h) - f_prime(t - h)) / (2 * h), rtol=1e-5)


def test_lipschitz_convexity_halving_quadratic_lower_bound():
    r = rng()
    s, t = r.uniform(0, 1, SAMPLES), r.uniform(0, 1, SAMPLES)
    assert np.all(np.abs(f(s) - f(t)) <= 2 * np.abs(s - t) + 1e-14)
    a, b = r.uniform(0, KINK, SAMPLES), r.uniform(0, KINK, SAMPLES)
    assert np.all(f((a + b) / 2) <= (f(a) + f(b)) / 2 + 1e-14)
    t = r.uniform(0, 0.2, SAMPLES)
    assert np.all(f(t / 2) >= f(t) / 4 - 1e-14)
    # the sharp constant on (0, 1] is 1/e, attained at t = 1
    t = np.linspace(1e-6, 1, SAMPLES)
    assert np.all(f(t) >= t * t / math.e - 1e-16)
    assert np.all(f(t[t <= KINK]) >= t[t <= KINK] ** 2)
    assert f(1.0) < 1.0


def test_monotone_and_continuous():
    t = np.linspace(0, 1, SAMPLES)
    assert np.all(np.diff(f(t)) >= 0)
    assert abs(f(np.nextafter(KINK, 0)) - f(KINK)) < 1e-15


def test_rejects_negative():
    with pytest.raises(ValueError):
        f(-0.1)
    with pytest.raises(ValueError):
        f_prime(np.array([0.1, float("nan")]))


def test_linear_profile():
    p = stabfun.LINEAR_PROFILE
    assert p.f(0.3) == 0.3 and p.f_prime(0.3) == 1.0 and p.f_second(0.3) == 0.0
    np.testing.assert_array_equal(p.f(np.array([0.1, 0.2])), [0.1, 0.2])
