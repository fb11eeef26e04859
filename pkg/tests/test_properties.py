import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from convexstab import funcnorms as fn
from convexstab import pipeline as pp
from convexstab import planar as pl
from convexstab import sphgrid as sg
from convexstab import stabfun
from convexstab.sphgrid import SpectralCoeffs

L = 6
K = sg.n_modes(3, L)
GRID = sg.make_grid(3, L)
unit = st.floats(0.0, 1.0, allow_nan=False)
coeffs = arrays(np.float64, K, elements=st.floats(-1.0, 1.0, allow_nan=False))
radii = st.lists(st.floats(0.4, 1.6, allow_nan=False), min_size=5, max_size=30)
SETTINGS = settings(max_examples=60, deadline=None)


def field(a):
    return sg.synthesize(SpectralCoeffs(3, L, a), GRID)


@SETTINGS
@given(unit, unit)
def test_profile_two_lipschitz_and_monotone(s, t):
    assert abs(stabfun.f(s) - stabfun.f(t)) <= 2 * abs(s - t) + 1e-15
    if s <= t:
        assert stabfun.f(s) <= stabfun.f(t)


@SETTINGS
@given(coeffs)
def test_round_trip(a):
    b = GRID.analyze_array(GRID.synth(a))
    assert np.max(np.abs(a - b)) < 1e-12


@SETTINGS
@given(coeffs)
def test_norm_chain(a):
    f = field(a)
    assert fn.wm12_norm(f) <= fn.l2_norm(f) * (1 + 1e-14) + 1e-300
    assert fn.l2_norm(f) <= fn.w12_norm(f) * (1 + 1e-14) + 1e-300


@SETTINGS
@given(coeffs, st.floats(0.0, 0.5), st.floats(0.0, 0.5))
def test_heat_semigroup(a, s, t):
    f = field(a)
    lhs = pp.heat_smooth(pp.heat_smooth(f, s), t).samples
    np.testing.assert_allclose(lhs, pp.heat_smooth(f, s + t).samples, atol=1e-12)


@SETTINGS
@given(radii, st.floats(-math.pi, math.pi), st.floats(-5, 5), st.floats(-5, 5))
def test_polygon_measures_rigid_invariance(r, ang, dx, dy):
    P = pl.star_polygon(r)
    c, s = math.cos(ang), math.sin(ang)
    Q = pl.Polygon(P.vertices @ np.array([[c, s], [-s, c]]) + [dx, dy])
    assert abs(pl.area(P) - pl.area(Q)) < 1e-11
    assert abs(pl.polygon_perimeter(P) - pl.polygon_perimeter(Q)) < 1e-11
    HP, HQ = pl.convex_hull(P), pl.convex_hull(Q)
    assert abs(pl.area(HP) - pl.area(HQ)) < 1e-11


@SETTINGS
@given(radii, radii)
def test_symdiff_is_a_metric_on_convex_sets(r1, r2):
    A, B = pl.convex_hull(pl.star_polygon(r1)), pl.convex_hull(pl.star_polygon(r2))
    d = pl.symdiff_2d(A, B)
    assert d >= -1e-12 and abs(d - pl.symdiff_2d(B, A)) < 1e-11
    assert pl.symdiff_2d(A, A) < 1e-12


@SETTINGS
@given(radii)
def test_appendix_inequalities(r):
    P = pl.star_polygon(r)
    if not pl.is_simple(P.vertices):
        return
    rep = pl.appendix_check(P)
    assert rep.slack_plane >= -1e-12 and rep.slack_plane2 >= -1e-12
    assert rep.perimeter_cov <= rep.perimeter_E + 1e-12
