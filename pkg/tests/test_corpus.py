import filecmp
import math

import numpy as np
import pytest

from convexstab import corpus as cp
from convexstab import planar as pl
from convexstab import setcalc as sc
from convexstab import sphgrid as sg
from convexstab.corpus import CorpusError, CorpusSpec

BALL = 4 * math.pi / 3


def test_spec_validation():
    with pytest.raises(CorpusError):
        CorpusSpec("cubes")
    with pytest.raises(CorpusError):
        CorpusSpec("random_bandlimited", sigma=0.5)
    with pytest.raises(CorpusError):
        CorpusSpec("random_bandlimited", count=-1)
    with pytest.raises(CorpusError):
        CorpusSpec("random_bandlimited", n=4)


def test_single_mode():
    out = cp.generate(CorpusSpec("single_mode", params={"l": 2, "m": 0, "a": 0.05}, L=8))
    assert len(out) == 1
    assert abs(sc.volume(out[0]) - BALL) < 1e-12
    c = out[0].coeffs.data
    assert abs(c[sg.mode_index(3, 2, 0)] - 0.05) < 1e-15
    mask = np.ones(len(c), bool)
    mask[[0, sg.mode_index(3, 2, 0)]] = False
    assert np.all(c[mask] == 0)


def test_byte_identical_corpora(tmp_path):
    spec = CorpusSpec("random_bandlimited", count=100, seed=7, sigma=0.05, L=8)
    a, b = tmp_path / "a", tmp_path / "b"
    cp.write_corpus(spec, a)
    cp.write_corpus(spec, b)
    names = sorted(p.name for p in a.iterdir())
    assert len(names) == 101
    match, mismatch, errors = filecmp.cmpfiles(a, b, names, shallow=False)
    assert not mismatch and not errors


def test_members_independent_of_count():
    short = cp.generate(CorpusSpec("random_bandlimited", count=3, seed=4, L=8))
    long = cp.generate(CorpusSpec("random_bandlimited", count=6, seed=4, L=8))
    for E, F in zip(short, long):
        assert np.array_equal(E.coeffs.data, F.coeffs.data)


def test_random_sets_respect_bound_and_volume():
    for E in cp.generate(CorpusSpec("random_bandlimited", count=20, seed=3, sigma=0.05, L=12)):
        assert abs(sc.volume(E) - BALL) < 1e-12
        assert max(E.sigma_bound["Linf"], E.sigma_bound["W1inf"]) <= 0.05
        assert sg.analyze(E.u).data[sg.mode_degrees(3, 12) > 6].__abs__().max() < 1e-8


def test_ellipsoid_matches_closed_form():
    axes = np.exp(0.05 * np.array([1.0, -0.4, -0.6]))
    E = cp.ellipsoid(axes, 32)
    g = sg.make_grid(3, 48)
    r = 1 + g.evaluate(E.coeffs.data, g.nodes)
    np.testing.assert_allclose(r, cp.ellipsoid_radius(axes, g.nodes), atol=1e-8)
    # the axes have product one, so the volume is that of the ball
    assert abs(sc.volume(E) - BALL) < 1e-10


def test_ellipsoidal_corpus():
    for E in cp.generate(CorpusSpec("ellipsoidal", count=5, seed=2, sigma=0.05, L=16)):
        assert abs(sc.volume(E) - BALL) < 1e-12
        assert sc.convexity_margin(E) > 0


def test_normalization_idempotent():
    E = cp.random_bandlimited(3, 8, 0.05, cp._rng(1, 0))
    F = cp.normalize_volume(E)
    assert np.max(np.abs(F.coeffs.data - E.coeffs.data)) < 1e-14


def test_amplitude_bound_enforced():
    with pytest.raises(CorpusError):
        cp.generate(CorpusSpec("single_mode", sigma=0.05, L=8, params={"l": 2, "a": 0.3}))


def test_planar_kinds(tmp_path):
    stars = cp.generate(CorpusSpec("planar_star", count=30, seed=5, sigma=0.4, n=2))
    notched = cp.generate(CorpusSpec("planar_notched", count=30, seed=6, sigma=0.4, n=2))
    for P in stars + notched:
        assert isinstance(P, pl.Polygon) and pl.is_simple(P.vertices) and pl.area(P) > 0
    spec = CorpusSpec("planar_star", count=4, seed=5, sigma=0.4, n=2)
    cp.write_corpus(spec, tmp_path)
    got_spec, members = cp.read_corpus(tmp_path)
    assert got_spec == spec
    for P, Q in zip(stars, members):
        np.testing.assert_array_equal(P.vertices, Q.vertices)


def test_read_corpus_round_trip(tmp_path):
    spec = CorpusSpec("random_bandlimited", count=3, seed=9, L=8)
    path = cp.write_corpus(spec, tmp_path)
    got_spec, members = cp.read_corpus(path)
    assert got_spec == spec
    for E, F in zip(cp.generate(spec), members):
        assert np.array_equal(E.coeffs.data, F.coeffs.data)
    with pytest.raises(CorpusError):
        cp.read_corpus(tmp_path / "missing")
