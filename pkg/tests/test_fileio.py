import json
import math

import numpy as np
import pytest

from convexstab import corpus as cp
from convexstab import fileio
from convexstab import planar as pl
from convexstab import sphgrid as sg
from convexstab.fileio import FormatError


def test_field_round_trip_both_representations():
    E = cp.random_bandlimited(3, 8, 0.05, cp._rng(2, 0))
    for rep in ("spectral", "grid"):
        d = json.loads(fileio.dumps(fileio.field_to_json(E.u, rep)))
        f = fileio.field_from_json(d)
        np.testing.assert_allclose(f.samples, E.u.samples, atol=1e-14)


def test_set_and_polygon_round_trip():
    E = cp.random_bandlimited(3, 8, 0.05, cp._rng(3, 0)).translated([0.1, 0.2, 0.3])
    F = fileio.member_from_json(json.loads(fileio.dumps(fileio.member_to_json(E))))
    assert np.array_equal(F.coeffs.data, E.coeffs.data)
    assert np.array_equal(F.center, E.center)
    P = pl.l_shape()
    Q = fileio.member_from_json(json.loads(fileio.dumps(fileio.member_to_json(P))))
    np.testing.assert_array_equal(P.vertices, Q.vertices)


def test_dumps_is_canonical():
    a = fileio.dumps({"b": np.float64(0.1), "a": [np.int64(3), np.bool_(True)], "c": math.nan, "d": -math.inf})
    assert a == fileio.dumps({"a": [3, True], "b": 0.1, "d": -math.inf, "c": math.nan})
    assert json.loads(a) == {"a": [3, True], "b": 0.1, "c": None, "d": "-inf"}


def test_malformed_records():
    with pytest.raises(FormatError):
        fileio.field_from_json({"n": 3, "L": 4, "data": [0.0] * 3})
    with pytest.raises(FormatError):
        fileio.field_from_json({"n": 3, "L": 4, "repr": "wavelet", "data": [0.0] * sg.n_modes(3, 4)})
    with pytest.raises(FormatError):
        fileio.field_from_json({"L": 4})
    with pytest.raises(FormatError):
        fileio.set_from_json({"field": {"n": 3, "L": 2, "data": [0.0] * 9}})
    with pytest.raises(FormatError):
        fileio.member_from_json({"type": "torus"})
    with pytest.raises(FormatError):
        fileio.polygon_from_json({})
    with pytest.raises(FormatError):
        fileio.field_to_json(sg.harmonic(sg.make_grid(3, 4), 1, 0), "wavelet")
