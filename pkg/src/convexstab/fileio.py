"""
JSON persistence for fields, sets, polygons and reports.

Field files are ``{"n", "L", "repr", "data"}``. With ``repr = "spectral"``
the data are the real harmonic coefficients in flat order (degree
ascending, order ascending inside a degree); with ``repr = "grid"`` they
are samples on the base grid of band ``L`` in node order. Floats are
written with ``repr`` precision, keys sorted, so equal inputs give
byte-identical files.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from . import sphgrid as sg
from .planar import Polygon
from .setcalc import NearlySphericalSet
from .sphgrid import SpectralCoeffs, SphericalField


class FormatError(ValueError):
    pass


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            return None if math.isnan(x) else ("inf" if x > 0 else "-inf")
        return x
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=1) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj))


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def field_to_json(f, repr_: str = "spectral") -> dict:
    if isinstance(f, SpectralCoeffs):
        c = f
        grid = sg.make_grid(c.n, c.L)
    else:
        c = sg.analyze(f)
        grid = f.grid
    if repr_ == "spectral":
        data = c.data
    elif repr_ == "grid":
        data = grid.synth(c.data)
    else:
        raise FormatError(f"unknown field representation {repr_!r}")
    return {"n": c.n, "L": c.L, "repr": repr_, "data": [float(x) for x in data]}


def field_from_json(d: dict) -> SphericalField:
    try:
        n, L, rep, data = int(d["n"]), int(d["L"]), d.get("repr", "spectral"), np.asarray(d["data"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed field record: {exc}") from exc
    grid = sg.make_grid(n, L)
    if rep == "spectral":
        if data.shape != (sg.n_modes(n, L),):
            raise FormatError(f"expected {sg.n_modes(n, L)} coefficients, got {data.shape}")
        return sg.synthesize(SpectralCoeffs(n, L, data), grid)
    if rep == "grid":
        if data.shape != (grid.N,):
            raise FormatError(f"expected {grid.N} samples, got {data.shape}")
        return SphericalField(grid, data)
    raise FormatError(f"unknown field representation {rep!r}")


def set_to_json(E: NearlySphericalSet) -> dict:
    return {"center": [float(x) for x in E.center], "field": field_to_json(E.coeffs)}


def set_from_json(d: dict) -> NearlySphericalSet:
    try:
        center = d["center"]
        f = field_from_json(d["field"])
    except KeyError as exc:
        raise FormatError(f"malformed set record, missing {exc}") from exc
    return NearlySphericalSet(np.asarray(center, dtype=float), f)


def polygon_to_json(P: Polygon) -> dict:
    return {"vertices": P.vertices.tolist()}


def polygon_from_json(d: dict) -> Polygon:
    try:
        return Polygon.checked(d["vertices"])
    except KeyError as exc:
        raise FormatError("malformed polygon record, missing 'vertices'") from exc


def member_to_json(obj) -> dict:
    if isinstance(obj, Polygon):
        return {"type": "polygon", **polygon_to_json(obj)}
    return {"type": "set", **set_to_json(obj)}


def member_from_json(d: dict):
    kind = d.get("type", "set")
    if kind == "polygon":
        return polygon_from_json(d)
    if kind == "set":
        return set_from_json(d)
    raise FormatError(f"unknown member type {kind!r}")
