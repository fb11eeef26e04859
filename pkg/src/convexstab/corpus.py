"""
Deterministic corpora of nearly spherical sets and planar polygons.

Randomness comes from numpy's Philox4x64 counter-based generator keyed by
the corpus seed; member ``k`` uses the stream ``Philox(key=seed).jumped(k)``
so members do not depend on how many draws earlier members consumed.
Spherical members are normalized to the volume of the unit ball by adding
a root-found constant to the radial deviation.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from . import fileio
from . import planar as pl
from . import setcalc as sc
from . import sphgrid as sg
from .setcalc import NearlySphericalSet
from .sphgrid import BALL_VOLUME, SPHERE_AREA, SpectralCoeffs

KINDS = ("random_bandlimited", "single_mode", "ellipsoidal", "counterexample", "planar_star", "planar_notched")
SIGMA_MAX = 0.4
VOLUME_TOL = 1e-12


class CorpusError(ValueError):
    pass


@dataclass
class CorpusSpec:
    kind: str
    count: int = 1
    seed: int = 0
    sigma: float = 0.05
    L: int = 16
    n: int = 3
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise CorpusError(f"unknown corpus kind {self.kind!r}")
        if self.count < 0:
            raise CorpusError("count must be nonnegative")
        if not 0 < self.sigma <= SIGMA_MAX:
            raise CorpusError(f"amplitude bound must lie in (0, {SIGMA_MAX}]")
        if self.n not in (2, 3):
            raise CorpusError("dimension must be 2 or 3")

    def to_dict(self) -> dict:
        return asdict(self)


def _rng(seed: int, k: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed).jumped(k))


def normalize_volume(E: NearlySphericalSet) -> NearlySphericalSet:
    """Add the constant ``c`` to ``u`` with ``int (1 + u + c)^n = n |B|``."""
    n = E.n
    fine = sg.oversampled(E.grid)
    r = 1.0 + fine.synth(E.coeffs.data)
    target = n * BALL_VOLUME[n]
    lo = -float(np.min(r)) * 0.999

    def gap(c):
        return fine.integrate((r + c) ** n) - target

    if gap(lo) > 0:
        raise CorpusError("volume normalization failed: set too large to shrink by a constant")
    hi = 1.0
    while gap(hi) < 0:
        hi *= 2.0
        if hi > 1e3:
            raise CorpusError("volume normalization failed")
    c = brentq(gap, lo, hi, xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=200)
    a = E.coeffs.data.copy()
    a[0] += c * math.sqrt(SPHERE_AREA[n])
    out = E.with_coeffs(a)
    if abs(sc.volume(out) - BALL_VOLUME[n]) > VOLUME_TOL:
        raise CorpusError("volume normalization did not reach 1e-12")
    return out


def _sigma_of(E: NearlySphericalSet) -> float:
    return max(E.sigma_bound["Linf"], E.sigma_bound["W1inf"])


def random_bandlimited(n: int, L: int, sigma: float, rng: np.random.Generator) -> NearlySphericalSet:
    """Gaussian coefficients with amplitude ``l^-3`` on degrees 1..L/2, scaled
    so that ``max(|u|, |Du|)`` is a random fraction in [0.5, 0.9] of sigma."""
    deg = sg.mode_degrees(n, L)
    amp = np.where((deg >= 1) & (deg <= L // 2), np.maximum(deg, 1).astype(float) ** -3.0, 0.0)
    a = rng.standard_normal(len(deg)) * amp
    frac = rng.uniform(0.5, 0.9)
    fine = sg.oversampled(sg.make_grid(n, L))
    size = max(np.max(np.abs(fine.synth(a))), np.sqrt(np.max(np.sum(fine.grad_frame(a) ** 2, axis=1))))
    return normalize_volume(NearlySphericalSet.from_coeffs(SpectralCoeffs(n, L, a * (frac * sigma / size))))


def single_mode(n: int, L: int, l: int, m: int, a: float) -> NearlySphericalSet:
    c = np.zeros(sg.n_modes(n, L))
    c[sg.mode_index(n, l, m)] = a
    return normalize_volume(NearlySphericalSet.from_coeffs(SpectralCoeffs(n, L, c)))


def ellipsoid_radius(semi_axes, dirs: np.ndarray) -> np.ndarray:
    s = np.asarray(semi_axes, dtype=float)
    return 1.0 / np.sqrt(np.sum((dirs / s[None, :]) ** 2, axis=1))


def ellipsoid(semi_axes, L: int) -> NearlySphericalSet:
    """Band-``L`` radial graph of the axis-aligned ellipsoid."""
    s = np.asarray(semi_axes, dtype=float)
    return NearlySphericalSet.from_function(lambda w: ellipsoid_radius(s, w) - 1.0, len(s), L)


def random_ellipsoid(n: int, L: int, sigma: float, rng: np.random.Generator) -> tuple:
    """Semi-axes ``exp(a e_i)`` with ``sum e_i = 0`` (volume of the ball)."""
    for _ in range(100):
        e = rng.uniform(-1.0, 1.0, n)
        e -= e.mean()
        e /= max(np.max(np.abs(e)), 1e-12)
        a = sigma * rng.uniform(0.3, 0.6)
        axes = np.exp(a * e)
        E = normalize_volume(ellipsoid(axes, L))
        if _sigma_of(E) <= sigma:
            return E, axes
    raise CorpusError("could not draw an ellipsoid within the amplitude bound")


def star_radii(k: int, amp: float, rng: np.random.Generator) -> np.ndarray:
    return 1.0 + amp * rng.uniform(-1.0, 1.0, k)


def random_star(rng: np.random.Generator, sigma: float) -> pl.Polygon:
    k = int(rng.integers(5, 41))
    amp = min(0.9, 2.0 * sigma) * rng.uniform(0.1, 1.0)
    return pl.star_polygon(star_radii(k, amp, rng), phase=float(rng.uniform(0, 2 * math.pi)))


def random_notched(rng: np.random.Generator) -> pl.Polygon:
    w = rng.uniform(1.0, 3.0)
    h = rng.uniform(0.5, 2.0)
    nw = rng.uniform(0.05, 0.5) * w
    nx = rng.uniform(0.02 * w, w - nw - 0.02 * w)
    nd = rng.uniform(0.1, 0.9) * h
    return pl.notched_rectangle(w, h, nx, nw, nd)


def generate(spec: CorpusSpec) -> list:
    """All members of the corpus, in index order."""
    out = []
    p = spec.params
    for k in range(spec.count):
        rng = _rng(spec.seed, k)
        if spec.kind == "random_bandlimited":
            out.append(random_bandlimited(spec.n, spec.L, spec.sigma, rng))
        elif spec.kind == "single_mode":
            ells = p.get("l", 2)
            ells = ells if isinstance(ells, list) else [ells]
            l = int(ells[k % len(ells)])
            E = single_mode(spec.n, spec.L, l, int(p.get("m", 0)), float(p.get("a", spec.sigma)))
            out.append(E)
        elif spec.kind == "ellipsoidal":
            out.append(random_ellipsoid(spec.n, spec.L, spec.sigma, rng)[0])
        elif spec.kind == "counterexample":
            from . import counterex

            thetas = p.get("theta", [0.3])
            thetas = thetas if isinstance(thetas, list) else [thetas]
            cfg = counterex.CounterexampleConfig(theta=float(thetas[k % len(thetas)]), L=spec.L)
            out.append(counterex.build_E_theta(cfg).E)
        elif spec.kind == "planar_star":
            out.append(random_star(rng, spec.sigma))
        else:
            out.append(random_notched(rng))
    for E in out:
        if isinstance(E, NearlySphericalSet) and spec.kind != "counterexample":
            if _sigma_of(E) > spec.sigma * (1 + 1e-12):
                raise CorpusError(f"generated set violates the amplitude bound {spec.sigma}")
    return out


def write_corpus(spec: CorpusSpec, directory) -> Path:
    """Write members as ``member_XXXX.json`` plus ``manifest.json``."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    members = generate(spec)
    names = []
    for k, obj in enumerate(members):
        name = f"member_{k:04d}.json"
        fileio.write_json(d / name, fileio.member_to_json(obj))
        names.append(name)
    manifest = {"spec": spec.to_dict(), "members": names, "generator": "numpy Philox4x64, stream jumped by member index"}
    path = d / "manifest.json"
    fileio.write_json(path, manifest)
    return path


def read_corpus(directory) -> tuple:
    """``(spec, members)`` from a corpus directory (or a manifest path)."""
    d = Path(directory)
    man = d if d.is_file() else d / "manifest.json"
    if not man.exists():
        raise CorpusError(f"no manifest at {man}")
    data = fileio.read_json(man)
    spec = CorpusSpec(**data["spec"])
    members = [fileio.member_from_json(fileio.read_json(man.parent / name)) for name in data["members"]]
    return spec, members
