"""
Lebesgue and Sobolev norms on the sphere.

W^{1,2} and its dual W^{-1,2} are spectral: with harmonic coefficients a_k
and eigenvalues lambda_k,

    ||f||_{W^{1,2}}^2  = sum (1 + lambda_k) a_k^2,
    ||f||_{W^{-1,2}}^2 = sum a_k^2 / (1 + lambda_k).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import sphgrid as sg
from .setcalc import NearlySphericalSet, area_element
from .sphgrid import SphericalField


class NormError(ValueError):
    pass


def _coeffs(f: SphericalField):
    return sg.analyze(f)


def l2_norm(f: SphericalField) -> float:
    return float(np.linalg.norm(_coeffs(f).data))


def w12_norm(f: SphericalField) -> float:
    c = _coeffs(f)
    return float(math.sqrt(np.sum((1.0 + c.eigenvalues) * c.data**2)))


def wm12_norm(f: SphericalField) -> float:
    c = _coeffs(f)
    return float(math.sqrt(np.sum(c.data**2 / (1.0 + c.eigenvalues))))


def gradient_l2_squared(f: SphericalField) -> float:
    c = _coeffs(f)
    return float(np.sum(c.eigenvalues * c.data**2))


def lp_norm(f: SphericalField, p: float) -> float:
    g = f.grid
    if math.isinf(p):
        return float(np.max(np.abs(f.samples)))
    return float(g.integrate(np.abs(f.samples) ** p) ** (1.0 / p))


MU_MAX_ITERS = 200


def inf_mu(f: SphericalField, norm: str = "Wm12", p: float | None = None):
    """Minimize ``||f - mu||`` over constants; returns ``(mu_star, value)``.

    ``norm`` is ``"Wm12"``, ``"L2"``, ``"Linf"`` or ``"Lp"`` (needs ``p``).
    For the two spectral norms constants only live in degree 0, so the
    optimum is the mean; for L^inf it is the midrange; for other p the
    monotone derivative of ``int |f - mu|^p`` is root-found.
    """
    area = f.grid.area
    if norm in ("Wm12", "L2"):
        c = _coeffs(f)
        mu = c.data[0] / math.sqrt(area)
        rest = c.data.copy()
        rest[0] = 0.0
        if norm == "L2":
            return float(mu), float(np.linalg.norm(rest))
        return float(mu), float(math.sqrt(np.sum(rest**2 / (1.0 + c.eigenvalues))))
    s = f.samples
    if norm == "Linf" or (norm == "Lp" and p is not None and math.isinf(p)):
        hi, lo = float(np.max(s)), float(np.min(s))
        return 0.5 * (hi + lo), 0.5 * (hi - lo)
    if norm != "Lp":
        raise NormError(f"unknown norm {norm!r}")
    if p is None or not p > 1:
        raise NormError("L^p infimum needs p in (1, inf]")
    return lp_infimum(s, f.grid.weights, p)


def lp_infimum(values: np.ndarray, weights: np.ndarray, p: float):
    """``min_mu (sum w |values - mu|^p)^(1/p)`` for ``p > 1``; returns
    ``(mu_star, value)``. The derivative in mu is monotone, so its root is
    bracketed by the range of ``values``."""
    s = np.asarray(values, dtype=float)
    w = np.asarray(weights, dtype=float)
    lo, hi = float(np.min(s)), float(np.max(s))
    if math.isinf(p):
        return 0.5 * (hi + lo), 0.5 * (hi - lo)
    if hi - lo == 0.0:
        return lo, 0.0

    def dphi(mu):
        d = s - mu
        return -float(np.dot(w, np.abs(d) ** (p - 1.0) * np.sign(d)))

    try:
        mu = brentq(dphi, lo, hi, xtol=1e-13, rtol=4 * np.finfo(float).eps, maxiter=MU_MAX_ITERS)
    except RuntimeError as exc:
        raise NormError(f"1D search for mu did not converge: {exc}") from exc
    return float(mu), float(np.dot(w, np.abs(s - mu) ** p) ** (1.0 / p))


def lp_norm_on_boundary(E: NearlySphericalSet, f: SphericalField, p: float) -> float:
    """``(int_{dE} |f(graph^{-1})|^p)^(1/p)`` with the exact area element."""
    fine = sg.oversampled(E.grid)
    if f.grid is fine:
        vals = f.samples
    else:
        vals = sg.resample(f, fine).samples
    if math.isinf(p):
        return float(np.max(np.abs(vals)))
    r = 1.0 + fine.synth(E.coeffs.data)
    J = area_element(r, fine.grad_frame(E.coeffs.data), E.n)
    return float(fine.integrate(J * np.abs(vals) ** p) ** (1.0 / p))


@dataclass
class NormReport:
    L2: float
    W12: float
    Wm12: float
    Lp: dict = field(default_factory=dict)
    optimal_mu: dict = field(default_factory=dict)


def norm_report(f: SphericalField, ps=(2.0, 4.0)) -> NormReport:
    rep = NormReport(l2_norm(f), w12_norm(f), wm12_norm(f))
    for name in ("L2", "Wm12", "Linf"):
        rep.optimal_mu[name] = inf_mu(f, name)[0]
    for p in ps:
        rep.Lp[p] = lp_norm(f, p)
        rep.optimal_mu[f"L{p:g}"] = inf_mu(f, "Lp", p)[0]
    return rep
