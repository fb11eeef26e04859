"""
Nearly spherical sets ``center + (B + u)`` and their geometric functionals.

A set stores its radial deviation ``u`` as band-limited harmonic
coefficients on a base grid of band ``L``. Every nonlinear pointwise
expression (powers, square roots, logarithms) is evaluated on the
3/2-oversampled companion grid; all sup norms are "discrete sups" over
those oversampled nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import sphgrid as sg
from .sphgrid import BALL_VOLUME, SPHERE_AREA, SpectralCoeffs, SphereGrid, SphericalField


class SetError(ValueError):
    """A set violates its invariants or an operation cannot be carried out."""


U_MAX = 0.5
RECENTER_MAX_ITERS = 50
RECENTER_TOL = 1e-12
SYMDIFF_BAND_FACTOR = 4
SYMDIFF_BAND_MIN = 64
SYMDIFF_BAND_MAX = 128


@dataclass(frozen=True, eq=False)
class NearlySphericalSet:
    """The star-shaped body ``center + {t w (1 + u(w)) : 0 <= t < 1}``."""

    center: np.ndarray
    u: SphericalField
    sigma_bound: dict = field(default_factory=dict)

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float).reshape(-1)
        if c.shape != (self.u.grid.n,):
            raise SetError(f"center must have {self.u.grid.n} components")
        c.setflags(write=False)
        object.__setattr__(self, "center", c)
        if self.u.coeffs is None:
            coeffs = sg.analyze(self.u)
            object.__setattr__(self, "u", SphericalField(self.u.grid, self.u.samples, coeffs))
        fine = sg.oversampled(self.grid)
        vals = fine.synth(self.coeffs.data)
        grad = fine.grad_frame(self.coeffs.data)
        sup_u = float(np.max(np.abs(vals)))
        sup_du = float(np.sqrt(np.max(np.sum(grad**2, axis=1))))
        if not np.all(np.isfinite(vals)):
            raise SetError("radial deviation is not finite")
        if sup_u > U_MAX + 1e-12:
            raise SetError(f"sup |u| = {sup_u:.4g} exceeds 1/2")
        object.__setattr__(self, "sigma_bound", {"Linf": sup_u, "W1inf": sup_du})

    @property
    def grid(self) -> SphereGrid:
        return self.u.grid

    @property
    def n(self) -> int:
        return self.u.grid.n

    @property
    def L(self) -> int:
        return self.u.grid.L

    @property
    def coeffs(self) -> SpectralCoeffs:
        return self.u.coeffs

    @classmethod
    def from_coeffs(cls, coeffs: SpectralCoeffs, center=None, L: int | None = None):
        L = coeffs.L if L is None else L
        grid = sg.make_grid(coeffs.n, L)
        c = coeffs.resized(L)
        center = np.zeros(coeffs.n) if center is None else center
        return cls(center, sg.synthesize(c, grid))

    @classmethod
    def from_function(cls, fn, n: int, L: int, center=None):
        """Project the radial deviation ``fn(omega)`` (omega: (N, n) unit
        vectors) onto harmonics of degree <= L."""
        grid = sg.make_grid(n, L)
        fine = sg.oversampled(grid)
        a = fine.analyze_array(fn(fine.nodes), L)
        return cls.from_coeffs(SpectralCoeffs(n, L, a), center)

    def radius_on(self, grid: SphereGrid) -> np.ndarray:
        return 1.0 + grid.synth(self.coeffs.data)

    def with_coeffs(self, data: np.ndarray, center=None) -> "NearlySphericalSet":
        center = self.center if center is None else center
        return NearlySphericalSet(center, sg.synthesize(SpectralCoeffs(self.n, self.L, data), self.grid))

    def translated(self, z) -> "NearlySphericalSet":
        return NearlySphericalSet(self.center + np.asarray(z, dtype=float), self.u)


def ball(n: int, L: int, radius: float = 1.0, center=None) -> NearlySphericalSet:
    a = np.zeros(sg.n_modes(n, L))
    a[0] = (radius - 1.0) * math.sqrt(SPHERE_AREA[n])
    return NearlySphericalSet.from_coeffs(SpectralCoeffs(n, L, a), center)


def _fine(E: NearlySphericalSet) -> SphereGrid:
    return sg.oversampled(E.grid)


def _radius_and_grad(E: NearlySphericalSet, grid: SphereGrid | None = None):
    grid = _fine(E) if grid is None else grid
    r = 1.0 + grid.synth(E.coeffs.data)
    Dr = grid.grad_frame(E.coeffs.data)
    return grid, r, Dr


# ----------------------------------------------------------------------
# volume, perimeter, barycenter
# ----------------------------------------------------------------------


def volume(E: NearlySphericalSet) -> float:
    """Lebesgue volume ``(1/n) int (1+u)^n``."""
    g = _fine(E)
    r = 1.0 + g.synth(E.coeffs.data)
    return g.integrate(r**E.n) / E.n


def area_element(r: np.ndarray, Dr: np.ndarray, n: int) -> np.ndarray:
    """Boundary area element over the sphere, ``r^(n-2) sqrt(r^2 + |D r|^2)``."""
    return r ** (n - 2) * np.sqrt(r * r + np.sum(Dr * Dr, axis=1))


def perimeter(E: NearlySphericalSet) -> float:
    g, r, Dr = _radius_and_grad(E)
    return g.integrate(area_element(r, Dr, E.n))


def barycenter(E: NearlySphericalSet) -> np.ndarray:
    g = _fine(E)
    r = 1.0 + g.synth(E.coeffs.data)
    n = E.n
    vol = g.integrate(r**n) / n
    moment = (g.weights * r ** (n + 1) / (n + 1)) @ g.nodes
    return E.center + moment / vol


# ----------------------------------------------------------------------
# recentering and rescaling
# ----------------------------------------------------------------------


def _boundary_hits(E: NearlySphericalSet, shift: np.ndarray, dirs: np.ndarray) -> np.ndarray:
    """For each unit ``w`` in ``dirs`` find t > 0 with ``t w`` on the boundary
    of ``shift + (B + u)`` (the body recentred so the query origin is 0)."""
    a = E.coeffs.data
    g = E.grid
    c = np.asarray(shift, dtype=float)
    # bracket: origin interior needs |c| < min radius
    rmin = 1.0 - E.sigma_bound["Linf"]
    rmax = 1.0 + E.sigma_bound["Linf"]
    if np.linalg.norm(c) >= rmin:
        raise SetError("origin is not interior after the shift")
    lo = np.zeros(dirs.shape[0])
    hi = np.full(dirs.shape[0], rmax + np.linalg.norm(c) + 1e-6)
    t = np.ones(dirs.shape[0])
    active = np.arange(dirs.shape[0])
    for it in range(RECENTER_MAX_ITERS):
        w, ta = dirs[active], t[active]
        p = ta[:, None] * w - c
        rho = np.linalg.norm(p, axis=1)
        d = p / rho[:, None]
        val, grad = g.evaluate(a, d, with_grad=True)
        gfun = rho - (1.0 + val)
        # d'(t) = (w - (w.d) d) / rho
        wd = np.sum(w * d, axis=1)
        dd = (w - wd[:, None] * d) / rho[:, None]
        gder = wd - np.sum(grad * dd, axis=1)
        inside = gfun < 0
        la = np.where(inside, ta, lo[active])
        ha = np.where(inside, hi[active], ta)
        lo[active], hi[active] = la, ha
        done = np.abs(gfun) < RECENTER_TOL
        step = np.where(gder > 0, ta - gfun / np.where(gder > 0, gder, 1.0), np.nan)
        bad = ~np.isfinite(step) | (step < la) | (step > ha)
        t[active] = np.where(done, ta, np.where(bad, 0.5 * (la + ha), step))
        active = active[~done]
        if active.size == 0:
            return t
    raise SetError(f"boundary root-find did not converge in {RECENTER_MAX_ITERS} iterations")


def recenter(E: NearlySphericalSet, z, L: int | None = None) -> NearlySphericalSet:
    """The set ``E - z`` written as a radial graph about the origin.

    The new radius is found per node direction by safeguarded Newton on the
    original parametrization, then projected on degree <= L (default: the
    band of ``E``).
    """
    z = np.asarray(z, dtype=float)
    L = E.L if L is None else L
    shift = E.center - z
    if np.linalg.norm(shift) >= (1.0 - E.sigma_bound["Linf"]) / 2.0 and np.linalg.norm(shift) > 0:
        raise SetError(
            f"shift |{np.linalg.norm(shift):.3g}| too large for a star-shaped re-graphing"
        )
    target = sg.make_grid(E.n, L)
    fine = sg.oversampled(target)
    if np.linalg.norm(shift) == 0.0 and L == E.L:
        return NearlySphericalSet(np.zeros(E.n), E.u)
    t = _boundary_hits(E, shift, fine.nodes)
    a = fine.analyze_array(t - 1.0, L)
    return NearlySphericalSet.from_coeffs(SpectralCoeffs(E.n, L, a))


def rescale_volume(E: NearlySphericalSet, target: float):
    """Scale ``E`` about its center to volume ``target``; returns (set, rho)."""
    if not target > 0:
        raise SetError("target volume must be positive")
    rho = (target / volume(E)) ** (1.0 / E.n)
    a = rho * E.coeffs.data
    a[0] += (rho - 1.0) * math.sqrt(SPHERE_AREA[E.n])
    try:
        out = E.with_coeffs(a)
    except SetError as exc:
        raise SetError(f"rescaling by rho={rho:.6g} leaves the nearly spherical class: {exc}") from exc
    return out, rho


# ----------------------------------------------------------------------
# symmetric difference
# ----------------------------------------------------------------------


def symdiff(E: NearlySphericalSet, F: NearlySphericalSet) -> float:
    """``|E delta F| = (1/n) int |r_E^n - r_F^n|`` about a common center."""
    if E.n != F.n:
        raise SetError("dimension mismatch")
    if not np.allclose(E.center, F.center, rtol=0.0, atol=0.0):
        try:
            F = recenter(F, E.center, L=max(E.L, F.L))
        except SetError as exc:
            raise SetError(f"no common star center: {exc}") from exc
    L = max(E.L, F.L)
    # |.| has a kink on the contact set, where Gauss quadrature is only
    # O(N^-2) accurate, so integrate on a dense grid
    g = sg.make_grid(E.n, min(max(SYMDIFF_BAND_FACTOR * L, SYMDIFF_BAND_MIN), SYMDIFF_BAND_MAX))
    rE = 1.0 + g.synth(E.coeffs.data)
    rF = 1.0 + g.synth(F.coeffs.data)
    return g.integrate(np.abs(rE**E.n - rF**E.n)) / E.n


# ----------------------------------------------------------------------
# curvature
# ----------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CurvatureField:
    """Mean curvature read on the sphere and the log-radius ``xi``."""

    S: SphericalField
    xi: SphericalField
    tail_ratio: float
    confident: bool


TAIL_TOL = 1e-6


def spectral_tail(E: NearlySphericalSet) -> float:
    """Energy fraction of ``xi = log(1+u)`` above degree L/2."""
    fine = _fine(E)
    xi = np.log(1.0 + fine.synth(E.coeffs.data))
    c = fine.analyze_array(xi, fine.L)
    deg = sg.mode_degrees(E.n, fine.L)
    total = float(np.sum(c * c))
    if total == 0.0:
        return 0.0
    return float(np.sum(c[deg > E.L / 2] ** 2) / total)


def mean_curvature(E: NearlySphericalSet) -> CurvatureField:
    """Mean curvature through the weak identity

        e^xi S = (n-1)/sqrt(1+|D xi|^2) - div_tau(D xi / sqrt(1+|D xi|^2)),

    the divergence taken in the weak (Galerkin) sense on the oversampled
    grid. The flag ``confident`` is false when ``xi`` carries more than
    1e-6 of its energy above degree L/2.
    """
    g, r, Dr = _radius_and_grad(E)
    xi = np.log(r)
    Dxi = Dr / r[:, None]
    q = np.sqrt(1.0 + np.sum(Dxi * Dxi, axis=1))
    V = Dxi / q[:, None]
    div = -g.synth(g.adjoint_grad(V))
    S = ((E.n - 1) / q - div) / r
    tail = spectral_tail(E)
    return CurvatureField(SphericalField(g, S), SphericalField(g, xi), tail, tail <= TAIL_TOL)


def _fundamental_forms_3d(E: NearlySphericalSet, g: SphereGrid):
    a = E.coeffs.data
    r = 1.0 + g.synth(a)
    rt, rp = g.synth(a, "t"), g.synth(a, "p")
    rtt, rtp, rpp = g.synth(a, "tt"), g.synth(a, "tp"), g.synth(a, "pp")
    st = np.repeat(g.st, g.shape[1])
    ct = np.repeat(g.ct, g.shape[1])
    frame = g.frame()
    et, ep = frame[:, 0, :], frame[:, 1, :]
    w = g.nodes
    Xt = rt[:, None] * w + r[:, None] * et
    Xp = rp[:, None] * w + (r * st)[:, None] * ep
    Xtt = rtt[:, None] * w + 2 * rt[:, None] * et - r[:, None] * w
    Xtp = rtp[:, None] * w + (rt * st)[:, None] * ep + rp[:, None] * et + (r * ct)[:, None] * ep
    Xpp = (
        rpp[:, None] * w
        + (2 * rp * st)[:, None] * ep
        - (r * st)[:, None] * (st[:, None] * w + ct[:, None] * et)
    )
    N = np.cross(Xt, Xp)
    N /= np.linalg.norm(N, axis=1)[:, None]
    I = np.stack(
        [
            np.stack([np.sum(Xt * Xt, 1), np.sum(Xt * Xp, 1)], -1),
            np.stack([np.sum(Xt * Xp, 1), np.sum(Xp * Xp, 1)], -1),
        ],
        -2,
    )
    II = -np.stack(
        [
            np.stack([np.sum(Xtt * N, 1), np.sum(Xtp * N, 1)], -1),
            np.stack([np.sum(Xtp * N, 1), np.sum(Xpp * N, 1)], -1),
        ],
        -2,
    )
    return I, II


def principal_curvatures(E: NearlySphericalSet, grid: SphereGrid | None = None) -> np.ndarray:
    """Principal curvatures at the nodes (outward normal, sphere positive).

    Shape (N, n-1), ascending per node. Computed from the first and second
    fundamental forms of ``w -> (1+u(w)) w``.
    """
    g = _fine(E) if grid is None else grid
    if E.n == 2:
        a = E.coeffs.data
        r = 1.0 + g.synth(a)
        r1, r2 = g.synth(a, "p"), g.synth(a, "pp")
        k = (r * r + 2 * r1 * r1 - r * r2) / (r * r + r1 * r1) ** 1.5
        return k[:, None]
    I, II = _fundamental_forms_3d(E, g)
    # symmetric generalized eigenproblem II v = k I v, via Cholesky of I
    Lc = np.linalg.cholesky(I)
    Li = np.linalg.inv(Lc)
    M = Li @ II @ np.swapaxes(Li, 1, 2)
    return np.linalg.eigvalsh(M)


def mean_curvature_strong(E: NearlySphericalSet, grid: SphereGrid | None = None) -> np.ndarray:
    """Pointwise sum of principal curvatures (cross-check for the weak form)."""
    return np.sum(principal_curvatures(E, grid), axis=1)


def convexity_margin(E: NearlySphericalSet, grid: SphereGrid | None = None) -> float:
    """Minimum principal curvature over the oversampled nodes; positive means
    uniformly convex up to grid resolution."""
    return float(np.min(principal_curvatures(E, grid)))


# ----------------------------------------------------------------------
# norms and isoperimetric sanity check
# ----------------------------------------------------------------------


def sobolev_c_norms(u, grid: SphereGrid | None = None) -> dict:
    """Discrete sup norms of ``u``, ``|D_tau u|`` and the operator norm of
    ``D^2_tau u`` over the oversampled nodes (or ``grid``)."""
    if isinstance(u, NearlySphericalSet):
        u = u.u
    c = sg.analyze(u)
    g = sg.oversampled(u.grid) if grid is None else grid
    vals = g.synth(c.data)
    grad = g.grad_frame(c.data)
    hess = g.hessian_frame(c.data)
    if g.n == 2:
        hnorm = np.abs(hess[:, 0, 0])
    else:
        hnorm = np.max(np.abs(np.linalg.eigvalsh(hess)), axis=1)
    return {
        "Linf": float(np.max(np.abs(vals))),
        "W1inf": float(np.sqrt(np.max(np.sum(grad**2, axis=1)))),
        "C2": float(np.max(hnorm)),
    }


def isoperimetric_check(E: NearlySphericalSet) -> dict:
    """Isoperimetric deficit against the equal-volume ball and the asymmetry
    ``|E delta (x0 + B_r)|`` with ``x0`` the barycenter (an upper bound for
    the Fraenkel asymmetry)."""
    n = E.n
    vol = volume(E)
    r = (vol / BALL_VOLUME[n]) ** (1.0 / n)
    deficit = perimeter(E) - SPHERE_AREA[n] * r ** (n - 1)
    x0 = barycenter(E)
    Br = ball(n, E.L, r, x0)
    asym = symdiff(E, Br)
    return {"deficit": deficit, "asymmetry": asym, "radius": r, "barycenter": x0.tolist()}


def isoperimetric_lower_bound(vol: float, n: int) -> float:
    return n * BALL_VOLUME[n] ** (1.0 / n) * vol ** ((n - 1.0) / n)
