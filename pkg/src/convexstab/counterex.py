"""
The non-convex family ``E_theta = B + u_theta`` used to show that the
profile ``f(t) = t`` cannot work in three dimensions.

``u_theta = theta^2 v_theta`` where ``v_theta`` is the planar witness

    g(x, y) = x y log(x^2 + y^2 + delta^2)

(bounded Laplacian ``8xy/(x^2+y^2)``, logarithmically unbounded Hessian)
carried to the north pole by the exponential chart, cut off smoothly at
the chart radius, projected on degree <= L and scaled so that
``||D^2 v_theta||_inf = theta^-3``. A constant then fixes the volume.

The norm targets ``||u||_{W^{1,inf}} <= theta^2``, ``||Delta u||_inf <= theta^2``
need a Hessian/Laplacian ratio of order ``theta^-3``, which the witness
only reaches at truncation radius ``exp(-c theta^-3)``. No band-limited
grid resolves that, so the measured norms are reported against the
brackets rather than assumed.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import corpus
from . import pipeline as pl
from . import setcalc as sc
from . import sphgrid as sg
from .setcalc import NearlySphericalSet
from .varmin import MinimizeConfig

CHART_RADIUS_MAX = 0.2


class CounterexampleError(ValueError):
    pass


@dataclass
class CounterexampleConfig:
    theta: float = 0.3
    chart_radius: float = 0.2
    lam: float = 0.1
    L: int = 32
    delta_c: float = 1.0
    max_iters: int = 200

    def __post_init__(self):
        if not 0 < self.theta <= 0.5:
            raise CounterexampleError("theta must lie in (0, 0.5]")
        if not 0 < self.chart_radius <= CHART_RADIUS_MAX:
            raise CounterexampleError(f"chart radius must lie in (0, {CHART_RADIUS_MAX}]")
        if not self.delta_c > 0:
            raise CounterexampleError("delta_c must be positive")

    @property
    def delta(self) -> float:
        """Truncation radius ``R exp(-c theta^-3)`` (underflows to 0 quickly)."""
        return self.chart_radius * math.exp(-self.delta_c * self.theta**-3)


# ----------------------------------------------------------------------
# planar witness and its transplant
# ----------------------------------------------------------------------


def planar_kernel(x, y, delta: float = 0.0):
    r2 = np.asarray(x) ** 2 + np.asarray(y) ** 2 + delta * delta
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(r2 > 0, x * y * np.log(r2), 0.0)


def planar_kernel_laplacian(x, y, delta: float = 0.0):
    """Closed form ``8xy/(r^2+d^2) + 4 d^2 xy/(r^2+d^2)^2``; equals ``8xy/r^2``
    for ``d = 0`` and is bounded by 4 + 1/2."""
    q = np.asarray(x) ** 2 + np.asarray(y) ** 2 + delta * delta
    return 8.0 * x * y / q + 4.0 * delta * delta * x * y / q**2


def cutoff(t):
    """C^3 step: 1 on [0, 0.3], 0 on [1, inf), septic smoothstep between."""
    x = np.clip((np.asarray(t, dtype=float) - 0.3) / 0.7, 0.0, 1.0)
    return 1.0 - x**4 * (35.0 - 84.0 * x + 70.0 * x * x - 20.0 * x**3)


def radial_profile(s, R: float, delta: float):
    """``h(s)`` with ``v = h(s) sin(2 phi)`` in geodesic polar coordinates;
    ``x y = s^2 sin(2 phi) / 2`` and the harmonic term ``-x y log(R^2+d^2)``
    makes the witness vanish to first order at the chart boundary."""
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        lg = np.log((s * s + delta * delta) / (R * R + delta * delta))
    h = 0.5 * s * s * np.where(s > 0, lg, 0.0) * cutoff(s / R)
    return np.where(s < R, h, 0.0)


def transplant(dirs: np.ndarray, R: float, delta: float) -> np.ndarray:
    """The witness on the sphere near the north pole (zero outside the chart)."""
    s = np.arccos(np.clip(dirs[:, 2], -1.0, 1.0))
    phi = np.arctan2(dirs[:, 1], dirs[:, 0])
    return radial_profile(s, R, delta) * np.sin(2.0 * phi)


# ----------------------------------------------------------------------
# E_theta
# ----------------------------------------------------------------------


@dataclass
class ThetaSet:
    E: NearlySphericalSet = field(repr=False)
    theta: float
    delta: float
    scale: float
    volume_constant: float
    Linf: float
    W1inf: float
    lap_inf: float
    hess_inf: float
    margin: float
    resolved: bool
    required_L: float
    brackets: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("E")
        b = d.pop("brackets")
        d.update({f"bracket_{k}": v for k, v in b.items()})
        return d


def dense_norms(E: NearlySphericalSet, factor: int = 2) -> dict:
    """Sup norms of ``u``, ``|Du|``, ``Delta u`` and ``|D^2 u|`` on a grid
    of band ``factor * L`` (dense samples of the band-limited field)."""
    g = sg.make_grid(E.n, min(factor * E.L, 512))
    a = E.coeffs.data
    u = g.synth(a)
    du = np.sqrt(np.sum(g.grad_frame(a) ** 2, axis=1))
    hess = g.hessian_frame(a)
    lap = np.trace(hess, axis1=1, axis2=2)
    hn = np.max(np.abs(np.linalg.eigvalsh(hess)), axis=1)
    return {
        "Linf": float(np.max(np.abs(u))),
        "W1inf": float(max(np.max(np.abs(u)), np.max(du))),
        "lap_inf": float(np.max(np.abs(lap))),
        "hess_inf": float(np.max(hn)),
    }


def check_brackets(theta: float, norms: dict, slack: float = 2.0) -> dict:
    t2, ti = theta**2, 1.0 / theta
    out = {
        "W1inf": norms["W1inf"] <= slack * t2,
        "laplacian": norms["lap_inf"] <= slack * t2,
        "hessian": ti / slack <= norms["hess_inf"] <= slack * ti,
    }
    out["all"] = all(out.values())
    return out


def build_E_theta(cfg: CounterexampleConfig) -> ThetaSet:
    """Band-``L`` set ``E_theta`` with ``||D^2 u||_inf = 1/theta`` on dense
    samples and volume ``|B|``; all three targets are measured and reported."""
    R, d, th = cfg.chart_radius, cfg.delta, cfg.theta
    base = NearlySphericalSet.from_function(lambda w: 1e-3 * transplant(w, R, d), 3, cfg.L)
    h_base = dense_norms(base)["hess_inf"] / 1e-3
    if not h_base > 0:
        raise CounterexampleError("witness vanishes at this resolution")
    k = th**-3 / h_base  # ||D^2 v_theta|| = theta^-3
    amp = th * th * k
    u0 = NearlySphericalSet.from_coeffs(base.coeffs * (amp / 1e-3))
    E = corpus.normalize_volume(u0)
    c = float(E.coeffs.data[0] - u0.coeffs.data[0]) / math.sqrt(sg.SPHERE_AREA[3])
    norms = dense_norms(E)
    spacing = math.pi / cfg.L
    return ThetaSet(
        E=E,
        theta=th,
        delta=d,
        scale=k,
        volume_constant=c,
        margin=sc.convexity_margin(E),
        resolved=d >= 3.0 * spacing,
        required_L=(3.0 * math.pi / d) if d > 0 else math.inf,
        brackets=check_brackets(th, norms),
        **norms,
    )


# ----------------------------------------------------------------------
# the experiment
# ----------------------------------------------------------------------


@dataclass
class ThetaRow:
    theta: float
    converged: bool
    rho: float
    lhs: float
    rhs: float
    slack: float
    symdiff_EF: float
    C_F: float
    C_B: float
    margin_E: float
    margin_F: float
    E_nonconvex: bool
    F_convex: bool
    el_residual: float
    norms: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.update({f"E_{k}": v for k, v in d.pop("norms").items()})
        return d


@dataclass
class SharpnessReport:
    lam: float
    rows: list
    excluded: int
    rho_decreasing: bool
    slope: float
    slope_positive: bool
    C_F_max: float
    C_B_max: float
    rho_below_lambda_at_smallest: bool
    log_profile_slack_ok: bool
    linear_profile_impossible: bool
    brackets_ok: bool
    all_nonconvex: bool

    def to_dict(self) -> dict:
        d = asdict(self)
        d["rows"] = [r.to_dict() for r in self.rows]
        return d


def _row(theta: float, E: NearlySphericalSet, lam: float, L: int, max_iters: int, norms: dict) -> ThetaRow:
    cfg = pl.PipelineConfig(lam=lam, sigma=pl.SIGMA_BAR, minimize=MinimizeConfig(lam=lam, L=L, max_iters=max_iters))
    res = pl.construct_F(E, cfg, strict=False)
    t = res.report.symdiff
    if not t > 1e-12:
        raise CounterexampleError("E and F coincide: the ratio is 0/0 (is E already convex?)")
    B = sc.ball(3, E.L)
    dB = sc.symdiff(E, B)
    C_B = (sc.perimeter(E) - sc.perimeter(B)) / (theta * dB) if dB > 0 else math.nan
    return ThetaRow(
        theta=theta,
        converged=res.converged,
        rho=res.report.lhs / t,
        lhs=res.report.lhs,
        rhs=res.report.rhs,
        slack=res.report.slack,
        symdiff_EF=t,
        C_F=res.report.lhs / (theta * t),
        C_B=C_B,
        margin_E=sc.convexity_margin(E),
        margin_F=res.report.convexity_margin,
        E_nonconvex=sc.convexity_margin(E) < 0,
        F_convex=res.report.convex,
        el_residual=res.minimize.el_residual,
        norms=norms,
    )


def sharpness_experiment(thetas=(0.3, 0.2, 0.1), lam: float = 0.1, L: int = 32, chart_radius: float = 0.2, sets=None, max_iters: int = 200) -> SharpnessReport:
    """Run the convexification on ``E_theta`` for each theta and test whether
    ``rho(theta) = (P(E) - P(F)) / |E delta F|`` vanishes linearly in theta.

    ``sets`` may supply ``(theta, E)`` pairs instead of building them.
    """
    rows, excluded, bracket_flags = [], 0, []
    if sets is None:
        sets = []
        for th in thetas:
            ts = build_E_theta(CounterexampleConfig(theta=th, chart_radius=chart_radius, lam=lam, L=L))
            bracket_flags.append(ts.brackets["all"])
            sets.append((th, ts.E, {k: getattr(ts, k) for k in ("Linf", "W1inf", "lap_inf", "hess_inf")}))
    else:
        sets = [(th, E, dense_norms(E)) for th, E in sets]
        bracket_flags = [check_brackets(th, nm)["all"] for th, _, nm in sets]
    for th, E, nm in sets:
        row = _row(th, E, lam, L, max_iters, nm)
        if row.converged and row.el_residual <= 1e-4:
            rows.append(row)
        else:
            excluded += 1
    rows.sort(key=lambda r: -r.theta)
    rho = np.array([r.rho for r in rows])
    th = np.array([r.theta for r in rows])
    decreasing = bool(len(rows) >= 2 and np.all(np.diff(rho) < 0))
    slope = float(th @ rho / (th @ th)) if len(rows) else math.nan
    below = bool(len(rows) and rows[-1].rho < lam)
    slack_ok = bool(all(r.slack >= -1e-8 for r in rows))
    return SharpnessReport(
        lam=lam,
        rows=rows,
        excluded=excluded,
        rho_decreasing=decreasing,
        slope=slope,
        slope_positive=bool(slope > 0),
        C_F_max=float(max((r.C_F for r in rows), default=math.nan)),
        C_B_max=float(max((r.C_B for r in rows), default=math.nan)),
        rho_below_lambda_at_smallest=below,
        log_profile_slack_ok=slack_ok,
        linear_profile_impossible=bool(below and slack_ok and all(r.E_nonconvex for r in rows)),
        brackets_ok=bool(bracket_flags and all(bracket_flags)),
        all_nonconvex=bool(rows and all(r.E_nonconvex for r in rows)),
    )


# ----------------------------------------------------------------------
# side checks
# ----------------------------------------------------------------------


def planar_kernel_check(samples: int = 2000, seed: int = 0, h: float = 1e-4) -> dict:
    """Finite-difference Laplacian of ``xy log(x^2+y^2)`` against the closed
    form ``8xy/(x^2+y^2)`` at random points of the unit disk."""
    rng = np.random.Generator(np.random.Philox(key=seed))
    r = np.sqrt(rng.uniform(0.01, 1.0, samples))
    a = rng.uniform(0, 2 * math.pi, samples)
    x, y = r * np.cos(a), r * np.sin(a)
    g = planar_kernel
    fd = (g(x + h, y) + g(x - h, y) + g(x, y + h) + g(x, y - h) - 4 * g(x, y)) / (h * h)
    closed = 8.0 * x * y / (x * x + y * y)
    return {
        "max_fd_error": float(np.max(np.abs(fd - closed))),
        "max_abs_laplacian": float(np.max(np.abs(closed))),
        "bounded_by_4": bool(np.all(np.abs(closed) <= 4.0 + 1e-12)),
    }


def transplant_consistency(R: float = 0.2, delta: float = 0.0, samples: int = 400, h: float = 1e-5) -> dict:
    """Laplace-Beltrami of the transplant versus the transplanted planar
    Laplacian on the chart. For ``f = h(s) sin(2 phi)`` these are
    ``h'' + cot(s) h' - 4h/sin^2 s`` and ``h'' + h'/s - 4h/s^2``."""
    s = np.linspace(R / samples, R * (1 - 1.0 / samples), samples)

    def prof(t):
        return radial_profile(t, R, delta)

    d1 = (prof(s + h) - prof(s - h)) / (2 * h)
    d2 = (prof(s + h) - 2 * prof(s) + prof(s - h)) / (h * h)
    hs = prof(s)
    sphere = d2 + d1 / np.tan(s) - 4 * hs / np.sin(s) ** 2
    plane = d2 + d1 / s - 4 * hs / s**2
    diff = float(np.max(np.abs(sphere - plane)))
    return {"max_difference": diff, "C": diff / R**2}


def F_integrand(s, z, n: int = 3):
    """``(1+s)^(n-1) sqrt(1 + |z|^2/(1+s)^2)``: the perimeter integrand."""
    z = np.atleast_1d(z)
    return (1.0 + s) ** (n - 1) * math.sqrt(1.0 + float(z @ z) / (1.0 + s) ** 2)


def F_convexity_check(n: int = 3, samples: int = 200, radius: float = 0.05, seed: int = 0, h: float = 1e-4) -> dict:
    """Finite-difference Hessian of the perimeter integrand at random points
    with ``|s| + |z| <= radius``: smallest eigenvalue and distance to the
    second-order expansion ``diag((n-1)(n-2), I)``."""
    rng = np.random.Generator(np.random.Philox(key=seed))
    dim = n
    model = np.diag([(n - 1) * (n - 2)] + [1.0] * (n - 1))
    min_eig, dev = math.inf, 0.0
    for _ in range(samples):
        p = rng.uniform(-1, 1, dim)
        p *= radius * rng.uniform(0, 1) / np.sum(np.abs(p))

        def F(q):
            return F_integrand(q[0], q[1:], n)

        Hm = np.zeros((dim, dim))
        for i in range(dim):
            for j in range(dim):
                ei, ej = np.eye(dim)[i] * h, np.eye(dim)[j] * h
                Hm[i, j] = (F(p + ei + ej) - F(p + ei - ej) - F(p - ei + ej) + F(p - ei - ej)) / (4 * h * h)
        Hm = 0.5 * (Hm + Hm.T)
        min_eig = min(min_eig, float(np.min(np.linalg.eigvalsh(Hm))))
        size = float(np.sum(np.abs(p)))
        if size > 0:
            dev = max(dev, float(np.max(np.abs(Hm - model))) / size)
    return {"min_eigenvalue": min_eig, "psd": min_eig >= -1e-10, "expansion_C": dev}
