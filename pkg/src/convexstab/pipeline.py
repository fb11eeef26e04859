"""
Convex comparison sets for nearly spherical data.

Given ``E`` with ``|E| = |B|``, the construction is

1. ``H``: minimizer of ``P(G) + 2 lambda f(|E delta G|)`` (see ``varmin``);
2. ``x0``: barycenter of ``H``; ``w``: deviation of ``H - x0``;
3. ``w_eps``: heat flow of ``w`` for time ``eps = |E delta H|^6``;
4. ``F = x0 + rho (B + w_eps)`` with ``rho`` restoring ``|F| = |E|``.

and the report checks ``P(E) - P(F) >= lambda f(|E delta F|)`` together
with the convexity and smoothness of ``F``.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np

from . import setcalc as sc
from . import sphgrid as sg
from . import stabfun
from .setcalc import NearlySphericalSet
from .sphgrid import SpectralCoeffs, SphericalField
from .varmin import MinimizeConfig, MinimizeResult, minimize

LAMBDA_BAR = 0.1
SIGMA_BAR = 0.05
VOLUME_TOL = 1e-8


class PipelineError(RuntimeError):
    pass


@dataclass
class PipelineConfig:
    lam: float = 0.1
    sigma: float = 0.05
    minimize: MinimizeConfig = field(default_factory=MinimizeConfig)
    epsilon_override: float | None = None
    profile: str = "log"

    def __post_init__(self):
        if not 0 < self.lam <= LAMBDA_BAR:
            raise ValueError(f"lambda must lie in (0, {LAMBDA_BAR}]")
        if not 0 < self.sigma <= SIGMA_BAR:
            raise ValueError(f"sigma must lie in (0, {SIGMA_BAR}]")
        if self.epsilon_override is not None and self.epsilon_override < 0:
            raise ValueError("epsilon_override must be nonnegative")
        if self.minimize.lam != self.lam or self.minimize.profile != self.profile:
            self.minimize = dataclasses.replace(self.minimize, lam=self.lam, profile=self.profile)


@dataclass
class StabilityReport:
    lam: float
    perimeter_E: float
    perimeter_F: float
    volume_E: float
    volume_F: float
    symdiff: float
    lhs: float
    rhs: float
    slack: float
    convexity_margin: float
    convex: bool
    v_Linf: float
    v_W1inf: float
    v_D2inf: float
    v_C1: float
    v_C2: float
    in_class: bool

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass
class PipelineResult:
    F: NearlySphericalSet
    H: NearlySphericalSet
    minimize: MinimizeResult = field(repr=False)
    x0: np.ndarray
    epsilon: float
    rho: float
    report: StabilityReport
    flags: list = field(default_factory=list)

    @property
    def lhs(self):
        return self.report.lhs

    @property
    def rhs(self):
        return self.report.rhs

    @property
    def slack(self):
        return self.report.slack

    @property
    def converged(self) -> bool:
        return self.minimize.converged

    def to_dict(self) -> dict:
        out = {
            "converged": self.minimize.converged,
            "iterations": self.minimize.iterations,
            "el_residual": self.minimize.el_residual,
            "mu_hat": self.minimize.mu_hat,
            "energy": self.minimize.energy,
            "x0": [float(x) for x in self.x0],
            "epsilon": self.epsilon,
            "rho": self.rho,
            "flags": list(self.flags),
        }
        out.update(self.report.to_dict())
        return out


def heat_smooth(w: SphericalField, epsilon: float) -> SphericalField:
    """Heat semigroup on the sphere: degree l is damped by exp(-l(l+n-2) eps)."""
    if epsilon < 0:
        raise ValueError("heat time must be nonnegative")
    c = sg.analyze(w)
    data = c.data * np.exp(-c.eigenvalues * epsilon)
    return sg.synthesize(SpectralCoeffs(c.n, c.L, data), w.grid)


def _profile(name):
    return stabfun.LOG_PROFILE if name == "log" else stabfun.LINEAR_PROFILE


def verify_inequality(E: NearlySphericalSet, F: NearlySphericalSet, lam: float, profile: str = "log") -> StabilityReport:
    """Evaluate ``P(E) - P(F) >= lambda f(|E delta F|)`` and the class
    conditions on ``F`` (convexity, ``||v||_{C^2} <= lambda``)."""
    vE, vF = sc.volume(E), sc.volume(F)
    if abs(vE - vF) > VOLUME_TOL * max(1.0, abs(vE)):
        raise PipelineError(f"volumes differ: |E| = {vE!r}, |F| = {vF!r}")
    pE, pF = sc.perimeter(E), sc.perimeter(F)
    t = sc.symdiff(E, F)
    lhs = pE - pF
    rhs = lam * _profile(profile).f(t)
    margin = sc.convexity_margin(F)
    nv = sc.sobolev_c_norms(F.u)
    c1 = nv["Linf"] + nv["W1inf"]
    c2 = c1 + nv["C2"]
    return StabilityReport(
        lam=lam,
        perimeter_E=pE,
        perimeter_F=pF,
        volume_E=vE,
        volume_F=vF,
        symdiff=t,
        lhs=lhs,
        rhs=rhs,
        slack=lhs - rhs,
        convexity_margin=margin,
        convex=margin > 0,
        v_Linf=nv["Linf"],
        v_W1inf=nv["W1inf"],
        v_D2inf=nv["C2"],
        v_C1=c1,
        v_C2=c2,
        in_class=bool(margin > 0 and c2 <= lam),
    )


def construct_F(E: NearlySphericalSet, cfg: PipelineConfig | None = None, strict: bool = True) -> PipelineResult:
    """Build the convex comparison set ``F`` for ``E``.

    With ``strict`` the data must be ``sigma``-nearly spherical; otherwise
    the amplitude is only recorded in the flags.
    """
    cfg = PipelineConfig() if cfg is None else cfg
    amp = max(E.sigma_bound["W1inf"], E.sigma_bound["Linf"])
    over = amp > cfg.sigma * (1.0 + 1e-9)
    if over and strict:
        raise PipelineError(
            f"data is not {cfg.sigma}-nearly spherical "
            f"(|u| = {E.sigma_bound['Linf']:.3g}, |Du| = {E.sigma_bound['W1inf']:.3g})"
        )
    mres = minimize(E, cfg.minimize)
    H = mres.H
    flags = []
    if over:
        flags.append(f"data amplitude {amp:.3g} exceeds sigma = {cfg.sigma}")
    if not mres.converged:
        flags.append(f"minimizer not converged: {mres.message}")
    x0 = sc.barycenter(H)
    Hx = sc.recenter(H, x0, L=H.L)
    t_EH = sc.symdiff(E, H)
    eps = t_EH**6 if cfg.epsilon_override is None else float(cfg.epsilon_override)
    w_eps = heat_smooth(Hx.u, eps)
    F1 = NearlySphericalSet(np.zeros(E.n), w_eps)
    F2, rho = sc.rescale_volume(F1, sc.volume(E))
    F = F2.translated(x0)
    report = verify_inequality(E, F, cfg.lam, cfg.profile)
    if not report.convex:
        flags.append(f"F is not convex (margin {report.convexity_margin:.3g})")
    return PipelineResult(F=F, H=H, minimize=mres, x0=x0, epsilon=eps, rho=rho, report=report, flags=flags)


def c1_bound_constant(result: PipelineResult, sigma: float, lam: float) -> float:
    """Measured ``C`` in ``||v||_{C^1} <= C lambda / |log sigma|``."""
    return result.report.v_C1 * abs(math.log(sigma)) / lam
