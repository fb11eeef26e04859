"""
Penalized perimeter minimization over radial graphs:

    min { P(G) + 2 lambda f(|E delta G|) : |G| = |B| }.

The unknown is the band-limited radius ``1 + u_G`` of a graph about the
center of ``E``. The symmetric-difference term is smoothed with
``sqrt(x^2 + delta^2) - delta`` where ``x = r_G^n - r_E^n``. Iterates are
kept feasible by exact radial rescaling. Directions come from the
volume-constrained Newton system (Levenberg-damped when the reduced
Hessian is indefinite); steps are accepted by Armijo backtracking on the
true smoothed energy, so accepted energies never increase.

The Euler-Lagrange residual is the Galerkin one: the L^2 norm of the
degree <= L projection of

    (S_G + 2 lambda f'(|E delta G|) chi - mu) r_G^(n-1),

which is exactly the energy gradient in coefficient space minus its
volume-gradient component.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from . import setcalc as sc
from . import sphgrid as sg
from . import stabfun
from .setcalc import NearlySphericalSet
from .sphgrid import BALL_VOLUME, SPHERE_AREA, SpectralCoeffs

log = logging.getLogger(__name__)

TRUST_RADIUS = 0.4


class MinimizeError(RuntimeError):
    pass


@dataclass
class MinimizeConfig:
    lam: float = 0.1
    L: int = 16
    max_iters: int = 200
    grad_tol: float = 1e-6
    mollifier_delta: float = 1e-6
    seed: int = 0
    profile: str = "log"

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lambda must be positive")
        if not (1e-10 <= self.mollifier_delta <= 1e-6):
            raise ValueError("mollifier_delta must lie in [1e-10, 1e-6]")
        if self.profile not in ("log", "linear"):
            raise ValueError("profile must be 'log' or 'linear'")


def _profile(name):
    return stabfun.LOG_PROFILE if name == "log" else stabfun.LINEAR_PROFILE


@dataclass
class MinimizeResult:
    H: NearlySphericalSet
    energy: float
    perimeter_term: float
    penalty_term: float
    symdiff: float
    el_residual: float
    mu_hat: float
    iterations: int
    converged: bool
    delta: float
    trace: list = field(default_factory=list, repr=False)
    message: str = ""


class DiscreteEnergy:
    """Energy, gradient and Hessian in coefficient space for a fixed target
    radius field ``rE`` on the oversampled grid of band ``L``."""

    def __init__(self, n, L, rE, lam, delta, profile=stabfun.LOG_PROFILE):
        self.n = n
        self.L = L
        self.grid = sg.oversampled(sg.make_grid(n, L))
        self.w = self.grid.weights
        self.Y, self.G = _matrices(n, L)
        self._stack = np.concatenate([self.Y] + list(self.G), axis=0)
        self.rEn = rE**n
        self.lam = lam
        self.delta = delta
        self.profile = profile
        self.K = sg.n_modes(n, L)
        self.e0 = math.sqrt(SPHERE_AREA[n])
        self.target_volume = BALL_VOLUME[n]

    # pointwise pieces -------------------------------------------------
    def _fields(self, a):
        r = 1.0 + self.Y @ a
        p = np.stack([G @ a for G in self.G], axis=1)
        return r, p

    def _smooth_abs(self, x):
        d = self.delta
        s = np.sqrt(x * x + d * d)
        return s - d, x / s, d * d / s**3

    def volume(self, a):
        r = 1.0 + self.Y @ a
        return float(self.w @ r**self.n) / self.n

    def project(self, a):
        """Radially rescale so the volume equals that of the unit ball."""
        rho = (self.target_volume / self.volume(a)) ** (1.0 / self.n)
        out = rho * a
        out[0] += (rho - 1.0) * self.e0
        return out

    def terms(self, a):
        n = self.n
        r, p = self._fields(a)
        s = np.sqrt(r * r + np.sum(p * p, axis=1))
        per = float(self.w @ (r ** (n - 2) * s))
        T = float(self.w @ self._smooth_abs(r**n - self.rEn)[0]) / n
        return per, T

    def value(self, a):
        per, T = self.terms(a)
        return per + 2.0 * self.lam * self.profile.f(max(T, 0.0))

    def derivatives(self, a, hessian=True):
        n, w = self.n, self.w
        r, p = self._fields(a)
        p2 = np.sum(p * p, axis=1)
        s = np.sqrt(r * r + p2)
        rn2 = r ** (n - 2)
        per = float(w @ (rn2 * s))
        Fr = (n - 2) * r ** (n - 3) * s + r ** (n - 1) / s
        Fp = (rn2 / s)[:, None] * p
        x = r**n - self.rEn
        phi, dphi, ddphi = self._smooth_abs(x)
        T = float(w @ phi) / n
        fT = self.profile.f(max(T, 0.0))
        f1 = self.profile.f_prime(max(T, 0.0))
        f2 = self.profile.f_second(max(T, 0.0))
        Y = self.Y
        gP = Y.T @ (w * Fr) + sum(G.T @ (w * Fp[:, d]) for d, G in enumerate(self.G))
        dT_dr = dphi * r ** (n - 1)
        gT = Y.T @ (w * dT_dr)
        gV = Y.T @ (w * r ** (n - 1))
        out = {
            "perimeter": per,
            "T": T,
            "energy": per + 2.0 * self.lam * fT,
            "gP": gP,
            "gT": gT,
            "gV": gV,
            "f1": f1,
            "grad": gP + 2.0 * self.lam * f1 * gT,
        }
        if not hessian:
            return out
        Frr = (n - 2) * (n - 3) * r ** (n - 4) * s + 2 * (n - 2) * rn2 / s + rn2 * p2 / s**3
        Frp = ((n - 2) * r ** (n - 3) / s - r ** (n - 1) / s**3)[:, None] * p
        tr = ddphi * (n * r ** (n - 1)) ** 2 + dphi * n * (n - 1) * r ** (n - 2)
        # Hessian = J^T C J with J = [Y; G_1; ...] stacked by rows and C the
        # pointwise (n x n) block of second derivatives of the integrand
        m = n
        C = np.empty((m, m, len(w)))
        C[0, 0] = Frr + 2.0 * self.lam * f1 * tr / n
        for d in range(n - 1):
            C[0, d + 1] = C[d + 1, 0] = Frp[:, d]
            for e in range(n - 1):
                C[d + 1, e + 1] = rn2 / s * ((1.0 if d == e else 0.0) - p[:, d] * p[:, e] / (s * s))
        J = self._stack
        blocks = [Y] + list(self.G)
        Q = np.concatenate([sum((w * C[i, j])[:, None] * blocks[j] for j in range(m)) for i in range(m)], axis=0)
        HP = J.T @ Q
        HV = (Y * (w * (n - 1) * r ** (n - 2))[:, None]).T @ Y
        out["hess"] = HP + 2.0 * self.lam * f2 * np.outer(gT, gT)
        out["HV"] = HV
        return out


_MATRIX_CACHE: dict = {}


def _matrices(n, L):
    key = (n, L)
    if key not in _MATRIX_CACHE:
        fine = sg.oversampled(sg.make_grid(n, L))
        _MATRIX_CACHE[key] = fine.synthesis_matrices(L)
    return _MATRIX_CACHE[key]


def _multiplier(grad, gV):
    mu = float(grad @ gV) / float(gV @ gV)
    return mu, grad - mu * gV


def _target_radius(E: NearlySphericalSet, L: int, grid) -> np.ndarray:
    c = E.coeffs.resized(L) if E.L <= L else None
    if c is None:
        raise MinimizeError(f"data set has band {E.L} above the minimization band {L}")
    return 1.0 + grid.synth(c.data)


def minimize(E: NearlySphericalSet, cfg: MinimizeConfig, trace_path=None, init=None) -> MinimizeResult:
    """Minimize ``P(G) + 2 lambda f(|E delta G|)`` among band-limited radial
    graphs about the center of ``E`` with ``|G| = |B|``, starting from the
    unit ball."""
    n, L = E.n, cfg.L
    grid = sg.oversampled(sg.make_grid(n, L))
    rE = _target_radius(E, L, grid)
    prof = _profile(cfg.profile)
    en = DiscreteEnergy(n, L, rE, cfg.lam, cfg.mollifier_delta, prof)
    M = 1.0 + sg.laplace_eigenvalues(n, L)
    a = np.zeros(en.K) if init is None else en.project(np.asarray(init, dtype=float).copy())
    trace = []
    d = en.derivatives(a)
    mu, pg = _multiplier(d["grad"], d["gV"])
    res = float(np.linalg.norm(pg))
    trace.append(_trace_row(0, d, 0.0, res, cfg.lam, prof))
    converged = res <= cfg.grad_tol
    it = 0
    tau = 0.0
    message = ""
    stall = 0
    flat = 0
    while not converged and it < cfg.max_iters:
        it += 1
        H = d["hess"] - mu * d["HV"]
        gV = d["gV"]
        step = None
        tau = max(tau * 0.1, 0.0)
        for _ in range(40):
            Hr = H + tau * np.diag(M)
            kkt = np.zeros((en.K + 1, en.K + 1))
            kkt[: en.K, : en.K] = Hr
            kkt[: en.K, en.K] = gV
            kkt[en.K, : en.K] = gV
            rhs = np.concatenate([-pg, [0.0]])
            try:
                sol = np.linalg.solve(kkt, rhs)
            except np.linalg.LinAlgError:
                sol = None
            if sol is not None and np.all(np.isfinite(sol)):
                cand = sol[: en.K]
                curv = float(cand @ Hr @ cand)
                if curv > 0 and float(cand @ pg) < 0:
                    step = cand
                    break
            tau = max(10.0 * tau, 1e-8 * max(1.0, float(np.max(np.abs(np.diag(H))))))
        if step is None:
            step = -pg / M
        slope = float(step @ d["grad"])
        if slope >= 0:
            step = -pg / M
            slope = float(step @ d["grad"])
        E0 = d["energy"]
        alpha = 1.0
        accepted = False
        for _ in range(60):
            cand = en.project(a + alpha * step)
            ucand = en.Y @ cand
            if np.max(np.abs(ucand)) > TRUST_RADIUS:
                alpha *= 0.5
                continue
            val = en.value(cand)
            if val <= E0 + 1e-4 * alpha * slope:
                accepted = True
                break
            alpha *= 0.5
        if not accepted:
            # no decrease is possible along this direction at round-off level
            stall += 1
            if stall >= 2:
                message = "line search stalled"
                break
            tau = max(10.0 * tau, 1.0)
            continue
        stall = 0
        flat = flat + 1 if E0 - val <= 4 * np.finfo(float).eps * abs(E0) else 0
        a = cand
        d = en.derivatives(a)
        mu, pg = _multiplier(d["grad"], d["gV"])
        res = float(np.linalg.norm(pg))
        trace.append(_trace_row(it, d, alpha, res, cfg.lam, prof))
        converged = res <= cfg.grad_tol
        if flat >= 3 and not converged:
            message = "energy flat at round-off level"
            break
    if np.max(np.abs(en.Y @ a)) > TRUST_RADIUS:
        raise MinimizeError("iterate left the trust region |u| <= 0.4")
    H = NearlySphericalSet.from_coeffs(SpectralCoeffs(n, L, a), center=E.center)
    result = MinimizeResult(
        H=H,
        energy=d["energy"],
        perimeter_term=d["perimeter"],
        penalty_term=2.0 * cfg.lam * prof.f(max(d["T"], 0.0)),
        symdiff=d["T"],
        el_residual=res,
        mu_hat=mu,
        iterations=it,
        converged=converged,
        delta=cfg.mollifier_delta,
        trace=trace,
        message=message or ("converged" if converged else "iteration limit"),
    )
    if trace_path is not None:
        write_trace(trace, trace_path)
    return result


def _trace_row(it, d, alpha, res, lam, prof):
    return {
        "iter": it,
        "energy": d["energy"],
        "perimeter": d["perimeter"],
        "penalty": 2.0 * lam * prof.f(max(d["T"], 0.0)),
        "step": alpha,
        "residual": res,
    }


TRACE_COLUMNS = ["iter", "energy", "perimeter", "penalty", "step", "residual"]


def write_trace(trace, path):
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(TRACE_COLUMNS)
        for row in trace:
            wr.writerow([row["iter"]] + [repr(float(row[k])) for k in TRACE_COLUMNS[1:]])


def energy(G: NearlySphericalSet, E: NearlySphericalSet, lam: float, profile="log") -> float:
    """``P(G) + 2 lambda f(|E delta G|)`` with the exact set functionals."""
    prof = _profile(profile)
    return sc.perimeter(G) + 2.0 * lam * prof.f(sc.symdiff(G, E))


def el_residual(H: NearlySphericalSet, E: NearlySphericalSet, lam: float, delta: float = 1e-6, profile="log"):
    """Galerkin Euler-Lagrange residual of ``H`` for data ``E``; returns
    ``(residual, mu_hat)``."""
    if not np.allclose(H.center, E.center):
        E = sc.recenter(E, H.center, L=max(E.L, H.L))
    L = max(H.L, E.L)
    grid = sg.oversampled(sg.make_grid(H.n, L))
    rE = 1.0 + grid.synth(E.coeffs.resized(L).data)
    en = DiscreteEnergy(H.n, L, rE, lam, delta, _profile(profile))
    d = en.derivatives(H.coeffs.resized(L).data, hessian=False)
    mu, pg = _multiplier(d["grad"], d["gV"])
    return float(np.linalg.norm(pg)), mu
