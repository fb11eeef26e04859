"""
Discretization of the unit sphere S^{n-1} for n in {2, 3}.

Real spherical harmonics, orthonormal for the unnormalized surface measure,
are ordered by degree ``l`` ascending and, inside a degree, by order ``m``
ascending. For n = 3 the order runs over ``-l..l`` and the flat index is
``l*l + l + m``; ``m > 0`` is ``sqrt(2) P_l^m(cos t) cos(m p)`` and
``m < 0`` is ``sqrt(2) P_l^|m|(cos t) sin(|m| p)``. For n = 2 degree 0
carries one mode and every degree ``l >= 1`` carries ``m = -1`` (sine) and
``m = +1`` (cosine), flat index ``2l - 1`` and ``2l``.

Transforms are direct (separable) sums; no fast transform is attempted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import _accel

SPHERE_AREA = {2: 2.0 * math.pi, 3: 4.0 * math.pi}
BALL_VOLUME = {2: math.pi, 3: 4.0 * math.pi / 3.0}


class GridError(ValueError):
    """Unsupported dimension, band limit or mismatched grid/coefficients."""


def n_modes(n: int, L: int) -> int:
    return 2 * L + 1 if n == 2 else (L + 1) ** 2


def mode_index(n: int, l: int, m: int) -> int:
    if n == 2:
        if l == 0:
            return 0
        return 2 * l - 1 if m < 0 else 2 * l
    return l * l + l + m


def mode_degrees(n: int, L: int) -> np.ndarray:
    if n == 2:
        return np.concatenate([[0], np.repeat(np.arange(1, L + 1), 2)])
    return np.concatenate([np.full(2 * l + 1, l) for l in range(L + 1)])


def mode_orders(n: int, L: int) -> np.ndarray:
    if n == 2:
        return np.concatenate([[0], np.tile([-1, 1], L)])
    return np.concatenate([np.arange(-l, l + 1) for l in range(L + 1)])


def laplace_eigenvalues(n: int, L: int) -> np.ndarray:
    """lambda_l = l (l + n - 2) for every mode, in flat order."""
    l = mode_degrees(n, L).astype(float)
    return l * (l + n - 2)


def band_limit_of(n: int, K: int) -> int:
    if n == 2:
        L = (K - 1) // 2
        ok = 2 * L + 1 == K
    else:
        L = int(round(math.sqrt(K))) - 1
        ok = (L + 1) ** 2 == K
    if not ok:
        raise GridError(f"{K} coefficients do not form a full band for n={n}")
    return L


@dataclass(frozen=True, eq=False)
class SpectralCoeffs:
    """Real harmonic coefficients up to band limit ``L``."""

    n: int
    L: int
    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.shape != (n_modes(self.n, self.L),):
            raise GridError(
                f"expected {n_modes(self.n, self.L)} coefficients for n={self.n}, L={self.L}, got {data.shape}"
            )
        object.__setattr__(self, "data", data)

    @property
    def degrees(self) -> np.ndarray:
        return mode_degrees(self.n, self.L)

    @property
    def eigenvalues(self) -> np.ndarray:
        return laplace_eigenvalues(self.n, self.L)

    def block(self, l: int) -> np.ndarray:
        return self.data[self.degrees == l]

    def resized(self, L: int) -> "SpectralCoeffs":
        """Zero-pad or truncate to band limit ``L``."""
        out = np.zeros(n_modes(self.n, L))
        k = min(out.size, self.data.size)
        out[:k] = self.data[:k]
        return SpectralCoeffs(self.n, L, out)

    def __add__(self, other):
        _check_same_band(self, other)
        return SpectralCoeffs(self.n, self.L, self.data + other.data)

    def __sub__(self, other):
        _check_same_band(self, other)
        return SpectralCoeffs(self.n, self.L, self.data - other.data)

    def __mul__(self, c):
        return SpectralCoeffs(self.n, self.L, self.data * float(c))

    __rmul__ = __mul__


def _check_same_band(a, b):
    if a.n != b.n or a.L != b.L:
        raise GridError("coefficient sets have different dimension or band limit")


class SphereGrid:
    """Quadrature nodes on S^{n-1} and the harmonic tables that go with them.

    For n = 3 the nodes form a Gauss-Legendre (in cos theta) by uniform
    longitude product, theta-major; for n = 2 they are ``2L + 2`` equispaced
    angles. Either rule integrates every product of two harmonics of degree
    at most ``L`` exactly.
    """

    def __init__(self, n: int, L: int):
        self.n = n
        self.L = L
        if n == 2:
            N = 2 * L + 2
            self.phi = 2.0 * math.pi * np.arange(N) / N
            self.nodes = np.stack([np.cos(self.phi), np.sin(self.phi)], axis=1)
            self.weights = np.full(N, 2.0 * math.pi / N)
            self.shape = (N,)
        else:
            x, wx = np.polynomial.legendre.leggauss(L + 1)
            # north to south
            x, wx = x[::-1], wx[::-1]
            self.theta = np.arccos(x)
            self.ct = x
            self.st = np.sqrt(1.0 - x * x)
            Np = 2 * L + 1
            self.phi = 2.0 * math.pi * np.arange(Np) / Np
            self.dphi = 2.0 * math.pi / Np
            self.wtheta = wx
            T, Ph = np.meshgrid(self.theta, self.phi, indexing="ij")
            self.nodes = np.stack(
                [np.sin(T) * np.cos(Ph), np.sin(T) * np.sin(Ph), np.cos(T)], axis=-1
            ).reshape(-1, 3)
            self.weights = (wx[:, None] * np.full(Np, self.dphi)[None, :]).ravel()
            self.shape = (L + 1, Np)
            self._P, self._dP = _accel.legendre_table(self.theta, L)
            ls = np.arange(L + 1, dtype=float)[None, :, None]
            ms = np.arange(L + 1, dtype=float)[None, None, :]
            cot = (self.ct / self.st)[:, None, None]
            self._ddP = -cot * self._dP - (ls * (ls + 1.0) - ms * ms / self.st[:, None, None] ** 2) * self._P
            self._ddP *= np.tril(np.ones((L + 1, L + 1)))[None]
            mm = np.arange(L + 1)
            self._cos = np.cos(np.outer(self.phi, mm))
            self._sin = np.sin(np.outer(self.phi, mm))
            self._scale = np.where(mm == 0, 1.0, math.sqrt(2.0))
        self.N = self.nodes.shape[0]
        for arr in (self.nodes, self.weights):
            arr.setflags(write=False)

    def __repr__(self):
        return f"SphereGrid(n={self.n}, L={self.L}, N={self.N})"

    @property
    def area(self) -> float:
        return SPHERE_AREA[self.n]

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))

    # ------------------------------------------------------------------
    # coefficient packing helpers (n = 3)
    # ------------------------------------------------------------------
    def _unpack(self, a: np.ndarray, La: int):
        Ac = np.zeros((La + 1, La + 1))
        As = np.zeros((La + 1, La + 1))
        for l in range(La + 1):
            base = l * l + l
            Ac[l, : l + 1] = a[base : base + l + 1]
            As[l, 1 : l + 1] = a[base - 1 : base - l - 1 : -1] if l > 0 else 0.0
        s = self._scale[: La + 1]
        return Ac * s, As * s

    def _pack(self, Ac: np.ndarray, As: np.ndarray, La: int) -> np.ndarray:
        s = self._scale[: La + 1]
        Ac = Ac * s
        As = As * s
        out = np.zeros((La + 1) ** 2)
        for l in range(La + 1):
            base = l * l + l
            out[base : base + l + 1] = Ac[l, : l + 1]
            if l > 0:
                out[base - l : base][::-1] = As[l, 1 : l + 1]
        return out

    def _band(self, a) -> int:
        a = np.asarray(a)
        La = band_limit_of(self.n, a.shape[0])
        if La > self.L:
            raise GridError(f"coefficients of band {La} exceed grid band {self.L}")
        return La

    # ------------------------------------------------------------------
    # synthesis / analysis on flat arrays
    # ------------------------------------------------------------------
    def synth(self, a, deriv: str = "") -> np.ndarray:
        """Evaluate sum_k a_k Y_k (or a partial derivative) at the nodes.

        ``deriv`` is one of ``""``, ``"t"``, ``"p"``, ``"tt"``, ``"tp"``,
        ``"pp"`` (theta/phi partials; n = 2 only knows ``"p"``, ``"pp"``).
        """
        a = np.asarray(a, dtype=float)
        La = self._band(a)
        if self.n == 2:
            return self._synth_circle(a, La, deriv)
        tcount = deriv.count("t")
        pcount = deriv.count("p")
        P = (self._P, self._dP, self._ddP)[tcount][:, : La + 1, : La + 1]
        Ac, As = self._unpack(a, La)
        Gc = np.einsum("jlm,lm->jm", P, Ac)
        Gs = np.einsum("jlm,lm->jm", P, As)
        m = np.arange(La + 1, dtype=float)
        C = self._cos[:, : La + 1]
        S = self._sin[:, : La + 1]
        if pcount == 0:
            out = Gc @ C.T + Gs @ S.T
        elif pcount == 1:
            out = Gc @ (-m * S).T + Gs @ (m * C).T
        else:
            out = -(Gc @ (m * m * C).T + Gs @ (m * m * S).T)
        return out.ravel()

    def _synth_circle(self, a, La, deriv):
        if "t" in deriv:
            raise GridError("no theta derivative on the circle")
        k = np.arange(1, La + 1, dtype=float)
        ang = np.outer(self.phi, k)
        c, s = np.cos(ang), np.sin(ang)
        bs, bc = a[1::2], a[2::2]
        r = 1.0 / math.sqrt(math.pi)
        p = deriv.count("p")
        if p == 0:
            return a[0] / math.sqrt(2.0 * math.pi) + r * (s @ bs + c @ bc)
        if p == 1:
            return r * (c @ (k * bs) - s @ (k * bc))
        return -r * (s @ (k * k * bs) + c @ (k * k * bc))

    def analyze_array(self, f, L: int | None = None) -> np.ndarray:
        """Quadrature projection of node values onto harmonics of degree <= L."""
        L = self.L if L is None else L
        if L > self.L:
            raise GridError("cannot analyze above the grid band limit")
        f = np.asarray(f, dtype=float)
        if f.shape != (self.N,):
            raise GridError(f"expected {self.N} samples, got {f.shape}")
        if self.n == 2:
            w = 2.0 * math.pi / self.N
            k = np.arange(1, L + 1, dtype=float)
            ang = np.outer(self.phi, k)
            out = np.empty(2 * L + 1)
            out[0] = w * f.sum() / math.sqrt(2.0 * math.pi)
            out[1::2] = w * (np.sin(ang).T @ f) / math.sqrt(math.pi)
            out[2::2] = w * (np.cos(ang).T @ f) / math.sqrt(math.pi)
            return out
        F = f.reshape(self.shape) * self.dphi
        Fc = F @ self._cos[:, : L + 1]
        Fs = F @ self._sin[:, : L + 1]
        Pw = self._P[:, : L + 1, : L + 1] * self.wtheta[:, None, None]
        Ac = np.einsum("jlm,jm->lm", Pw, Fc)
        As = np.einsum("jlm,jm->lm", Pw, Fs)
        return self._pack(Ac, As, L)

    def adjoint_grad(self, V, L: int | None = None) -> np.ndarray:
        """Coefficients ``int V . D_tau Y_k`` for a tangent field given in the
        orthonormal frame (e_theta, e_phi) at the nodes (n = 2: e_phi only)."""
        L = self.L if L is None else L
        V = np.asarray(V, dtype=float).reshape(self.N, self.n - 1)
        if self.n == 2:
            w = 2.0 * math.pi / self.N
            k = np.arange(1, L + 1, dtype=float)
            ang = np.outer(self.phi, k)
            v = V[:, 0]
            out = np.zeros(2 * L + 1)
            out[1::2] = w * k * (np.cos(ang).T @ v) / math.sqrt(math.pi)
            out[2::2] = -w * k * (np.sin(ang).T @ v) / math.sqrt(math.pi)
            return out
        m = np.arange(L + 1, dtype=float)
        Vt = V[:, 0].reshape(self.shape) * self.dphi
        Vp = (V[:, 1].reshape(self.shape) / self.st[:, None]) * self.dphi
        C = self._cos[:, : L + 1]
        S = self._sin[:, : L + 1]
        wt = self.wtheta[:, None, None]
        dPw = self._dP[:, : L + 1, : L + 1] * wt
        Pw = self._P[:, : L + 1, : L + 1] * wt
        Ac = np.einsum("jlm,jm->lm", dPw, Vt @ C) + np.einsum("jlm,jm->lm", Pw, Vp @ (-m * S))
        As = np.einsum("jlm,jm->lm", dPw, Vt @ S) + np.einsum("jlm,jm->lm", Pw, Vp @ (m * C))
        return self._pack(Ac, As, L)

    # ------------------------------------------------------------------
    # derived quantities
    # ------------------------------------------------------------------
    def grad_frame(self, a) -> np.ndarray:
        """Tangential gradient in the orthonormal frame, shape (N, n-1)."""
        if self.n == 2:
            return self.synth(a, "p")[:, None]
        st = np.repeat(self.st, self.shape[1])
        return np.stack([self.synth(a, "t"), self.synth(a, "p") / st], axis=1)

    def hessian_frame(self, a) -> np.ndarray:
        """Covariant Hessian D^2_tau in the orthonormal frame, shape (N, n-1, n-1)."""
        if self.n == 2:
            return self.synth(a, "pp")[:, None, None]
        st = np.repeat(self.st, self.shape[1])
        ct = np.repeat(self.ct, self.shape[1])
        ft, fp = self.synth(a, "t"), self.synth(a, "p")
        htt = self.synth(a, "tt")
        htp = (self.synth(a, "tp") - ct / st * fp) / st
        hpp = (self.synth(a, "pp") + st * ct * ft) / st**2
        return np.stack([np.stack([htt, htp], -1), np.stack([htp, hpp], -1)], -2)

    def frame(self) -> np.ndarray:
        """Ambient components of the tangent frame, shape (N, n-1, n)."""
        if self.n == 2:
            return np.stack([-np.sin(self.phi), np.cos(self.phi)], axis=1)[:, None, :]
        T, Ph = np.meshgrid(self.theta, self.phi, indexing="ij")
        T, Ph = T.ravel(), Ph.ravel()
        et = np.stack([np.cos(T) * np.cos(Ph), np.cos(T) * np.sin(Ph), -np.sin(T)], axis=1)
        ep = np.stack([-np.sin(Ph), np.cos(Ph), np.zeros_like(Ph)], axis=1)
        return np.stack([et, ep], axis=1)

    def synthesis_matrices(self, La: int | None = None):
        """Dense matrices mapping coefficients to node values and to frame
        gradient components: ``(Y, [G_1, ..., G_{n-1}])``."""
        La = self.L if La is None else La
        K = n_modes(self.n, La)
        eye = np.eye(K)
        Y = np.stack([self.synth(eye[k]) for k in range(K)], axis=1)
        G = [np.empty((self.N, K)) for _ in range(self.n - 1)]
        for k in range(K):
            g = self.grad_frame(eye[k])
            for d in range(self.n - 1):
                G[d][:, k] = g[:, d]
        return Y, G

    # ------------------------------------------------------------------
    # evaluation at arbitrary directions
    # ------------------------------------------------------------------
    def evaluate(self, a, dirs, with_grad: bool = False):
        """Evaluate the band-limited function at unit vectors ``dirs``.

        With ``with_grad`` also returns the tangential gradient as ambient
        vectors, shape (M, n).
        """
        a = np.asarray(a, dtype=float)
        La = band_limit_of(self.n, a.shape[0])
        dirs = np.atleast_2d(np.asarray(dirs, dtype=float))
        if self.n == 2:
            phi = np.arctan2(dirs[:, 1], dirs[:, 0])
            k = np.arange(1, La + 1, dtype=float)
            ang = np.outer(phi, k)
            c, s = np.cos(ang), np.sin(ang)
            r = 1.0 / math.sqrt(math.pi)
            bs, bc = a[1::2], a[2::2]
            val = a[0] / math.sqrt(2.0 * math.pi) + r * (s @ bs + c @ bc)
            if not with_grad:
                return val
            dp = r * (c @ (k * bs) - s @ (k * bc))
            ep = np.stack([-np.sin(phi), np.cos(phi)], axis=1)
            return val, dp[:, None] * ep
        theta = np.arccos(np.clip(dirs[:, 2], -1.0, 1.0))
        theta = np.clip(theta, 1e-9, math.pi - 1e-9)
        phi = np.arctan2(dirs[:, 1], dirs[:, 0])
        Ac, As = self._unpack(a, La)
        val, ft, fp = _accel.sh_eval(theta, phi, Ac, As)
        if not with_grad:
            return val
        st, ct = np.sin(theta), np.cos(theta)
        et = np.stack([ct * np.cos(phi), ct * np.sin(phi), -st], axis=1)
        ep = np.stack([-np.sin(phi), np.cos(phi), np.zeros_like(phi)], axis=1)
        return val, ft[:, None] * et + (fp / st)[:, None] * ep


@lru_cache(maxsize=32)
def _grid(n: int, L: int) -> SphereGrid:
    return SphereGrid(n, L)


def make_grid(n: int, L: int) -> SphereGrid:
    """Quadrature grid on S^{n-1} resolving harmonics up to degree ``L``."""
    if n not in (2, 3):
        raise GridError(f"unsupported dimension n={n}; only 2 and 3 are implemented")
    if not (4 <= int(L) <= 512):
        raise GridError(f"band limit {L} outside [4, 512]")
    return _grid(n, int(L))


def oversampled(grid: SphereGrid) -> SphereGrid:
    """The 3/2-oversampled companion grid used for nonlinear expressions."""
    return _grid(grid.n, -(-3 * grid.L // 2))


@dataclass(frozen=True, eq=False)
class SphericalField:
    """Samples of a scalar function at the nodes of ``grid``."""

    grid: SphereGrid
    samples: np.ndarray
    coeffs: SpectralCoeffs | None = field(default=None, repr=False)

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=float)
        if s.shape != (self.grid.N,):
            raise GridError(f"field needs {self.grid.N} samples, got {s.shape}")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @classmethod
    def from_coeffs(cls, c: SpectralCoeffs, grid: SphereGrid) -> "SphericalField":
        return synthesize(c, grid)

    @classmethod
    def from_function(cls, fn, grid: SphereGrid) -> "SphericalField":
        """Sample ``fn(nodes)`` where nodes is an (N, n) array of unit vectors."""
        return cls(grid, fn(grid.nodes))

    def __add__(self, other):
        if isinstance(other, SphericalField):
            return SphericalField(self.grid, self.samples + other.samples)
        return SphericalField(self.grid, self.samples + other)

    def __mul__(self, c):
        return SphericalField(self.grid, self.samples * c)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class TangentField:
    """Tangent vector field stored in the orthonormal frame at grid nodes."""

    grid: SphereGrid
    components: np.ndarray

    def ambient(self) -> np.ndarray:
        return np.einsum("id,idk->ik", self.components, self.grid.frame())

    def norm_squared(self) -> np.ndarray:
        return np.sum(self.components**2, axis=1)


def _check_dim(grid, c):
    if grid.n != c.n:
        raise GridError(f"grid dimension {grid.n} does not match coefficient dimension {c.n}")


def analyze(f: SphericalField, L: int | None = None) -> SpectralCoeffs:
    L = f.grid.L if L is None else L
    if f.coeffs is not None and f.coeffs.L >= L:
        return f.coeffs.resized(L) if f.coeffs.L != L else f.coeffs
    return SpectralCoeffs(f.grid.n, L, f.grid.analyze_array(f.samples, L))


def synthesize(c: SpectralCoeffs, grid: SphereGrid) -> SphericalField:
    _check_dim(grid, c)
    return SphericalField(grid, grid.synth(c.data), coeffs=c)


def harmonic(grid: SphereGrid, l: int, m: int) -> SphericalField:
    """The real harmonic Y_{l,m} sampled on ``grid``."""
    a = np.zeros(n_modes(grid.n, l))
    a[mode_index(grid.n, l, m)] = 1.0
    c = SpectralCoeffs(grid.n, l, a)
    return SphericalField(grid, grid.synth(a), coeffs=c.resized(grid.L))


def grad_tau(f: SphericalField) -> TangentField:
    c = analyze(f)
    return TangentField(f.grid, f.grid.grad_frame(c.data))


def div_tau(V: TangentField) -> SphericalField:
    """Weak divergence: the band-L function whose coefficients are
    ``-int V . D_tau Y_k``."""
    a = -V.grid.adjoint_grad(V.components)
    c = SpectralCoeffs(V.grid.n, V.grid.L, a)
    return synthesize(c, V.grid)


def laplace_tau(f: SphericalField) -> SphericalField:
    c = analyze(f)
    out = SpectralCoeffs(c.n, c.L, -c.eigenvalues * c.data)
    return synthesize(out, f.grid)


def resample(f: SphericalField, grid: SphereGrid, L: int | None = None) -> SphericalField:
    """Transfer a field to another grid through its band-L expansion."""
    L = min(f.grid.L, grid.L) if L is None else L
    c = analyze(f, L)
    return SphericalField(grid, grid.synth(c.data), coeffs=c.resized(grid.L) if grid.L >= L else None)
