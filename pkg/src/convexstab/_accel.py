"""
Hot numeric kernels.

Every kernel exists twice: a loop-based version compiled with numba and a
vectorized numpy version. The numba path is used unless the environment
variable ``CONVEXSTAB_NO_NUMBA`` is set to a non-empty value other than
``"0"`` (or numba is not importable). Both paths must agree to round-off;
``tests/test_accel.py`` checks this and ``benchmarks/bench_kernels.py``
times them against each other.
"""

import math
import os

import numpy as np

_flag = os.environ.get("CONVEXSTAB_NO_NUMBA", "")
NUMBA_REQUESTED = _flag in ("", "0")

try:
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    HAVE_NUMBA = False

USE_NUMBA = NUMBA_REQUESTED and HAVE_NUMBA


def _njit(fn):
    if HAVE_NUMBA:
        return numba.njit(cache=True, nogil=True)(fn)
    return None


# --------------------------------------------------------------------------
# normalized associated Legendre functions (no Condon-Shortley phase)
# --------------------------------------------------------------------------


def _legendre_loops(theta, L, A, Bc, D):
    M = theta.shape[0]
    P = np.zeros((M, L + 1, L + 1))
    dP = np.zeros((M, L + 1, L + 1))
    for i in range(M):
        x = math.cos(theta[i])
        s = math.sin(theta[i])
        pmm = 1.0 / math.sqrt(4.0 * math.pi)
        for m in range(L + 1):
            if m > 0:
                pmm = pmm * math.sqrt((2.0 * m + 1.0) / (2.0 * m)) * s
            P[i, m, m] = pmm
            if m + 1 <= L:
                P[i, m + 1, m] = math.sqrt(2.0 * m + 3.0) * x * pmm
            for l in range(m + 2, L + 1):
                P[i, l, m] = A[l, m] * (x * P[i, l - 1, m] - Bc[l, m] * P[i, l - 2, m])
        for m in range(L + 1):
            dP[i, m, m] = m * x * P[i, m, m] / s
            for l in range(m + 1, L + 1):
                dP[i, l, m] = (l * x * P[i, l, m] - D[l, m] * P[i, l - 1, m]) / s
    return P, dP


def _recurrence_tables(L):
    """Coefficients of the three-term recurrence and of the derivative rule,
    zero outside their range of use."""
    l = np.arange(L + 1, dtype=float)[:, None]
    m = np.arange(L + 1, dtype=float)[None, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        A = np.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
        Bc = np.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
        D = np.sqrt(np.maximum((2.0 * l + 1.0) * (l * l - m * m) / (2.0 * l - 1.0), 0.0))
    keep = l >= m + 2
    A = np.where(keep, A, 0.0)
    Bc = np.where(keep, Bc, 0.0)
    D = np.where(l > m, D, 0.0)
    return np.ascontiguousarray(A), np.ascontiguousarray(Bc), np.ascontiguousarray(D)


_legendre_jit = _njit(_legendre_loops)


def _legendre_numpy(theta, L):
    M = theta.shape[0]
    x = np.cos(theta)
    s = np.sin(theta)
    P = np.zeros((M, L + 1, L + 1))
    dP = np.zeros((M, L + 1, L + 1))
    pmm = np.full(M, 1.0 / math.sqrt(4.0 * math.pi))
    for m in range(L + 1):
        if m > 0:
            pmm = pmm * math.sqrt((2.0 * m + 1.0) / (2.0 * m)) * s
        P[:, m, m] = pmm
        if m + 1 <= L:
            P[:, m + 1, m] = math.sqrt(2.0 * m + 3.0) * x * pmm
        for l in range(m + 2, L + 1):
            a = math.sqrt((4.0 * l * l - 1.0) / (l * l - m * m))
            b = math.sqrt(((l - 1.0) ** 2 - m * m) / (4.0 * (l - 1.0) ** 2 - 1.0))
            P[:, l, m] = a * (x * P[:, l - 1, m] - b * P[:, l - 2, m])
    ls = np.arange(L + 1, dtype=float)[:, None]
    ms = np.arange(L + 1, dtype=float)[None, :]
    dP[:] = ls * x[:, None, None] * P
    with np.errstate(invalid="ignore", divide="ignore"):
        c = np.sqrt(np.maximum((2.0 * ls + 1.0) * (ls * ls - ms * ms) / (2.0 * ls - 1.0), 0.0))
    c[0, :] = 0.0
    dP[:, 1:, :] -= c[1:, :] * P[:, :-1, :]
    dP /= s[:, None, None]
    # entries with m > l are structurally zero
    mask = np.tril(np.ones((L + 1, L + 1), dtype=bool))
    dP *= mask
    return P, dP


def legendre_table(theta, L):
    """Orthonormal associated Legendre functions and their theta-derivatives.

    Returns arrays ``P, dP`` of shape ``(len(theta), L+1, L+1)`` indexed
    ``[node, l, m]``; ``P[:, l, m]`` integrates to ``1/(2 pi)`` against
    ``sin(theta) dtheta`` so that ``P * cos(m phi) * sqrt(2)`` (m > 0) is
    orthonormal on the unit sphere. ``theta`` must avoid the poles.
    """
    theta = np.ascontiguousarray(theta, dtype=float)
    if USE_NUMBA:
        return _legendre_jit(theta, L, *_recurrence_tables(L))
    return _legendre_numpy(theta, L)


# --------------------------------------------------------------------------
# pointwise evaluation of a real harmonic expansion on S^2
# --------------------------------------------------------------------------


def _sh_eval_loops(theta, phi, Ac, As, A, Bc, D):
    # value, d/dtheta and d/dphi of sum_lm P_lm (Ac cos m phi + As sin m phi),
    # the Legendre columns generated on the fly (O(L) memory per point)
    M = theta.shape[0]
    L = Ac.shape[0] - 1
    val = np.zeros(M)
    ft = np.zeros(M)
    fp = np.zeros(M)
    for i in range(M):
        x = math.cos(theta[i])
        s = math.sin(theta[i])
        pmm = 1.0 / math.sqrt(4.0 * math.pi)
        for m in range(L + 1):
            if m > 0:
                pmm = pmm * math.sqrt((2.0 * m + 1.0) / (2.0 * m)) * s
            p2 = 0.0
            p1 = pmm
            gc = p1 * Ac[m, m]
            gs = p1 * As[m, m]
            dgc = m * x * p1 / s * Ac[m, m]
            dgs = m * x * p1 / s * As[m, m]
            for l in range(m + 1, L + 1):
                if l == m + 1:
                    p0 = math.sqrt(2.0 * m + 3.0) * x * p1
                else:
                    p0 = A[l, m] * (x * p1 - Bc[l, m] * p2)
                d = (l * x * p0 - D[l, m] * p1) / s
                gc += p0 * Ac[l, m]
                gs += p0 * As[l, m]
                dgc += d * Ac[l, m]
                dgs += d * As[l, m]
                p2 = p1
                p1 = p0
            c = math.cos(m * phi[i])
            sn = math.sin(m * phi[i])
            val[i] += gc * c + gs * sn
            ft[i] += dgc * c + dgs * sn
            fp[i] += m * (gs * c - gc * sn)
    return val, ft, fp


_sh_eval_jit = _njit(_sh_eval_loops)

SH_CHUNK = 1024


def _sh_eval_numpy(theta, phi, Ac, As):
    L = Ac.shape[0] - 1
    m = np.arange(L + 1, dtype=float)
    out = [np.empty(theta.shape[0]) for _ in range(3)]
    for k in range(0, theta.shape[0], SH_CHUNK):
        sl = slice(k, k + SH_CHUNK)
        P, dP = _legendre_numpy(theta[sl], L)
        C = np.cos(np.outer(phi[sl], m))
        S = np.sin(np.outer(phi[sl], m))
        Gc = np.einsum("ilm,lm->im", P, Ac)
        Gs = np.einsum("ilm,lm->im", P, As)
        dGc = np.einsum("ilm,lm->im", dP, Ac)
        dGs = np.einsum("ilm,lm->im", dP, As)
        out[0][sl] = np.sum(Gc * C + Gs * S, axis=1)
        out[1][sl] = np.sum(dGc * C + dGs * S, axis=1)
        out[2][sl] = np.sum(m * (Gs * C - Gc * S), axis=1)
    return tuple(out)


def sh_eval(theta, phi, Ac, As):
    """Value and the theta/phi derivatives of the expansion with packed
    coefficient blocks ``Ac[l, m]`` (cosine) and ``As[l, m]`` (sine), in the
    normalization of ``legendre_table``. ``theta`` must avoid the poles."""
    theta = np.ascontiguousarray(theta, dtype=float)
    phi = np.ascontiguousarray(phi, dtype=float)
    Ac = np.ascontiguousarray(Ac, dtype=float)
    As = np.ascontiguousarray(As, dtype=float)
    if USE_NUMBA:
        return _sh_eval_jit(theta, phi, Ac, As, *_recurrence_tables(Ac.shape[0] - 1))
    return _sh_eval_numpy(theta, phi, Ac, As)


# --------------------------------------------------------------------------
# convex clipping of a polygon (Sutherland-Hodgman)
# --------------------------------------------------------------------------


def _clip_loops(subject, clip):
    # subject: (k, 2) polygon, clip: (c, 2) convex CCW polygon
    out = subject.copy()
    nout = out.shape[0]
    nc = clip.shape[0]
    for e in range(nc):
        if nout == 0:
            break
        ax, ay = clip[e, 0], clip[e, 1]
        bx, by = clip[(e + 1) % nc, 0], clip[(e + 1) % nc, 1]
        ex, ey = bx - ax, by - ay
        buf = np.empty((2 * nout + 2, 2))
        k = 0
        for i in range(nout):
            px, py = out[i, 0], out[i, 1]
            qx, qy = out[(i + 1) % nout, 0], out[(i + 1) % nout, 1]
            sp = ex * (py - ay) - ey * (px - ax)
            sq = ex * (qy - ay) - ey * (qx - ax)
            if sp >= 0.0:
                buf[k, 0] = px
                buf[k, 1] = py
                k += 1
            if (sp >= 0.0) != (sq >= 0.0):
                t = sp / (sp - sq)
                buf[k, 0] = px + t * (qx - px)
                buf[k, 1] = py + t * (qy - py)
                k += 1
        out = buf[:k].copy()
        nout = k
    return out


_clip_jit = _njit(_clip_loops)


def _clip_numpy(subject, clip):
    out = subject.copy()
    nc = clip.shape[0]
    for e in range(nc):
        if out.shape[0] == 0:
            break
        a = clip[e]
        edge = clip[(e + 1) % nc] - a
        q = np.roll(out, -1, axis=0)
        sp = edge[0] * (out[:, 1] - a[1]) - edge[1] * (out[:, 0] - a[0])
        sq = edge[0] * (q[:, 1] - a[1]) - edge[1] * (q[:, 0] - a[0])
        keep = sp >= 0.0
        cross = keep != (sq >= 0.0)
        with np.errstate(invalid="ignore", divide="ignore"):
            t = sp / (sp - sq)
        inter = out + t[:, None] * (q - out)
        # interleave kept vertex then crossing point, preserving order
        pts = np.stack([out, inter], axis=1).reshape(-1, 2)
        sel = np.stack([keep, cross], axis=1).reshape(-1)
        out = pts[sel]
    return out


def clip_convex(subject, clip):
    """Clip polygon ``subject`` against the convex CCW polygon ``clip``."""
    subject = np.ascontiguousarray(subject, dtype=float)
    clip = np.ascontiguousarray(clip, dtype=float)
    if USE_NUMBA:
        return _clip_jit(subject, clip)
    return _clip_numpy(subject, clip)


# --------------------------------------------------------------------------
# point-in-polygon (crossing number), used by Monte-Carlo oracles
# --------------------------------------------------------------------------


def _pip_loops(points, poly):
    n = poly.shape[0]
    res = np.zeros(points.shape[0], dtype=np.bool_)
    for k in range(points.shape[0]):
        x, y = points[k, 0], points[k, 1]
        inside = False
        j = n - 1
        for i in range(n):
            xi, yi = poly[i, 0], poly[i, 1]
            xj, yj = poly[j, 0], poly[j, 1]
            if (yi > y) != (yj > y):
                xc = xi + (y - yi) * (xj - xi) / (yj - yi)
                if x < xc:
                    inside = not inside
            j = i
        res[k] = inside
    return res


_pip_jit = _njit(_pip_loops)


def _pip_numpy(points, poly):
    x = points[:, 0][:, None]
    y = points[:, 1][:, None]
    xi, yi = poly[:, 0][None, :], poly[:, 1][None, :]
    pj = np.roll(poly, 1, axis=0)
    xj, yj = pj[:, 0][None, :], pj[:, 1][None, :]
    straddle = (yi > y) != (yj > y)
    with np.errstate(invalid="ignore", divide="ignore"):
        xc = xi + (y - yi) * (xj - xi) / (yj - yi)
    hits = straddle & (x < xc)
    return (hits.sum(axis=1) % 2) == 1


def points_in_polygon(points, poly):
    points = np.ascontiguousarray(points, dtype=float)
    poly = np.ascontiguousarray(poly, dtype=float)
    if USE_NUMBA:
        return _pip_jit(points, poly)
    return _pip_numpy(points, poly)


def backend():
    return "numba" if USE_NUMBA else "numpy"
