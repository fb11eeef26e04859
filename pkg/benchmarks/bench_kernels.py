"""
Compare the numba kernels with their numpy fallbacks.

Each kernel is run once to trigger compilation, checked for agreement,
then timed with ``timeit``. Run as ``python benchmarks/bench_kernels.py``.
"""

import argparse
import math
import timeit

import numpy as np

from convexstab import _accel
from convexstab import corpus as cp
from convexstab import planar as pl


def _cases(L, points):
    rng = np.random.Generator(np.random.Philox(key=0))
    theta = rng.uniform(0.01, math.pi - 0.01, points)
    phi = rng.uniform(-math.pi, math.pi, points)
    Ac = np.tril(rng.standard_normal((L + 1, L + 1)))
    As = np.tril(rng.standard_normal((L + 1, L + 1)))
    As[:, 0] = 0.0
    tables = _accel._recurrence_tables(L)
    E = cp.random_star(rng, 0.4)
    F = pl.convex_hull(cp.random_star(rng, 0.3))
    sub, clip = np.ascontiguousarray(E.vertices), np.ascontiguousarray(F.vertices)
    pts = rng.uniform(-1.5, 1.5, (points, 2))
    return {
        "legendre": (lambda: _accel._legendre_jit(theta, L, *tables), lambda: _accel._legendre_numpy(theta, L)),
        "sh_eval": (lambda: _accel._sh_eval_jit(theta, phi, Ac, As, *tables), lambda: _accel._sh_eval_numpy(theta, phi, Ac, As)),
        "clip": (lambda: _accel._clip_jit(sub, clip), lambda: _accel._clip_numpy(sub, clip)),
        "pip": (lambda: _accel._pip_jit(pts, sub), lambda: _accel._pip_numpy(pts, sub)),
    }


def _agree(a, b):
    a = a if isinstance(a, tuple) else (a,)
    b = b if isinstance(b, tuple) else (b,)
    return max(float(np.max(np.abs(np.asarray(x, float) - np.asarray(y, float)))) if np.size(x) else 0.0 for x, y in zip(a, b))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.strip().splitlines()[0])
    ap.add_argument("--L", type=int, default=32, help="band limit for the spherical kernels")
    ap.add_argument("--points", type=int, default=4096, help="evaluation points")
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if not _accel.HAVE_NUMBA:
        print("numba is not installed; nothing to compare")
        return 0
    print(f"L = {args.L}, points = {args.points}, best of {args.repeat}")
    print(f"{'kernel':10s} {'numba [ms]':>12s} {'numpy [ms]':>12s} {'speedup':>9s} {'max diff':>10s}")
    for name, (jit, ref) in _cases(args.L, args.points).items():
        diff = _agree(jit(), ref())
        tj = min(timeit.repeat(jit, number=1, repeat=args.repeat)) * 1e3
        tn = min(timeit.repeat(ref, number=1, repeat=args.repeat)) * 1e3
        print(f"{name:10s} {tj:12.3f} {tn:12.3f} {tn / tj:9.1f} {diff:10.1e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
