"""The stability profile f(t) = t/|log t| on (0, 1/e), constant 1/e beyond."""

import math

import numpy as np

KINK = math.exp(-1.0)


def _check(t):
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(np.isnan(t)):
        raise ValueError("the stability profile is defined for t >= 0 only")
    return t


def f(t):
    t = _check(t)
    with np.errstate(divide="ignore", invalid="ignore"):
        low = t / np.abs(np.log(t))
    out = np.where(t >= KINK, KINK, np.where(t > 0, low, 0.0))
    return float(out) if out.ndim == 0 else out


def f_prime(t):
    """Derivative of ``f``. At the kink the left value 2 is returned; for
    t > 1/e the derivative is 0 and f'(0) is the limit 0."""
    t = _check(t)
    with np.errstate(divide="ignore", invalid="ignore"):
        lg = np.log(t)
        low = (1.0 - lg) / lg**2
    out = np.where(t > KINK, 0.0, np.where(t > 0, low, 0.0))
    return float(out) if out.ndim == 0 else out


def f_second(t):
    """Second derivative on (0, 1/e), zero elsewhere."""
    t = _check(t)
    with np.errstate(divide="ignore", invalid="ignore"):
        lg = np.log(t)
        low = (lg - 2.0) / (t * lg**3)
    out = np.where((t > 0) & (t < KINK), low, 0.0)
    return float(out) if out.ndim == 0 else out


class Profile:
    """A penalty profile with first and second derivatives."""

    def __init__(self, name, fn, d1, d2):
        self.name = name
        self.f = fn
        self.f_prime = d1
        self.f_second = d2

    def __repr__(self):
        return f"Profile({self.name!r})"


LOG_PROFILE = Profile("t/|log t|", f, f_prime, f_second)
LINEAR_PROFILE = Profile(
    "t",
    lambda t: float(_check(t)) if np.ndim(t) == 0 else _check(t),
    lambda t: 1.0 if np.ndim(t) == 0 else np.ones_like(_check(t)),
    lambda t: 0.0 if np.ndim(t) == 0 else np.zeros_like(_check(t)),
)
