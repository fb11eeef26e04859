"""
Numerical geometry of nearly spherical sets.

Spectral calculus on the sphere for radial graphs ``B + u``, the penalized
perimeter minimization that produces a convex comparison set, quantitative
Alexandrov checks, a non-convex sharpness family and the planar
convexification inequalities, with a JSON-configured command line driver.
"""

__version__ = "0.1.0"

from . import (  # noqa: E402
    alexandrov,
    corpus,
    counterex,
    funcnorms,
    pipeline,
    planar,
    setcalc,
    sphgrid,
    stabfun,
    varmin,
)

__all__ = [
    "alexandrov",
    "corpus",
    "counterex",
    "funcnorms",
    "pipeline",
    "planar",
    "setcalc",
    "sphgrid",
    "stabfun",
    "varmin",
]
