"""
Planar polygons and the two convexification inequalities in the plane.

For a simple polygon ``E`` with convex hull ``cov(E)``,

    P(E)/|E|^(1/2) - P(cov E)/|cov E|^(1/2)
        >= sqrt(pi) |cov(E) minus E| / (|cov E|^(1/2) |E|^(1/2)),

and, once ``|E| = pi``, the convex set ``F = theta cov(E)`` with
``theta = (|E|/|cov E|)^(1/2)`` (scaled about a point inside ``E``)
satisfies ``P(E) - P(F) >= |E delta F| / (2 sqrt 2)``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import _accel


class PolygonError(ValueError):
    pass


def _signed_area(v: np.ndarray) -> float:
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _segments_cross(p1, p2, q1, q2) -> bool:
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1, d2 = orient(q1, q2, p1), orient(q1, q2, p2)
    d3, d4 = orient(p1, p2, q1), orient(p1, p2, q2)
    return (d1 * d2 < 0) and (d3 * d4 < 0)


def is_simple(v: np.ndarray) -> bool:
    """No two non-adjacent edges cross (proper crossings only)."""
    k = len(v)
    for i in range(k):
        a, b = v[i], v[(i + 1) % k]
        for j in range(i + 2, k):
            if i == 0 and j == k - 1:
                continue
            if _segments_cross(a, b, v[j], v[(j + 1) % k]):
                return False
    return True


@dataclass(frozen=True, eq=False)
class Polygon:
    """A simple polygon; vertices are stored counterclockwise."""

    vertices: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
            raise PolygonError("a polygon needs at least 3 vertices in the plane")
        if not np.all(np.isfinite(v)):
            raise PolygonError("vertices must be finite")
        a = _signed_area(v)
        if a == 0.0:
            raise PolygonError("degenerate polygon (zero area)")
        if a < 0:
            v = v[::-1].copy()
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)

    @classmethod
    def checked(cls, vertices) -> "Polygon":
        P = cls(vertices)
        if not is_simple(P.vertices):
            raise PolygonError("polygon edges cross")
        return P

    def __len__(self):
        return len(self.vertices)

    def scaled(self, s: float, about=(0.0, 0.0)) -> "Polygon":
        c = np.asarray(about, dtype=float)
        return Polygon(c + s * (self.vertices - c))

    def translated(self, z) -> "Polygon":
        return Polygon(self.vertices + np.asarray(z, dtype=float))


def area(P: Polygon) -> float:
    return _signed_area(P.vertices)


def polygon_perimeter(P: Polygon) -> float:
    d = np.roll(P.vertices, -1, axis=0) - P.vertices
    return float(np.sum(np.hypot(d[:, 0], d[:, 1])))


def is_convex(P: Polygon) -> bool:
    v = P.vertices
    e = np.roll(v, -1, axis=0) - v
    f = np.roll(e, -1, axis=0)
    cross = e[:, 0] * f[:, 1] - e[:, 1] * f[:, 0]
    return bool(np.all(cross >= 0.0))


def _hull_points(pts: np.ndarray) -> np.ndarray:
    pts = np.unique(pts, axis=0)  # sorted lexicographically
    if len(pts) < 3:
        raise PolygonError("degenerate input: fewer than 3 distinct points")

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in pts[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    hull = np.array(lower[:-1] + upper[:-1])
    if len(hull) < 3:
        raise PolygonError("degenerate input: all points collinear")
    return hull


def convex_hull(P: Polygon) -> Polygon:
    """Convex hull by the monotone chain (collinear points dropped). A convex
    input is returned unchanged."""
    if is_convex(P):
        return P
    return Polygon(_hull_points(P.vertices))


def intersection_area(E: Polygon, F: Polygon) -> float:
    """``|E cap F|`` for convex ``F`` by clipping ``E`` against the edges of ``F``."""
    clipped = _accel.clip_convex(E.vertices, F.vertices)
    if len(clipped) < 3:
        return 0.0
    return _signed_area(clipped)


def symdiff_2d(E: Polygon, F: Polygon, F_convex: bool = True) -> float:
    """``|E delta F| = |E| + |F| - 2|E cap F|``; ``F`` must be convex."""
    if E is F:
        return 0.0
    if not F_convex or not is_convex(F):
        raise PolygonError("the clipping polygon must be convex")
    return area(E) + area(F) - 2.0 * intersection_area(E, F)


def _edge_distance(points: np.ndarray, v: np.ndarray) -> np.ndarray:
    a = v
    b = np.roll(v, -1, axis=0)
    ab = b - a
    ap = points[:, None, :] - a[None, :, :]
    t = np.clip(np.sum(ap * ab[None], axis=2) / np.sum(ab * ab, axis=1)[None], 0.0, 1.0)
    d = ap - t[..., None] * ab[None]
    return np.min(np.hypot(d[..., 0], d[..., 1]), axis=1)


INTERIOR_SAMPLES = 64


def interior_point(P: Polygon, samples: int = INTERIOR_SAMPLES) -> np.ndarray:
    """Deterministic interior point: the centroid of the sample points of a
    regular grid over the bounding box that are farthest from the boundary
    (the center of the largest inscribed disk, up to sampling)."""
    v = P.vertices
    lo, hi = v.min(axis=0), v.max(axis=0)
    h = (hi - lo) / samples
    xs = lo[0] + h[0] * (np.arange(samples) + 0.5)
    ys = lo[1] + h[1] * (np.arange(samples) + 0.5)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    pts = np.stack([X.ravel(), Y.ravel()], axis=1)
    inside = _accel.points_in_polygon(pts, v)
    if not np.any(inside):
        raise PolygonError("no interior sample point found")
    pts = pts[inside]
    d = _edge_distance(pts, v)
    best = pts[d >= d.max() * (1.0 - 1e-12)]
    c = best.mean(axis=0)
    if not _accel.points_in_polygon(c[None, :], v)[0]:
        c = best[0]
    return c


@dataclass
class PlaneReport:
    n_vertices: int
    convex: bool
    area_E: float
    perimeter_E: float
    area_cov: float
    perimeter_cov: float
    hull_gap: float
    lhs_plane: float
    rhs_plane: float
    slack_plane: float
    theta: float
    translation_x: float
    translation_y: float
    area_cov_normalized: float
    case: str
    perimeter_F: float
    symdiff_EF: float
    lhs_plane2: float
    rhs_plane2: float
    slack_plane2: float
    F_outside_cov: float

    def to_dict(self) -> dict:
        return asdict(self)


def appendix_check(E: Polygon) -> PlaneReport:
    """Evaluate both planar inequalities for ``E`` with signed slacks."""
    convex = is_convex(E)
    cov = E if convex else convex_hull(E)
    aE, pE = area(E), polygon_perimeter(E)
    aC, pC = area(cov), polygon_perimeter(cov)
    gap = 0.0 if convex else aC - aE
    lhs1 = pE / math.sqrt(aE) - pC / math.sqrt(aC) if not convex else 0.0
    rhs1 = math.sqrt(math.pi) * gap / (math.sqrt(aC) * math.sqrt(aE))

    # second inequality: normalize |E| = pi and scale the hull about an interior point
    s = math.sqrt(math.pi / aE)
    p = interior_point(E)
    Es = E.scaled(s, about=p) if s != 1.0 else E
    covs = cov.scaled(s, about=p) if s != 1.0 else cov
    if convex:
        theta = 1.0
        F = Es
    else:
        theta = math.sqrt(aE / aC)
        F = covs.scaled(theta, about=p)
    aCs = area(covs)
    pEs, pF = polygon_perimeter(Es), polygon_perimeter(F)
    sd = symdiff_2d(Es, F)
    lhs2 = pEs - pF if not convex else 0.0
    rhs2 = sd / (2.0 * math.sqrt(2.0))
    outside = 0.0 if convex else area(F) - intersection_area(F, covs)
    return PlaneReport(
        n_vertices=len(E),
        convex=convex,
        area_E=aE,
        perimeter_E=pE,
        area_cov=aC,
        perimeter_cov=pC,
        hull_gap=gap,
        lhs_plane=lhs1,
        rhs_plane=rhs1,
        slack_plane=lhs1 - rhs1,
        theta=theta,
        translation_x=float(p[0]),
        translation_y=float(p[1]),
        area_cov_normalized=aCs,
        case="cov<=2pi" if aCs <= 2.0 * math.pi else "cov>=2pi",
        perimeter_F=pF,
        symdiff_EF=sd,
        lhs_plane2=lhs2,
        rhs_plane2=rhs2,
        slack_plane2=lhs2 - rhs2,
        F_outside_cov=outside,
    )


def l_shape() -> Polygon:
    """Unit square with the upper-right quadrant removed."""
    return Polygon([[0, 0], [1, 0], [1, 0.5], [0.5, 0.5], [0.5, 1], [0, 1]])


def star_polygon(radii, phase: float = 0.0) -> Polygon:
    radii = np.asarray(radii, dtype=float)
    k = len(radii)
    ang = phase + 2.0 * math.pi * np.arange(k) / k
    return Polygon(np.stack([radii * np.cos(ang), radii * np.sin(ang)], axis=1))


def notched_rectangle(width: float, height: float, notch_x: float, notch_w: float, notch_d: float) -> Polygon:
    """Rectangle ``[0,w] x [0,h]`` with a rectangular notch cut down from the
    top edge at ``[notch_x, notch_x + notch_w]`` to depth ``notch_d``."""
    if not (0 < notch_x and notch_x + notch_w < width and 0 < notch_d < height):
        raise PolygonError("notch must lie strictly inside the top edge")
    x0, x1, y = notch_x, notch_x + notch_w, height - notch_d
    return Polygon([[0, 0], [width, 0], [width, height], [x1, height], [x1, y], [x0, y], [x0, height], [0, height]])
