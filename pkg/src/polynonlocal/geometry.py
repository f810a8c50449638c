"""Polygonal approximations of the disk and their measurements.

Polygons are stored as vertex arrays of shape ``(n, 2)`` in counter-clockwise
order together with the centre of the ball they approximate. Every polygon
built here is convex and inscribed in its ball.
"""
from dataclasses import dataclass
from enum import Enum
import math

import numpy as np

__all__ = [
    "Strategy",
    "NeighborhoodSpec",
    "Polygon",
    "as_point",
    "regular_polygon",
    "polygon_area",
    "inradius_centered",
    "cap_area",
    "area_ratio",
    "nocaps_polygon",
    "quasi_uniformity",
    "contains",
    "neighborhood_polygon",
]

DEDUP_RTOL = 1e-12
SUBSET_RTOL = 1e-12


def as_point(p):
    """Return ``p`` as a finite float array of shape (2,)."""
    arr = np.asarray(p, dtype=float)
    if arr.shape != (2,):
        raise ValueError(f"expected a 2D point, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("point has non-finite components")
    return arr


@dataclass(frozen=True, eq=False)
class Polygon:
    """Counter-clockwise polygon approximating a ball around ``center``."""

    vertices: np.ndarray
    center: np.ndarray

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise ValueError("a polygon needs at least 3 vertices of shape (n, 2)")
        if not np.all(np.isfinite(v)):
            raise ValueError("polygon has non-finite vertices")
        v.flags.writeable = False
        c = as_point(self.center)
        c.flags.writeable = False
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "center", c)

    @property
    def n(self):
        return len(self.vertices)

    @property
    def offsets(self):
        """Vertices relative to the centre."""
        return self.vertices - self.center

    def edges(self):
        """Return ``(start, end)`` vertex arrays of every edge."""
        return self.vertices, np.roll(self.vertices, -1, axis=0)

    def side_lengths(self):
        a, b = self.edges()
        return np.hypot(*(b - a).T)

    def is_convex(self):
        a, b = self.edges()
        e = b - a
        cross = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
        return bool(np.all(cross > 0))

    def is_simple(self):
        """Brute-force check that no two non-adjacent edges intersect."""
        a, b = self.edges()
        n = self.n
        for i in range(n):
            for j in range(i + 1, n):
                if j == i + 1 or (i == 0 and j == n - 1):
                    continue
                if _segments_intersect(a[i], b[i], a[j], b[j]):
                    return False
        return True

    def scaled(self, factor):
        """Map ``z -> (z - center) * factor`` (the polygon moves to the origin)."""
        return Polygon(self.offsets * factor, (0.0, 0.0))

    def reflected(self):
        """Point reflection through the centre."""
        return Polygon(2.0 * self.center - self.vertices, self.center)


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _segments_intersect(p1, p2, q1, q2):
    d1 = _cross(q1, q2, p1)
    d2 = _cross(q1, q2, p2)
    d3 = _cross(p1, p2, q1)
    d4 = _cross(p1, p2, q2)
    return (d1 * d2 < 0) and (d3 * d4 < 0)


class Strategy(str, Enum):
    BALL = "ball"
    REGULAR = "regular"
    NOCAPS = "nocaps"


@dataclass(frozen=True)
class NeighborhoodSpec:
    """How the interaction neighborhood of a point is shaped.

    ``n`` and ``rotation`` apply to regular polygons; ``grid_h`` is the pitch
    of the background triangulation used by the nocaps construction.
    """

    strategy: Strategy
    delta: float
    n: int | None = None
    rotation: float = 0.0
    grid_h: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "strategy", Strategy(self.strategy))
        if not (self.delta > 0 and math.isfinite(self.delta)):
            raise ValueError(f"delta must be positive, got {self.delta}")
        if self.strategy is Strategy.REGULAR:
            if self.n is None or int(self.n) != self.n or self.n < 3:
                raise ValueError(f"regular polygons need n >= 3, got {self.n}")
            object.__setattr__(self, "n", int(self.n))
        if self.strategy is Strategy.NOCAPS:
            if self.grid_h is None or not self.grid_h > 0:
                raise ValueError("nocaps needs a positive grid_h")
            if self.delta <= 2 * self.grid_h:
                raise ValueError("nocaps needs delta > 2 * grid_h")

    @property
    def translation_invariant(self):
        """True when every point uses the same shifted template."""
        return self.strategy is not Strategy.NOCAPS

    @property
    def centrally_symmetric(self):
        if self.strategy is Strategy.BALL:
            return True
        return self.strategy is Strategy.REGULAR and self.n % 2 == 0


def regular_polygon(center, delta, n, rotation=0.0):
    """Regular ``n``-gon inscribed in the ball of radius ``delta``.

    The first vertex sits at angle ``rotation``. For even ``n`` the second
    half of the vertices is the exact negation of the first half, so the
    template is centrally symmetric in floating point too.
    """
    if int(n) != n or n < 3:
        raise ValueError(f"n must be an integer >= 3, got {n}")
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    n = int(n)
    c = as_point(center)
    k = np.arange(n // 2 if n % 2 == 0 else n)
    ang = rotation + 2.0 * np.pi * k / n
    off = delta * np.column_stack([np.cos(ang), np.sin(ang)])
    if n % 2 == 0:
        off = np.vstack([off, -off])
    return Polygon(c + off, c)


def polygon_area(p):
    """Shoelace area; raises for clockwise or degenerate polygons."""
    z = p.offsets
    x, y = z[:, 0], z[:, 1]
    area = 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))
    if not area > 0:
        raise ValueError(f"degenerate or clockwise polygon (signed area {area})")
    return area


def _point_segment_distance(p, a, b):
    ab = b - a
    t = np.clip(np.sum((p - a) * ab, axis=-1) / np.sum(ab * ab, axis=-1), 0.0, 1.0)
    foot = a + t[..., None] * ab
    return np.hypot(*(p - foot).T)


def contains(p, points):
    """Closed membership test for a convex counter-clockwise polygon.

    ``points`` may have any leading shape ``(..., 2)``; membership is decided
    on coordinates relative to the polygon centre.
    """
    pts = np.asarray(points, dtype=float) - p.center
    return _contains_offsets(p.offsets, pts)


def _contains_offsets(offsets, pts):
    a = offsets
    e = np.roll(a, -1, axis=0) - a
    cross = e[:, 0] * (pts[..., None, 1] - a[:, 1]) - e[:, 1] * (pts[..., None, 0] - a[:, 0])
    return np.all(cross >= 0.0, axis=-1)


def _edge_signed_distance(offsets, pts):
    """Largest signed distance to the edge lines (positive outside)."""
    a = offsets
    e = np.roll(a, -1, axis=0) - a
    length = np.hypot(e[:, 0], e[:, 1])
    cross = e[:, 0] * (pts[..., None, 1] - a[:, 1]) - e[:, 1] * (pts[..., None, 0] - a[:, 0])
    return np.max(-cross / length, axis=-1)


def inradius_centered(p):
    """Radius of the largest disk centred at ``p.center`` inside ``p``."""
    if not contains(p, p.center):
        raise ValueError("polygon centre lies outside the polygon")
    a, b = p.edges()
    return float(np.min(_point_segment_distance(p.center, a, b)))


def cap_area(theta):
    """Area of the circular cap of the unit disk cut off by a chord of central angle ``theta``."""
    if not 0.0 <= theta <= 2.0 * math.pi:
        raise ValueError(f"theta must lie in [0, 2*pi], got {theta}")
    return 0.5 * (theta - math.sin(theta))


def _check_subset(p, delta):
    r = np.hypot(*p.offsets.T)
    if np.any(r > delta * (1.0 + SUBSET_RTOL)):
        raise ValueError("polygon is not contained in the ball of radius delta")


def area_ratio(p, delta):
    """Polygon area over the area of the ball of radius ``delta``."""
    _check_subset(p, delta)
    return polygon_area(p) / (math.pi * delta * delta)


def _circle_line_angles(c, delta, h):
    """Angles where the circle meets grid lines x=ih, y=jh and y-x=kh."""
    cx, cy = c
    angles = []
    for lo, hi, shift, solve in (
        (cx - delta, cx + delta, cx, lambda t: (np.arccos(t), -np.arccos(t))),
        (cy - delta, cy + delta, cy, lambda t: (np.arcsin(t), np.pi - np.arcsin(t))),
    ):
        idx = np.arange(math.ceil(lo / h), math.floor(hi / h) + 1)
        t = np.clip((idx * h - shift) / delta, -1.0, 1.0)
        for branch in solve(t):
            angles.append(branch)
    # diagonal y - x = k h: sin(theta - pi/4) = (k h - cy + cx) / (sqrt(2) delta)
    span = math.sqrt(2.0) * delta
    idx = np.arange(math.ceil((cy - cx - span) / h), math.floor((cy - cx + span) / h) + 1)
    t = np.clip((idx * h - cy + cx) / span, -1.0, 1.0)
    angles.append(np.pi / 4 + np.arcsin(t))
    angles.append(np.pi / 4 + np.pi - np.arcsin(t))
    return np.mod(np.concatenate(angles), 2.0 * np.pi)


def nocaps_polygon(center, delta, grid_h):
    """Inscribed polygon left after removing every cap cut by the triangulation.

    The background mesh is the uniform triangulation of pitch ``grid_h``
    whose squares are split along the ``y - x = const`` diagonal. The circle
    of radius ``delta`` is cut at each crossing with a mesh edge; every arc
    between consecutive crossings is replaced by its chord.
    """
    if not (delta > 0 and grid_h > 0):
        raise ValueError("delta and grid_h must be positive")
    if delta <= 2.0 * grid_h:
        raise ValueError("nocaps needs delta > 2 * grid_h")
    c = as_point(center)
    theta = np.sort(_circle_line_angles(c, delta, grid_h))
    pts = delta * np.column_stack([np.cos(theta), np.sin(theta)])
    tol = DEDUP_RTOL * delta
    keep = [0]
    for i in range(1, len(pts)):
        if np.hypot(*(pts[i] - pts[keep[-1]])) > tol:
            keep.append(i)
    if len(keep) > 1 and np.hypot(*(pts[keep[-1]] - pts[keep[0]])) <= tol:
        keep.pop()
    if len(keep) < 3:
        raise ValueError("nocaps construction produced fewer than 3 vertices")
    return Polygon(c + pts[keep], c)


def quasi_uniformity(p, delta):
    """Return (longest/shortest side, delta/inradius)."""
    sides = p.side_lengths()
    if np.any(sides <= 0):
        raise ValueError("polygon has a zero-length side")
    return float(sides.max() / sides.min()), float(delta / inradius_centered(p))


def neighborhood_polygon(nb, center):
    """Polygon of ``nb`` around ``center``, or ``None`` for the ball."""
    if nb.strategy is Strategy.BALL:
        return None
    if nb.strategy is Strategy.REGULAR:
        return regular_polygon(center, nb.delta, nb.n, nb.rotation)
    return nocaps_polygon(center, nb.delta, nb.grid_h)
