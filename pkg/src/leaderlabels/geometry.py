"""Exact 2D primitives shared by every other module.

All coordinates are screen millimeters with y growing upward. Everything
here is a pure function on immutable values, so unrestricted concurrent
use is safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class OverlapError(ValueError):
    """Raised when an operation requires rectangle interiors to be disjoint."""


@dataclass(frozen=True, slots=True)
class Vec2:
    """A point or displacement on the screen plane, in millimeters."""

    x: float
    y: float

    def __post_init__(self) -> None:
        fx, fy = float(self.x), float(self.y)
        if not (math.isfinite(fx) and math.isfinite(fy)):
            raise ValueError(f"non-finite vector component ({self.x!r}, {self.y!r})")
        object.__setattr__(self, "x", fx)
        object.__setattr__(self, "y", fy)

    def __add__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x - other.x, self.y - other.y)

    def __mul__(self, s: float) -> "Vec2":
        return Vec2(self.x * s, self.y * s)

    __rmul__ = __mul__

    def __neg__(self) -> "Vec2":
        return Vec2(-self.x, -self.y)

    def dot(self, other: "Vec2") -> float:
        return self.x * other.x + self.y * other.y

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def normalized(self) -> "Vec2":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize a zero vector")
        return Vec2(self.x / n, self.y / n)

    def perp(self) -> "Vec2":
        """Counterclockwise perpendicular."""
        return Vec2(-self.y, self.x)


ZERO = Vec2(0.0, 0.0)


def unit_from_degrees(angle_deg: float) -> Vec2:
    """Unit vector for an angle measured counterclockwise from +x.

    Cardinal angles are snapped to exact components so that vertical and
    horizontal leaders stay bit-exact through the pipeline.
    """
    d = angle_deg % 360.0
    if d == 0.0:
        return Vec2(1.0, 0.0)
    if d == 90.0:
        return Vec2(0.0, 1.0)
    if d == 180.0:
        return Vec2(-1.0, 0.0)
    if d == 270.0:
        return Vec2(0.0, -1.0)
    r = math.radians(d)
    return Vec2(math.cos(r), math.sin(r))


def normalize_orientation_deg(angle_deg: float) -> float:
    """Fold an angle into the undirected-orientation range [0, 180)."""
    return angle_deg % 180.0


@dataclass(frozen=True, slots=True)
class Rect:
    """Axis-aligned rectangle. Degenerate (zero width or height) is allowed."""

    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self) -> None:
        vals = (float(self.x_min), float(self.y_min), float(self.x_max), float(self.y_max))
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"non-finite rect bounds {vals!r}")
        if vals[0] > vals[2] or vals[1] > vals[3]:
            raise ValueError(f"inverted rect bounds {vals!r}")
        object.__setattr__(self, "x_min", vals[0])
        object.__setattr__(self, "y_min", vals[1])
        object.__setattr__(self, "x_max", vals[2])
        object.__setattr__(self, "y_max", vals[3])

    @property
    def width(self) -> float:
        return self.x_max - self.x_min

    @property
    def height(self) -> float:
        return self.y_max - self.y_min

    def center(self) -> Vec2:
        return Vec2(0.5 * (self.x_min + self.x_max), 0.5 * (self.y_min + self.y_max))

    def translated(self, d: Vec2) -> "Rect":
        return Rect(self.x_min + d.x, self.y_min + d.y, self.x_max + d.x, self.y_max + d.y)

    def contains(self, p: Vec2) -> bool:
        """Closed containment test."""
        return self.x_min <= p.x <= self.x_max and self.y_min <= p.y <= self.y_max


def interiors_overlap(a: Rect, b: Rect) -> bool:
    """True when the open interiors intersect. Touching edges do not count."""
    return (
        a.x_min < b.x_max
        and b.x_min < a.x_max
        and a.y_min < b.y_max
        and b.y_min < a.y_max
    )


def rect_distance(a: Rect, b: Rect) -> float:
    """Minimum Euclidean distance between two rectangles, 0 when they meet."""
    dx = max(0.0, a.x_min - b.x_max, b.x_min - a.x_max)
    dy = max(0.0, a.y_min - b.y_max, b.y_min - a.y_max)
    return math.hypot(dx, dy)


def _nearest_coords(a_min: float, a_max: float, b_min: float, b_max: float) -> tuple[float, float]:
    # Nearest coordinates of two intervals; midpoint of the shared span on overlap.
    if b_min >= a_max:
        return a_max, b_min
    if a_min >= b_max:
        return a_min, b_max
    m = 0.5 * (max(a_min, b_min) + min(a_max, b_max))
    return m, m


def rect_nearest_points(a: Rect, b: Rect) -> tuple[Vec2, Vec2]:
    """Closest point pair (p on a, q on b) between two disjoint rectangles.

    When the rectangles only touch, p == q on the shared boundary. Raises
    OverlapError when the interiors intersect, because no boundary pair is
    meaningful then.
    """
    if interiors_overlap(a, b):
        raise OverlapError("rectangle interiors intersect")
    px, qx = _nearest_coords(a.x_min, a.x_max, b.x_min, b.x_max)
    py, qy = _nearest_coords(a.y_min, a.y_max, b.y_min, b.y_max)
    return Vec2(px, py), Vec2(qx, qy)


@dataclass(frozen=True, slots=True)
class AxisGaps:
    """Signed displacement of a rect along each axis direction that brings a
    point onto the corresponding face.

    Moving the rect by x_neg in the -x direction puts the point on its x_max
    face, and so on. A negative gap means the rect is already clear of the
    point along that direction.
    """

    x_neg: float
    x_pos: float
    y_neg: float
    y_pos: float


def point_axis_gaps(r: Rect, p: Vec2) -> AxisGaps:
    return AxisGaps(
        x_neg=r.x_max - p.x,
        x_pos=p.x - r.x_min,
        y_neg=r.y_max - p.y,
        y_pos=p.y - r.y_min,
    )


def point_rect_distance(p: Vec2, r: Rect) -> float:
    """Distance from a point to a closed rectangle, 0 when inside."""
    dx = max(0.0, r.x_min - p.x, p.x - r.x_max)
    dy = max(0.0, r.y_min - p.y, p.y - r.y_max)
    return math.hypot(dx, dy)


def point_rect_signed_clearance(p: Vec2, r: Rect) -> float:
    """Signed distance from a point to a rectangle boundary.

    Positive outside, zero on the boundary, negative inside (minus the
    penetration depth to the nearest face).
    """
    dx = max(r.x_min - p.x, p.x - r.x_max)
    dy = max(r.y_min - p.y, p.y - r.y_max)
    if dx <= 0.0 and dy <= 0.0:
        return max(dx, dy)
    return math.hypot(max(dx, 0.0), max(dy, 0.0))


def segment_crosses_interior(p: Vec2, q: Vec2, r: Rect) -> bool:
    """True when the open segment pq passes through the open interior of r.

    Grazing a corner, running along an edge, or merely touching the boundary
    does not count as crossing.
    """
    t0, t1 = 0.0, 1.0
    dx = q.x - p.x
    dy = q.y - p.y
    for delta, lo, hi, start in ((dx, r.x_min, r.x_max, p.x), (dy, r.y_min, r.y_max, p.y)):
        if delta == 0.0:
            if start < lo or start > hi:
                return False
        else:
            ta = (lo - start) / delta
            tb = (hi - start) / delta
            if ta > tb:
                ta, tb = tb, ta
            t0 = max(t0, ta)
            t1 = min(t1, tb)
            if t0 > t1:
                return False
    if t0 >= t1:
        return False
    tm = 0.5 * (t0 + t1)
    mx = p.x + tm * dx
    my = p.y + tm * dy
    return r.x_min < mx < r.x_max and r.y_min < my < r.y_max
