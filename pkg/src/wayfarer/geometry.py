"""Planar geometry primitives: angle arithmetic and exact intersection tests.

Angles are handled in degrees throughout the public API (every steering
threshold in this package is stated in degrees) and normalized to the
half-open interval (-180, 180] so each direction has a single
representation.  Headings follow the standard math convention: 0 deg is
+x and positive angles turn counterclockwise.
"""

from __future__ import annotations

import math
from typing import NamedTuple


def normalize_angle(a: float) -> float:
    """Wrap an angle in degrees into (-180, 180]."""
    if not math.isfinite(a):
        raise ValueError(f"angle must be finite, got {a!r}")
    r = a % 360.0
    return r - 360.0 if r > 180.0 else r


def angle_diff(target: float, current: float) -> float:
    """Signed smallest rotation (degrees) taking `current` onto `target`.

    Result lies in (-180, 180]; antipodal headings map to +180.
    """
    return normalize_angle(target - current)


class Vec2(NamedTuple):
    x: float
    y: float

    def __add__(self, other):  # type: ignore[override]
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other):
        return Vec2(self.x - other.x, self.y - other.y)

    def dist(self, other: "Vec2") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


class Segment(NamedTuple):
    a: Vec2
    b: Vec2

    def length(self) -> float:
        return self.a.dist(self.b)

    def orientation(self) -> float:
        """Undirected line angle in [0, 180) degrees."""
        ang = math.degrees(math.atan2(self.b.y - self.a.y, self.b.x - self.a.x))
        return ang % 180.0

    def closest_point(self, p: Vec2) -> Vec2:
        return Vec2(*_seg_closest_point(self.a.x, self.a.y, self.b.x, self.b.y, p.x, p.y))


class Disc(NamedTuple):
    center: Vec2
    radius: float


class OrientedRect(NamedTuple):
    """Rectangle centered at `center`, long axis along `heading` (degrees).

    `half_length` extends along the heading, `half_width` across it.
    """

    center: Vec2
    heading: float
    half_width: float
    half_length: float

    def corners(self) -> list[Vec2]:
        c = math.cos(math.radians(self.heading))
        s = math.sin(math.radians(self.heading))
        hl, hw = self.half_length, self.half_width
        cx, cy = self.center
        return [
            Vec2(cx + c * dx - s * dy, cy + s * dx + c * dy)
            for dx, dy in ((hl, hw), (-hl, hw), (-hl, -hw), (hl, -hw))
        ]

    def contains(self, p: Vec2) -> bool:
        c = math.cos(math.radians(self.heading))
        s = math.sin(math.radians(self.heading))
        dx, dy = p.x - self.center.x, p.y - self.center.y
        lx = dx * c + dy * s
        ly = -dx * s + dy * c
        return abs(lx) <= self.half_length and abs(ly) <= self.half_width


def seg_rect_intersect(seg: Segment, rect: OrientedRect) -> bool:
    """True iff the segment touches the closed rectangle (tangency counts)."""
    c = math.cos(math.radians(rect.heading))
    s = math.sin(math.radians(rect.heading))
    cx, cy = rect.center
    ax, ay = _to_local(seg.a.x, seg.a.y, cx, cy, c, s)
    bx, by = _to_local(seg.b.x, seg.b.y, cx, cy, c, s)
    return _seg_hits_box(ax, ay, bx, by, rect.half_length, rect.half_width)


def disc_rect_intersect(disc: Disc, rect: OrientedRect) -> bool:
    """True iff the disc touches the closed rectangle (tangency counts)."""
    c = math.cos(math.radians(rect.heading))
    s = math.sin(math.radians(rect.heading))
    lx, ly = _to_local(disc.center.x, disc.center.y, rect.center.x, rect.center.y, c, s)
    qx = min(max(lx, -rect.half_length), rect.half_length)
    qy = min(max(ly, -rect.half_width), rect.half_width)
    return (lx - qx) ** 2 + (ly - qy) ** 2 <= disc.radius * disc.radius


def point_seg_dist(px: float, py: float, ax: float, ay: float, bx: float, by: float) -> float:
    qx, qy = _seg_closest_point(ax, ay, bx, by, px, py)
    return math.hypot(px - qx, py - qy)


def seg_seg_dist(s1: Segment, s2: Segment) -> float:
    """Minimum distance between two segments (0 when they cross)."""
    if _segments_cross(s1.a, s1.b, s2.a, s2.b):
        return 0.0
    return min(
        point_seg_dist(s1.a.x, s1.a.y, s2.a.x, s2.a.y, s2.b.x, s2.b.y),
        point_seg_dist(s1.b.x, s1.b.y, s2.a.x, s2.a.y, s2.b.x, s2.b.y),
        point_seg_dist(s2.a.x, s2.a.y, s1.a.x, s1.a.y, s1.b.x, s1.b.y),
        point_seg_dist(s2.b.x, s2.b.y, s1.a.x, s1.a.y, s1.b.x, s1.b.y),
    )


# -- float-level helpers (kept free of tuple wrapping for the hot path) --


def _to_local(px: float, py: float, cx: float, cy: float, c: float, s: float):
    """World point -> frame centered at (cx, cy) rotated by the angle whose cos/sin are (c, s)."""
    dx, dy = px - cx, py - cy
    return dx * c + dy * s, -dx * s + dy * c


def _seg_closest_point(ax: float, ay: float, bx: float, by: float, px: float, py: float):
    dx, dy = bx - ax, by - ay
    denom = dx * dx + dy * dy
    if denom == 0.0:
        return ax, ay
    t = ((px - ax) * dx + (py - ay) * dy) / denom
    if t < 0.0:
        t = 0.0
    elif t > 1.0:
        t = 1.0
    return ax + t * dx, ay + t * dy


def _seg_hits_box(ax: float, ay: float, bx: float, by: float, hx: float, hy: float) -> bool:
    """Segment vs axis-aligned box [-hx, hx] x [-hy, hy], closed (Liang-Barsky clip)."""
    if -hx <= ax <= hx and -hy <= ay <= hy:
        return True
    if -hx <= bx <= hx and -hy <= by <= hy:
        return True
    dx, dy = bx - ax, by - ay
    t0, t1 = 0.0, 1.0
    for p, q in ((-dx, ax + hx), (dx, hx - ax), (-dy, ay + hy), (dy, hy - ay)):
        if p == 0.0:
            if q < 0.0:
                return False
        else:
            t = q / p
            if p < 0.0:
                if t > t1:
                    return False
                if t > t0:
                    t0 = t
            else:
                if t < t0:
                    return False
                if t < t1:
                    t1 = t
    return t0 <= t1


def _segments_cross(p1: Vec2, p2: Vec2, p3: Vec2, p4: Vec2) -> bool:
    d1 = _orient(p3, p4, p1)
    d2 = _orient(p3, p4, p2)
    d3 = _orient(p1, p2, p3)
    d4 = _orient(p1, p2, p4)
    if ((d1 > 0 > d2) or (d1 < 0 < d2)) and ((d3 > 0 > d4) or (d3 < 0 < d4)):
        return True
    return False


def _orient(a: Vec2, b: Vec2, c: Vec2) -> float:
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
