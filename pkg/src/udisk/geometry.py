"""Floating-point primitives for points, unit arcs, wings and connecting arcs.

All arcs have radius 1.  Unless stated otherwise the separator is the line
y = 0, arc centers sit on or above it and the arcs themselves hang below it.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

_DEFAULT_TAU = 1e-9


def _read_tau() -> float:
    raw = os.environ.get("UDISK_TOLERANCE")
    if raw is None:
        return _DEFAULT_TAU
    value = float(raw)
    if not value > 0:
        raise ValueError(f"UDISK_TOLERANCE must be positive, got {raw!r}")
    return value


TAU = _read_tau()


def tolerance() -> float:
    return TAU


def set_tolerance(value: float) -> float:
    """Replace the global tolerance; returns the previous value."""
    global TAU
    if not value > 0:
        raise ValueError("tolerance must be positive")
    old, TAU = TAU, float(value)
    return old


class GeometryError(ValueError):
    pass


class IrrelevantPoint(GeometryError):
    """A point at or below y = -1 contributes nothing to a line-separated hull."""


class Side(Enum):
    BELOW = "below"
    ABOVE = "above"


@dataclass(frozen=True, slots=True)
class Point:
    x: float
    y: float
    id: Optional[int] = None

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise GeometryError(f"non-finite coordinates ({self.x}, {self.y})")

    def key(self) -> tuple:
        # lexicographic tie-break used wherever x-coordinates collide
        return (self.x, self.y, -1 if self.id is None else self.id)


def dist(a: Point, b: Point) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


@dataclass(frozen=True, slots=True)
class UnitArc:
    """Lower part of the unit circle around ``center`` cut off by y = 0."""
    center: Point
    xl: float
    xr: float
    side: Side = Side.BELOW
    source_id: Optional[int] = None

    @property
    def cx(self) -> float:
        return self.center.x

    @property
    def cy(self) -> float:
        return self.center.y

    @property
    def lowest(self) -> Point:
        return Point(self.center.x, self.center.y - 1.0)


def arc_from_center(p: Point, separator_y: float = 0.0, source_id=None) -> Optional[UnitArc]:
    """Arc of the unit circle around ``p`` below the separator, or None."""
    h = p.y - separator_y
    if h >= 1.0 or h <= -1.0:
        return None
    w = math.sqrt(1.0 - h * h)
    c = Point(p.x, h, p.id)
    sid = p.id if source_id is None else source_id
    return UnitArc(c, p.x - w, p.x + w, Side.BELOW, sid)


def arc_y_at(arc: UnitArc, x: float, tol: Optional[float] = None) -> Optional[float]:
    t = TAU if tol is None else tol
    if x < arc.xl - t or x > arc.xr + t:
        return None
    d = x - arc.center.x
    r = 1.0 - d * d
    return arc.center.y - math.sqrt(r if r > 0.0 else 0.0)


def circle_lower_y(cx: float, cy: float, x: float) -> float:
    """Lower unit semicircle around (cx, cy) evaluated at x (clamped)."""
    d = x - cx
    r = 1.0 - d * d
    return cy - math.sqrt(r if r > 0.0 else 0.0)


def arc_below_point(q: Point, arc: UnitArc, tol: Optional[float] = None) -> bool:
    """True iff the arc meets the downward ray from q."""
    t = TAU if tol is None else tol
    y = arc_y_at(arc, q.x, 0.0)
    return y is not None and y <= q.y + t


def arc_below_point_by_distance(q: Point, arc: UnitArc, tol: Optional[float] = None) -> bool:
    t = TAU if tol is None else tol
    return dist(q, arc.center) <= 1.0 + t


def _circle_intersections(ax, ay, bx, by):
    dx, dy = bx - ax, by - ay
    d2 = dx * dx + dy * dy
    if d2 == 0.0 or d2 > 4.0:
        return None
    d = math.sqrt(d2)
    h2 = 1.0 - d2 / 4.0
    h = math.sqrt(h2 if h2 > 0.0 else 0.0)
    mx, my = ax + dx / 2.0, ay + dy / 2.0
    ux, uy = -dy / d, dx / d
    return (mx + h * ux, my + h * uy), (mx - h * ux, my - h * uy)


def arc_arc_crossing(a: UnitArc, b: UnitArc, tol: Optional[float] = None) -> Optional[Point]:
    """The crossing of two below-separator arcs, if any."""
    t = TAU if tol is None else tol
    if math.hypot(a.cx - b.cx, a.cy - b.cy) <= t:
        return None   # same circle up to tolerance
    pts = _circle_intersections(a.cx, a.cy, b.cx, b.cy)
    if pts is None:
        return None
    best = None
    for x, y in pts:
        if y >= -t:
            continue
        if a.xl - t <= x <= a.xr + t and b.xl - t <= x <= b.xr + t:
            if best is None or y < best[1]:
                best = (x, y)
    return None if best is None else Point(best[0], best[1])


def _arc_through(cx: float, cy: float, p: Point, q: Point, source_id=None) -> UnitArc:
    lo, hi = (p.x, q.x) if p.x <= q.x else (q.x, p.x)
    return UnitArc(Point(cx, cy), lo, hi, Side.BELOW, source_id)


def connecting_arc(q: Point, q2: Point, tol: Optional[float] = None) -> Optional[UnitArc]:
    """The unit arc through q and q2 whose center lies on or above y = 0.

    The returned span is the x-interval between the two points.
    """
    t = TAU if tol is None else tol
    if q.x == q2.x and q.y == q2.y:
        raise GeometryError("coincident points have no connecting arc")
    pts = _circle_intersections(q.x, q.y, q2.x, q2.y)
    if pts is None:
        return None
    cx, cy = max(pts, key=lambda c: c[1])
    if cy < -t:
        return None
    return _arc_through(cx, cy, q, q2)


def concave_arc(p: Point, p2: Point, tol: Optional[float] = None):
    """Unit circle through p and p2 whose center lies below their chord.

    Returns the center as a Point, or None when |pp2| > 2.
    """
    pts = _circle_intersections(p.x, p.y, p2.x, p2.y)
    if pts is None:
        return None
    (x1, y1), (x2, y2) = pts
    # the chord line through p, p2; "below" measured by the signed side
    # relative to the chord oriented left to right
    a, b = (p, p2) if p.key() <= p2.key() else (p2, p)
    dx, dy = b.x - a.x, b.y - a.y
    s1 = dx * (y1 - a.y) - dy * (x1 - a.x)
    return Point(x1, y1) if s1 < 0 else Point(x2, y2)


@dataclass(frozen=True, slots=True)
class Wing:
    """Wing arc (center on the separator) followed by a half-line at y = -1."""
    apex: Point
    center_x: float
    vertex: Point
    direction: int  # -1 for the left wing, +1 for the right wing


def wings(q: Point) -> Tuple[Wing, Wing]:
    if q.y <= -1.0:
        raise IrrelevantPoint(f"point {q} lies on or below y = -1")
    y = min(q.y, 0.0)
    s = math.sqrt(max(0.0, 1.0 - y * y))
    left = Wing(q, q.x - s, Point(q.x - s, -1.0), -1)
    right = Wing(q, q.x + s, Point(q.x + s, -1.0), 1)
    return left, right


def wing_offset(y: float) -> float:
    y = min(y, 0.0)
    return math.sqrt(max(0.0, 1.0 - y * y))


def far_away(q: Point, q2: Point) -> bool:
    if q2.x < q.x:
        q, q2 = q2, q
    return q.x + wing_offset(q.y) < q2.x - wing_offset(q2.y)


def signed_tangent_angle(center: Point, p: Point, other: Point) -> float:
    """Angle of the tangent ray at p (toward ``other``) above the horizontal.

    The tangent follows the circle around ``center`` along the short arc
    from p to other.  Positive means the ray climbs.
    """
    rx, ry = p.x - center.x, p.y - center.y
    # two tangent directions, pick the one pointing toward the other endpoint
    tx, ty = -ry, rx
    if tx * (other.x - p.x) + ty * (other.y - p.y) < 0:
        tx, ty = -tx, -ty
    return math.atan2(ty, abs(tx))


def tangent_angle(center: Point, p: Point, other: Point) -> float:
    return abs(signed_tangent_angle(center, p, other))


def point_key(p: Point) -> tuple:
    return p.key()
