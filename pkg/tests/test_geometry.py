import math

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from udisk import geometry as geo
from udisk.geometry import Point

coord = st.floats(-5, 5, allow_nan=False)
center_y = st.floats(0.0, 0.999, allow_nan=False)
below = st.floats(-1.5, -1e-6, allow_nan=False)


def test_point_rejects_non_finite():
    with pytest.raises(geo.GeometryError):
        Point(math.nan, 0.0)
    with pytest.raises(geo.GeometryError):
        Point(0.0, math.inf)


def test_arc_from_center_examples():
    a = geo.arc_from_center(Point(0, 0.5))
    assert a.xl == pytest.approx(-0.8660254, abs=1e-7)
    assert a.xr == pytest.approx(0.8660254, abs=1e-7)
    assert a.lowest.y == pytest.approx(-0.5)
    assert geo.arc_from_center(Point(0, 1.0)) is None
    b = geo.arc_from_center(Point(2, 0.999))
    assert b.xr - b.xl == pytest.approx(2 * math.sqrt(1 - 0.999 ** 2))
    assert b.xr - b.xl == pytest.approx(0.0894, abs=1e-4)


def test_arc_from_center_respects_separator_height():
    a = geo.arc_from_center(Point(1, 2.5), separator_y=2.0)
    assert a.cy == pytest.approx(0.5)
    assert a.xl == pytest.approx(1 - math.sqrt(0.75))


def test_arc_y_at_examples():
    a = geo.arc_from_center(Point(0, 0.5))
    assert geo.arc_y_at(a, 0.0) == pytest.approx(-0.5)
    assert geo.arc_y_at(a, 0.8660254) == pytest.approx(0.0, abs=1e-7)
    assert geo.arc_y_at(a, 2.0) is None


def test_arc_below_point_examples():
    a = geo.arc_from_center(Point(0, 0.5))
    assert geo.arc_below_point(Point(0, -0.4), a)
    assert not geo.arc_below_point(Point(0, -0.6), a)
    assert not geo.arc_below_point(Point(0.9, -0.1), a)


def test_arc_arc_crossing_examples():
    a = geo.arc_from_center(Point(-0.3, 0.4))
    b = geo.arc_from_center(Point(0.3, 0.4))
    c = geo.arc_arc_crossing(a, b)
    assert c.x == pytest.approx(0.0, abs=1e-12)
    # 0.4 - sqrt(1 - 0.3^2)
    assert c.y == pytest.approx(0.4 - math.sqrt(0.91), abs=1e-12)
    far = geo.arc_from_center(Point(5, 0.5))
    assert geo.arc_arc_crossing(geo.arc_from_center(Point(0, 0.5)), far) is None
    assert geo.arc_arc_crossing(a, geo.arc_from_center(Point(-0.3, 0.4))) is None


def test_connecting_arc_examples():
    c = geo.connecting_arc(Point(-0.6, -0.2), Point(0.6, -0.2))
    assert (c.cx, c.cy) == pytest.approx((0.0, 0.6))
    assert geo.connecting_arc(Point(-1.5, -0.1), Point(1.5, -0.1)) is None
    c = geo.connecting_arc(Point(-0.5, -0.3), Point(0.5, -0.3))
    assert c.cx == pytest.approx(0.0, abs=1e-12)
    assert c.cy == pytest.approx(0.5660254, abs=1e-7)


def test_concave_arc_examples():
    c = geo.concave_arc(Point(-0.2, 0.6), Point(0.2, 0.6))
    assert (c.x, c.y) == pytest.approx((0.0, -0.3797959), abs=1e-7)
    c = geo.concave_arc(Point(-0.5, 0.5), Point(0.5, 0.5))
    assert (c.x, c.y) == pytest.approx((0.0, -0.3660254), abs=1e-7)
    assert geo.concave_arc(Point(0, 0.5), Point(3, 0.5)) is None


def test_wings_examples():
    l, r = geo.wings(Point(0, -0.3))
    assert l.vertex.x == pytest.approx(-0.9539392, abs=1e-7)
    assert r.vertex.x == pytest.approx(0.9539392, abs=1e-7)
    assert r.vertex.y == -1.0
    l, r = geo.wings(Point(0, 0.0))
    assert (l.vertex.x, r.vertex.x) == (-1.0, 1.0)
    l, r = geo.wings(Point(5, -0.999))
    assert r.vertex.x - 5 == pytest.approx(0.0447, abs=1e-4)
    assert 5 - l.vertex.x == pytest.approx(0.0447, abs=1e-4)
    with pytest.raises(geo.IrrelevantPoint):
        geo.wings(Point(0, -1.0))
    with pytest.raises(geo.IrrelevantPoint):
        geo.wings(Point(0, -1.5))


def test_far_away_examples():
    assert geo.far_away(Point(-2, -0.1), Point(2, -0.1))
    assert not geo.far_away(Point(-0.5, -0.3), Point(0.5, -0.3))
    assert not geo.far_away(Point(-1, 0.0), Point(1, 0.0))


def test_tangent_angle_examples():
    c = geo.concave_arc(Point(-0.2, 0.6), Point(0.2, 0.6))
    p, q = Point(-0.2, 0.6), Point(0.2, 0.6)
    assert geo.tangent_angle(c, p, q) == pytest.approx(math.asin(0.2))
    assert geo.tangent_angle(c, p, q) == pytest.approx(geo.tangent_angle(c, q, p))
    apex = Point(0.0, c.y + 1.0)
    assert geo.tangent_angle(c, apex, q) == pytest.approx(0.0, abs=1e-12)


def test_tolerance_override(monkeypatch):
    old = geo.set_tolerance(1e-6)
    try:
        assert geo.tolerance() == 1e-6
        with pytest.raises(ValueError):
            geo.set_tolerance(0.0)
    finally:
        geo.set_tolerance(old)
    monkeypatch.setenv("UDISK_TOLERANCE", "1e-7")
    assert geo._read_tau() == 1e-7
    monkeypatch.setenv("UDISK_TOLERANCE", "-1")
    with pytest.raises(ValueError):
        geo._read_tau()


@given(coord, center_y, st.floats(0, 1))
def test_arc_points_are_on_the_unit_circle(cx, cy, s):
    a = geo.arc_from_center(Point(cx, cy))
    x = a.xl + s * (a.xr - a.xl)
    y = geo.arc_y_at(a, x)
    assert abs(math.hypot(x - cx, y - cy) - 1.0) <= 1e-9
    assert y <= 1e-9


@given(coord, center_y, coord, below)
def test_ray_and_distance_predicates_agree(cx, cy, qx, qy):
    a = geo.arc_from_center(Point(cx, cy))
    q = Point(qx, qy)
    assume(abs(math.hypot(qx - cx, qy - cy) - 1.0) > 1e-8)
    assert geo.arc_below_point(q, a) == geo.arc_below_point_by_distance(q, a)


@given(coord, below, coord, below)
def test_connecting_arc_passes_through_both_points(x1, y1, x2, y2):
    assume(abs(x1 - x2) > 1e-6 or abs(y1 - y2) > 1e-6)
    p, q = Point(x1, y1), Point(x2, y2)
    c = geo.connecting_arc(p, q)
    if geo.far_away(p, q):
        assert c is None
    if c is None:
        return
    assert c.cy >= -1e-9
    assert abs(math.hypot(p.x - c.cx, p.y - c.cy) - 1.0) <= 1e-9
    assert abs(math.hypot(q.x - c.cx, q.y - c.cy) - 1.0) <= 1e-9


@given(coord, center_y, coord, center_y)
def test_arc_arc_crossing_lies_on_both_circles(x1, y1, x2, y2):
    a, b = geo.arc_from_center(Point(x1, y1)), geo.arc_from_center(Point(x2, y2))
    c = geo.arc_arc_crossing(a, b)
    if c is None:
        return
    assert c.y < 0
    for arc in (a, b):
        assert abs(math.hypot(c.x - arc.cx, c.y - arc.cy) - 1.0) <= 1e-9


@given(coord, st.floats(-0.999, 0.0))
def test_wing_vertices_are_unit_distance_from_the_separator_center(x, y):
    l, r = geo.wings(Point(x, y))
    for w in (l, r):
        assert math.hypot(x - w.center_x, y) == pytest.approx(1.0)
        assert w.vertex.y == -1.0
