import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from udisk import coverage as cv
from udisk import dynarcs
from udisk import engine as eng
from udisk import geometry as geo
from udisk.geometry import Point

from conftest import points_from
from oracles import min_gap, report_ids


def test_static_examples():
    P = [Point(0, 0, 0)]
    assert eng.static_report(P, Point(0.2, 0.2)) == {0}
    assert eng.static_report(P, Point(0, 1.5)) == set()
    assert eng.static_empty(P, Point(0.5, 0.5)) == P[0]
    assert eng.static_empty(P, Point(2, 0)) is None


def test_dynamic_examples():
    d = eng.DynamicUDRR()
    eng.dyn_insert(d, Point(0, 0, 0))
    assert eng.dyn_empty(d, Point(0, 0.9)) == Point(0, 0, 0)
    assert eng.dyn_report(d, Point(0.9, 0.3)) == {0}
    eng.dyn_delete(d, 0)
    assert eng.dyn_empty(d, Point(0, 0.9)) is None
    assert len(d) == 0


def test_ids_are_assigned_and_checked():
    s = eng.StaticUDRR([Point(0, 0), Point(0.3, 0)])
    assert s.report(Point(0.1, 0)) == {0, 1}
    with pytest.raises(ValueError):
        eng.StaticUDRR([Point(0, 0, 1), Point(1, 1, 1)])
    d = eng.DynamicUDRR()
    with pytest.raises(ValueError):
        d.insert(Point(0, 0))
    d.insert(Point(0, 0, 4))
    with pytest.raises(ValueError):
        d.insert(Point(1, 0, 4))
    with pytest.raises(cv.UnknownPoint):
        d.delete(9)


def test_facing_edges():
    c = cv.Cell((0, 0), (0, 0.5), (0, 0.5))
    assert eng.facing_edge(c, cv.Cell((-1, 0), (-1, -0.5), (0, 0.5))) == "right"
    assert eng.facing_edge(c, cv.Cell((1, 0), (1, 1.5), (0, 0.5))) == "left"
    assert eng.facing_edge(c, cv.Cell((0, -1), (0, 0.5), (-1, -0.5))) == "top"
    assert eng.facing_edge(c, cv.Cell((0, 1), (0, 0.5), (1, 1.5))) == "bottom"
    assert eng.facing_edge(c, c) is None


@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5),
       st.sampled_from(eng.EDGES))
def test_frames_are_rigid(px, py, qx, qy, edge):
    cell = cv.Cell((0.5, -1.0), (0.5, 1.0), (-1.0, -0.5))
    fr = eng.FrameTransform.of(cell, edge)
    p, q = Point(px, py, 1), Point(qx, qy)
    fp, fq = fr.apply(p), fr.apply(q)
    back = fr.invert(fp)
    assert back.x == pytest.approx(px, abs=1e-9) and back.y == pytest.approx(py, abs=1e-9)
    assert back.id == 1
    assert geo.dist(fp, fq) == pytest.approx(geo.dist(p, q), abs=1e-9)
    # the cell itself maps above y = 0
    mid = fr.apply(Point(0.75, -0.75))
    assert mid.y > 0
    # arc membership in the frame is the distance test
    if fp.y >= 0 and fq.y < 0 and abs(geo.dist(p, q) - 1) > 1e-8:
        arc = geo.arc_from_center(fp)
        inside = arc is not None and geo.arc_below_point(fq, arc)
        assert inside == (geo.dist(p, q) <= 1)


def test_frame_unknown_edge():
    with pytest.raises(ValueError):
        eng.FrameTransform.of(cv.Cell((0, 0), (0, 1), (0, 1)), "diagonal")


def random_queries(rng, P, m, lo=-1.0, hi=11.0):
    out = []
    while len(out) < m:
        q = Point(float(rng.uniform(lo, hi)), float(rng.uniform(lo, hi)))
        if min_gap(P, q) > 1e-8:
            out.append(q)
    return out


@given(st.integers(0, 10 ** 6), st.integers(1, 200), st.sampled_from(["cascading", "binary"]))
def test_static_matches_brute_force(seed, n, mode):
    rng = np.random.default_rng(seed)
    box = float(rng.choice([1.0, 4.0, 10.0]))
    P = points_from(rng.uniform(0, box, (n, 2)))
    s = eng.StaticUDRR(P, mode=mode)
    for q in random_queries(rng, P, 80, -1, box + 1):
        want = report_ids(P, q)
        assert s.report(q) == want
        w = s.empty(q)
        assert (w is None) == (not want)
        if w is not None:
            assert geo.dist(w, q) <= 1 + 1e-9


@given(st.integers(0, 10 ** 6), st.sampled_from([2, 32]))
def test_dynamic_matches_brute_force(seed, leaf):
    rng = np.random.default_rng(seed)
    box = float(rng.choice([2.0, 6.0]))
    d = eng.DynamicUDRR(cfg=dynarcs.ArcConfig(leaf_threshold=leaf))
    live = {}
    nid = 0
    for _ in range(250):
        u = rng.random()
        if u < 0.45 or not live:
            p = Point(float(rng.uniform(0, box)), float(rng.uniform(0, box)), nid)
            nid += 1
            d.insert(p)
            live[p.id] = p
        elif u < 0.65:
            pid = list(live)[int(rng.integers(len(live)))]
            d.delete(pid if rng.random() < 0.5 else live[pid])
            del live[pid]
        else:
            P = list(live.values())
            (q,) = random_queries(rng, P, 1, -1, box + 1)
            want = report_ids(P, q)
            assert d.report(q) == want
            w = d.empty(q)
            assert (w is None) == (not want)
    assert len(d) == len(live)


def test_dynamic_with_initial_points():
    rng = np.random.default_rng(3)
    P = points_from(rng.uniform(0, 5, (300, 2)))
    d = eng.DynamicUDRR(P)
    for q in random_queries(rng, P, 200, -1, 6):
        assert d.report(q) == report_ids(P, q)
    for p in P[:200]:
        d.delete(p.id)
    assert d.rebuilds >= 1
    for q in random_queries(rng, P[200:], 200, -1, 6):
        assert d.report(q) == report_ids(P[200:], q)


def test_static_query_counter_bound():
    rng = np.random.default_rng(8)
    n = 2000
    P = points_from(rng.uniform(0, math.sqrt(n / 4), (n, 2)))
    s = eng.StaticUDRR(P)
    for q in random_queries(rng, P, 500, 0, math.sqrt(n / 4)):
        k = len(s.report(q))
        c = s.last.cells + s.last.comparisons + s.last.candidates
        assert c <= 64 * (math.log2(n) + k)
