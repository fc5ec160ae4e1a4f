import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from udisk import envelopes as env
from udisk import hulls
from udisk.geometry import Point

from oracles import min_gap, peel_envelopes, report_ids

REP = [Point(-0.1, 0.5, 0), Point(0, 0.3, 1), Point(0.1, 0.1, 2)]


def test_single_arc_layer():
    (lay,) = env.build_layers([Point(0, 0.5, 0)])
    assert [p.source.id for p in lay.pieces] == [0]
    assert lay.breakpoints == []
    assert lay.span() == (-1.0, 1.0)


def test_two_arc_layer_breakpoint():
    (lay,) = env.build_layers([Point(-0.3, 0.4, 0), Point(0.3, 0.4, 1)])
    assert [p.source.id for p in lay.pieces] == [0, 1]
    (b,) = lay.breakpoints
    assert b == pytest.approx(0.0, abs=1e-12)
    assert lay.height(b) == pytest.approx(0.4 - math.sqrt(0.91))


def test_two_layers():
    layers = env.build_layers([Point(-0.5, 0.5, 0), Point(0, 0.9, 1), Point(0.5, 0.5, 2)])
    assert [[p.source.id for p in l.pieces] for l in layers] == [[0, 2], [1]]


def test_empty_structure():
    s = env.build_structure([])
    assert s.layers == []
    assert env.query_report(s, Point(0, -0.5)) == set()
    assert env.query_emptiness(s, Point(0, -0.5)) is None


def test_single_layer_structure():
    s = env.build_structure([Point(0, 0.5, 0), Point(0.2, 0.5, 1)])
    assert len(s.layers) == 1
    assert s.locate_positions(0.1) == [s.layers[0].locate(0.1)]


def test_report_example():
    s = env.build_structure(REP)
    assert env.query_report(s, Point(0, -0.55)) == {1, 2}
    assert env.query_report(s, Point(0, -1.5)) == set()
    assert env.query_report(s, Point(5, -0.5)) == set()


def test_emptiness_example():
    s = env.build_structure(REP)
    assert env.query_emptiness(s, Point(0, -0.55)).id in {1, 2}
    assert env.query_emptiness(s, Point(0, -1.5)) is None
    assert math.hypot(0 - 0, -1.5 - 0.3) == pytest.approx(1.8)


def test_unknown_mode():
    with pytest.raises(ValueError):
        env.build_structure(REP, mode="tree")


def random_cell_points(rng, n):
    # points of one half-unit cell, lifted to sit above the separator
    return [Point(float(a), float(b), i) for i, (a, b) in
            enumerate(zip(rng.uniform(0, 0.5, n), rng.uniform(0, 0.5, n)))]


@given(st.integers(0, 10 ** 6), st.integers(1, 120))
def test_report_and_emptiness_match_brute_force(seed, n):
    rng = np.random.default_rng(seed)
    P = random_cell_points(rng, n)
    for mode in ("cascading", "binary"):
        s = env.build_structure(P, mode)
        for _ in range(60):
            q = Point(float(rng.uniform(-1.5, 2.0)), float(rng.uniform(-1.4, -1e-6)))
            if min_gap(P, q) <= 1e-8:
                continue
            want = report_ids(P, q)
            assert s.report(q) == want
            w = s.empty(q)
            assert (w is None) == (not want)
            if w is not None:
                assert w.id in want


@given(st.integers(0, 10 ** 6))
def test_cascade_locates_like_binary_search(seed):
    rng = np.random.default_rng(seed)
    P = random_cell_points(rng, 64)
    s = env.build_structure(P, "cascading")
    assert len(s.layers) >= 3
    for x in rng.uniform(-1.6, 2.1, 300):
        want = [lay.locate(float(x)) for lay in s.layers]
        assert s.locate_positions(float(x)) == want


@given(st.integers(0, 10 ** 6), st.integers(1, 200))
def test_layers_are_the_dual_of_hull_layers(seed, n):
    rng = np.random.default_rng(seed)
    P = random_cell_points(rng, n)
    layers = env.build_layers(P)
    assert [[p.source.id for p in l.pieces] for l in layers] == peel_envelopes(P)
    for lay in layers:
        ids = [p.source.id for p in lay.pieces]
        assert len(ids) == len(set(ids))
        xs = [p.source.x for p in lay.pieces]
        assert xs == sorted(xs)
        for a, b in zip(lay.pieces, lay.pieces[1:]):
            # a breakpoint is a crossing of the two semicircles or the end
            # of one of their domains
            ya = hulls.semicircle_y(a.source, a.x1)
            yb = hulls.semicircle_y(b.source, b.x0)
            assert a.x1 == b.x0
            assert (abs(ya - yb) <= 1e-9 or abs(b.x0 - (b.source.x - 1)) <= 1e-12
                    or abs(a.x1 - (a.source.x + 1)) <= 1e-12)


@given(st.integers(0, 10 ** 6), st.integers(8, 300))
def test_cascading_comparison_count(seed, n):
    rng = np.random.default_rng(seed)
    P = random_cell_points(rng, n)
    s = env.build_structure(P, "cascading")
    m = s.size
    for _ in range(40):
        q = Point(float(rng.uniform(-1, 1.5)), float(rng.uniform(-1.2, -1e-6)))
        before = s.comparisons
        k = len(s.report(q))
        used = s.comparisons - before
        L = len(s.layers)
        assert used <= 16 * (math.log2(m) + k + L)
