import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from udisk import coverage as cv
from udisk.geometry import Point

from conftest import points_from
from oracles import coverage_violations


def test_single_point_build():
    cov = cv.build([Point(0, 0, 0)])
    (zx, zx2), (zy, zy2) = cov.ax.bounds, cov.ay.bounds
    assert (zx, zx2) == (-1.75, 2.25)
    assert zy2 - zy == 4.0
    assert len(cov.registry) == 49
    assert len(cov.nonempty_cells()) == 1


def test_empty_build():
    cov = cv.build([])
    assert cov.registry == {}
    assert cov.locate(Point(0, 0)) is None
    assert cov.locate(Point(3, -7)) is None


def test_far_points_get_separate_zones(rng):
    P = [Point(0, 0, 0), Point(10, 0, 1)]
    cov = cv.build(P)
    assert len(cov.ax.bounds) == 4
    keys = [cov.locate(p)[0].key for p in P]
    assert keys[0] != keys[1]
    assert len(cov.registry) == 98
    assert coverage_violations(cov, P, rng, 500) == []


def test_locate_examples():
    cov = cv.build([Point(0, 0, 0)])
    cell, nbrs = cov.locate(Point(0.1, 0.1))
    assert cell.x_range == (-0.25, 0.25)
    assert cell.y_range == (-0.25, 0.25)
    # every registered cell is in the 7x7 block; only the occupied one is a
    # neighbor worth visiting
    assert nbrs == [cell.key]
    assert cov.locate(Point(100, 100)) is None


def test_locate_tie_goes_to_half_open_side():
    cov = cv.build([Point(0, 0, 0)])
    cell, _ = cov.locate(Point(0.25, -0.25))
    assert cell.x_range[0] == 0.25 and cell.y_range[0] == -0.25


def test_insert_far_point_creates_zone():
    cov = cv.build([Point(0, 0, 0)])
    h = cov.insert(Point(10, 0, 1))
    assert cov.ax.bounds == [-1.75, 2.25, 8.25, 11.75]
    assert cov.ax.log[-1] == "new-zone"
    assert h.newly_nonempty
    assert len(h.new_cells) == 49       # no column shared with the old block
    assert cov.check_blocks() == []


def test_insert_into_occupied_cell_is_an_append():
    cov = cv.build([Point(0, 0, 0)])
    n = len(cov.registry)
    h = cov.insert(Point(0.1, 0.05, 1))
    assert not h.newly_nonempty and h.new_cells == ()
    assert len(cov.registry) == n
    assert [p.id for p in cov.record(h.key).point_list()] == [0, 1]


def test_insert_between_close_zones_merges(rng):
    # zones [-1.75, 2.25] and [4.55, 8.55] are 2.3 apart
    P = [Point(0, 0, 0), Point(6.3, 0, 1)]
    cov = cv.build(P)
    assert len(cov.ax.bounds) == 4
    P.append(Point(3.4, 0, 2))
    cov.insert(P[-1])
    assert "merge" in cov.ax.log
    assert len(cov.ax.bounds) == 2
    assert cov.ax.narrow_columns()
    assert coverage_violations(cov, P, rng, 500) == []


def test_delete_keeps_cells():
    P = [Point(i, 0, i) for i in range(4)]
    cov = cv.build(P)
    p = Point(0.1, 0.1, 9)
    cov.insert(p)
    n = len(cov.registry)
    assert cov.delete(p) is False
    cell, _ = cov.locate(p)
    assert 9 not in [q.id for q in cov.record(cell.key).point_list()]
    assert len(cov.registry) == n


def test_delete_half_triggers_rebuild():
    P = [Point(3 * i, 0, i) for i in range(4)]
    cov = cv.build(P)
    assert cov.delete(P[0]) is False
    assert cov.delete(P[1]) is True
    assert cov.rebuilds == 1
    # blocks around x = 6 and x = 9 share one column
    assert len(cov.registry) == 2 * 49 - 7
    assert sorted(p.id for p in cov.points()) == [2, 3]


def test_delete_unknown():
    cov = cv.build([Point(0, 0, 0)])
    with pytest.raises(cv.UnknownPoint):
        cov.delete(Point(0, 0, 5))
    with pytest.raises(cv.UnknownPoint):
        cv.build([]).delete(Point(1, 1, 1))


def test_delete_twice():
    P = [Point(i, i, i) for i in range(10)]
    cov = cv.build(P)
    cov.delete(P[3])
    with pytest.raises(cv.UnknownPoint):
        cov.delete(P[3])


@given(st.integers(1, 80), st.integers(0, 10 ** 6), st.sampled_from([3.0, 10.0, 40.0]))
def test_static_build_conditions(n, seed, box):
    rng = np.random.default_rng(seed)
    P = points_from(rng.uniform(0, box, (n, 2)))
    cov = cv.build(P)
    assert coverage_violations(cov, P, rng, 300) == []
    assert len(cov.registry) <= 49 * n


@given(st.integers(0, 10 ** 6))
def test_conditions_survive_updates(seed):
    rng = np.random.default_rng(seed)
    box = float(rng.choice([4.0, 12.0, 30.0]))
    P = points_from(rng.uniform(0, box, (int(rng.integers(1, 20)), 2)))
    cov = cv.build(P)
    nid = len(P)
    for _ in range(60):
        if rng.random() < 0.6 or len(P) < 2:
            p = Point(float(rng.uniform(-3, box + 3)), float(rng.uniform(-3, box + 3)), nid)
            nid += 1
            cov.insert(p)
            P.append(p)
        else:
            p = P.pop(int(rng.integers(len(P))))
            cov.delete(p)
    assert sorted(p.id for p in cov.points()) == sorted(p.id for p in P)
    assert coverage_violations(cov, P, rng, 300) == []
