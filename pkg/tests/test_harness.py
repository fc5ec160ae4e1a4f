import io
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from udisk import geometry as geo
from udisk import harness as hz
from udisk.geometry import Point

MIX = hz.parse_mix("I:0.5,D:0.2,Q:0.2,E:0.1")


def test_oracle_examples():
    assert hz.oracle_report([Point(0, 0, 3)], Point(0.5, 0)) == {3}
    arcs = [geo.arc_from_center(Point(0, 0.5, 0)), geo.arc_from_center(Point(0, 0.3, 1))]
    assert hz.oracle_level(arcs, Point(0, -0.6)) == 1
    assert hz.oracle_k_lowest([], 0.0, 5) == []
    assert [i for _, i in hz.oracle_k_lowest(arcs, 0.0, 5)] == [1, 0]
    assert hz.oracle_empty([Point(3, 3, 0)], Point(0, 0)) is None


def test_parse_mix():
    assert hz.parse_mix("i:0.25,q:0.75") == {"I": 0.25, "Q": 0.75}
    with pytest.raises(ValueError):
        hz.parse_mix("I:0.5,Q:0.6")
    with pytest.raises(ValueError):
        hz.parse_mix("I:0.5,Z:0.5")


def test_seed_determinism():
    a = hz.gen_workload(7, 300, MIX)
    b = hz.gen_workload(7, 300, MIX)
    assert a.dumps() == b.dumps()
    assert hz.gen_workload(8, 300, MIX).dumps() != a.dumps()


def test_insert_only_mix():
    tr = hz.gen_workload(1, 100, {"I": 1.0})
    assert len(tr.ops) == 100 and all(o.kind == "I" for o in tr.ops)
    assert len({o.id for o in tr.ops}) == 100


def test_clustered_points_stay_near_centers():
    cfg = hz.WorkloadConfig()
    rng = np.random.default_rng(5)
    draw = hz._sampler(rng, "clustered", cfg)
    pts = np.array([draw() for _ in range(2000)])
    # the generator draws its centers first from the same stream
    centers = np.random.default_rng(5).uniform(0, cfg.box, (cfg.clusters, 2))
    d = np.hypot(pts[:, None, 0] - centers[None, :, 0], pts[:, None, 1] - centers[None, :, 1])
    assert (d.min(1) <= 1.0).mean() >= 0.9


def test_collinear_points_hug_a_line():
    tr = hz.gen_workload(2, 200, {"I": 1.0}, "collinear-jittered")
    P = np.array([[o.x, o.y] for o in tr.ops])
    P = P - P.mean(0)
    s = np.linalg.svd(P, compute_uv=False)
    assert s[1] / s[0] < 1e-2


def test_deletes_reference_live_ids():
    for dist in hz.DISTRIBUTIONS:
        live = set()
        for o in hz.gen_workload(3, 500, MIX, dist).ops:
            if o.kind == "I":
                live.add(o.id)
            elif o.kind == "D":
                assert o.id in live
                live.remove(o.id)


def test_near_boundary_queries_are_redrawn():
    tr = hz.gen_workload(4, 600, MIX)
    live = {}
    for o in tr.ops:
        if o.kind == "I":
            live[o.id] = (o.x, o.y)
        elif o.kind == "D":
            del live[o.id]
        elif o.kind in "QE":
            for px, py in live.values():
                assert abs(math.hypot(px - o.x, py - o.y) - 1) >= 10 * geo.TAU


def test_trace_text_round_trip():
    tr = hz.gen_workload(9, 200, {"I": 0.4, "D": 0.2, "Q": 0.2, "E": 0.1, "K": 0.1})
    assert tr.arc_level
    back = hz.Trace.loads(tr.dumps())
    assert back.ops == tr.ops
    t = hz.Trace.loads("# comment\nI 1 2\nI 3 4\nD 0\n")
    assert [o.id for o in t.ops] == [0, 1, 0]
    with pytest.raises(ValueError):
        hz.Trace.loads("X 1 2\n")
    with pytest.raises(ValueError):
        hz.Trace.loads("I 1\n")


def test_empty_trace():
    assert hz.replay(hz.Trace([]), "dynamic") == []
    assert hz.diff([], []) == []


@pytest.mark.parametrize("engine", ["dynamic", "static", "static-rebuild"])
@pytest.mark.parametrize("dist", hz.DISTRIBUTIONS)
def test_engines_agree_with_oracle(engine, dist):
    tr = hz.gen_workload(11, 400, MIX, dist)
    res = hz.replay(tr, engine)
    ref = hz.replay(tr, "oracle")
    assert hz.diff(res, ref) == []
    assert all(r.get("witness_ok", True) for r in res)
    assert {"op_index", "kind", "nanos", "touched_counter"} <= set(res[0])


def test_arc_level_traces():
    tr = hz.gen_workload(12, 600, {"I": 0.4, "D": 0.15, "Q": 0.15, "E": 0.1, "K": 0.2})
    assert hz.diff(hz.replay(tr, "dynamic"), hz.replay(tr, "oracle")) == []
    with pytest.raises(ValueError):
        hz.replay(tr, "static")
    with pytest.raises(ValueError):
        hz.replay(tr, "quantum")


def test_diff_flags_injected_error():
    tr = hz.gen_workload(13, 300, MIX)
    res = hz.replay(tr, "dynamic")
    assert hz.diff(res, res) == []
    i = next(j for j, r in enumerate(res) if r["kind"] == "Q")
    bad = [dict(r) for r in res]
    bad[i]["answer_ids"] = bad[i]["answer_ids"] + [10 ** 6]
    mm = hz.diff(res, bad)
    assert [m.op_index for m in mm] == [i]
    j = next(j for j, r in enumerate(res) if r["kind"] == "E")
    bad = [dict(r) for r in res]
    bad[j]["witness"] = None if res[j]["witness"] is not None else 0
    assert [m.op_index for m in hz.diff(res, bad)] == [j]
    assert hz.diff(res, res[:-1])[-1].kind == "length"


def test_results_round_trip():
    res = hz.replay(hz.gen_workload(14, 100, MIX), "dynamic")
    buf = io.StringIO()
    hz.write_results(res, buf)
    buf.seek(0)
    assert hz.read_results(buf) == res


@given(st.integers(0, 10 ** 6))
def test_replay_is_deterministic(seed):
    tr = hz.gen_workload(seed, 150, MIX)
    a, b = hz.replay(tr, "dynamic"), hz.replay(tr, "dynamic")
    strip = lambda R: [{k: v for k, v in r.items() if k != "nanos"} for r in R]
    assert strip(a) == strip(b)


def test_bench_rows(tmp_path):
    path = tmp_path / "b.csv"
    rows = hz.bench([256, 512], seed=1, queries=50, dyn_ops=50, csv_path=str(path))
    assert [r.n for r in rows] == [256, 512]
    assert all(r.counter_bound_ratio <= 64 for r in rows)
    assert path.read_text().splitlines()[0].startswith("n,build_seconds")
    assert hz.loglog_exponent([1, 2, 4], [3, 6, 12]) == pytest.approx(1.0)


def test_build_times_shape():
    t = hz.build_times([64, 128], budget=0.0)
    assert len(t) == 2 and all(x >= 0 for x in t)
