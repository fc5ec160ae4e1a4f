"""Oracles, workload generation, trace replay, diffing and benchmarks.

Trace text format, one op per line::

    I x y id     insert a point (arc-level traces: an arc with center (x, y))
    D id         delete
    Q x y        report query
    E x y        emptiness query
    K x k        k lowest arcs over the vertical line at x (arc-level traces)

A trace containing K ops is arc-level: its points are arc centers with
0 <= y < 1, Q reports the arcs below (x, y) and E the lowest arc below it.
"""
from __future__ import annotations

import csv
import gc
import json
import math
import time
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import dynarcs
from . import engine as eng
from . import geometry as geo
from .geometry import Point

DISTRIBUTIONS = ("uniform-square", "clustered", "collinear-jittered")


# ---------------------------------------------------------------------------
# oracles
# ---------------------------------------------------------------------------

def oracle_report(P: Iterable[Point], q: Point, tol: Optional[float] = None) -> set:
    t = geo.TAU if tol is None else tol
    return {p.id for p in P if geo.dist(p, q) <= 1.0 + t}


def oracle_empty(P: Iterable[Point], q: Point, tol: Optional[float] = None) -> Optional[Point]:
    t = geo.TAU if tol is None else tol
    for p in P:
        if geo.dist(p, q) <= 1.0 + t:
            return p
    return None


def _arc_height(a: geo.UnitArc, x: float) -> Optional[float]:
    return geo.arc_y_at(a, x, 0.0)


def oracle_level(arcs: Iterable[geo.UnitArc], q: Point, tol: Optional[float] = None) -> int:
    """Number of arcs meeting the downward ray from q."""
    return sum(1 for a in arcs if geo.arc_below_point(q, a, tol))


def oracle_k_lowest(arcs: Iterable[geo.UnitArc], x: float, k: int) -> List[Tuple[float, int]]:
    hs = []
    for a in arcs:
        y = _arc_height(a, x)
        if y is not None:
            hs.append((y, a.source_id))
    hs.sort()
    return hs[:k]


# ---------------------------------------------------------------------------
# traces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Op:
    kind: str
    x: float = 0.0
    y: float = 0.0
    id: Optional[int] = None
    k: int = 0

    def line(self) -> str:
        if self.kind == "I":
            return f"I {self.x!r} {self.y!r} {self.id}"
        if self.kind == "D":
            return f"D {self.id}"
        if self.kind == "K":
            return f"K {self.x!r} {self.k}"
        return f"{self.kind} {self.x!r} {self.y!r}"


@dataclass
class Trace:
    ops: List[Op] = field(default_factory=list)

    @property
    def arc_level(self) -> bool:
        return any(o.kind == "K" for o in self.ops)

    def dumps(self) -> str:
        return "".join(o.line() + "\n" for o in self.ops)

    @classmethod
    def loads(cls, text: str) -> "Trace":
        ops = []
        auto = 0
        for n, raw in enumerate(text.splitlines(), 1):
            parts = raw.split()
            if not parts or parts[0].startswith("#"):
                continue
            kind = parts[0].upper()
            try:
                if kind == "I":
                    pid = int(parts[3]) if len(parts) > 3 else None
                    if pid is None:
                        pid = auto
                    auto = max(auto, pid + 1)
                    ops.append(Op("I", float(parts[1]), float(parts[2]), pid))
                elif kind == "D":
                    ops.append(Op("D", id=int(parts[1])))
                elif kind in ("Q", "E"):
                    ops.append(Op(kind, float(parts[1]), float(parts[2])))
                elif kind == "K":
                    ops.append(Op("K", float(parts[1]), k=int(parts[2])))
                else:
                    raise ValueError(kind)
            except (IndexError, ValueError) as exc:
                raise ValueError(f"line {n}: cannot parse {raw!r}") from exc
        return cls(ops)


def read_points(path: str) -> List[Point]:
    pts = []
    with open(path) as fh:
        for raw in fh:
            parts = raw.split()
            if not parts or parts[0].startswith("#"):
                continue
            pid = int(parts[2]) if len(parts) > 2 else len(pts)
            pts.append(Point(float(parts[0]), float(parts[1]), pid))
    return pts


def parse_mix(text: str) -> Dict[str, float]:
    mix = {}
    for part in text.split(","):
        k, v = part.split(":")
        mix[k.strip().upper()] = float(v)
    total = sum(mix.values())
    if abs(total - 1.0) > 1e-6:
        raise ValueError(f"mix probabilities sum to {total}, not 1")
    bad = set(mix) - set("IDQEK")
    if bad:
        raise ValueError(f"unknown op kinds {sorted(bad)}")
    return mix


@dataclass
class WorkloadConfig:
    box: float = 10.0
    clusters: int = 5
    cluster_sigma: float = 0.3
    jitter: float = 1e-3
    margin: float = 10.0       # in units of tau
    max_k: int = 16


def _sampler(rng, dist: str, cfg: WorkloadConfig):
    L = cfg.box
    if dist == "uniform-square":
        return lambda: (float(rng.uniform(0, L)), float(rng.uniform(0, L)))
    if dist == "clustered":
        centers = rng.uniform(0, L, (cfg.clusters, 2))

        def draw():
            c = centers[rng.integers(len(centers))]
            return (float(c[0] + rng.normal(0, cfg.cluster_sigma)),
                    float(c[1] + rng.normal(0, cfg.cluster_sigma)))
        return draw
    if dist == "collinear-jittered":
        a = rng.uniform(0, L, 2)
        ang = rng.uniform(0, math.pi)
        d = np.array([math.cos(ang), math.sin(ang)])

        def draw():
            s = rng.uniform(-L / 2, L / 2)
            p = a + s * d + rng.normal(0, cfg.jitter, 2)
            return float(p[0]), float(p[1])
        return draw
    raise ValueError(f"unknown distribution {dist!r}")


def _near_boundary(live: Dict[int, Tuple[float, float]], x: float, y: float, margin: float) -> bool:
    for px, py in live.values():
        if abs(math.hypot(px - x, py - y) - 1.0) < margin:
            return True
    return False


def _near_arc(live: Dict[int, Tuple[float, float]], x: float, y: float, margin: float) -> bool:
    for cx, cy in live.values():
        d = x - cx
        if 1.0 - d * d < 0:
            continue
        w = math.sqrt(1.0 - cy * cy)
        if abs(abs(d) - w) < margin:
            return True
        if abs(cy - math.sqrt(1.0 - d * d) - y) < margin:
            return True
    return False


def gen_workload(seed: int, n: int, mix: Dict[str, float], distribution: str = "uniform-square",
                 cfg: Optional[WorkloadConfig] = None) -> Trace:
    """Deterministic trace of n ops; near-boundary queries are redrawn."""
    cfg = cfg or WorkloadConfig()
    rng = np.random.default_rng(seed)
    kinds = sorted(mix)
    probs = np.array([mix[k] for k in kinds])
    if abs(probs.sum() - 1.0) > 1e-6:
        raise ValueError("mix probabilities must sum to 1")
    arc_level = "K" in mix and mix["K"] > 0
    draw = _sampler(rng, distribution, cfg)
    margin = cfg.margin * geo.TAU
    live: Dict[int, Tuple[float, float]] = {}
    ops: List[Op] = []
    nid = 0
    L = cfg.box
    while len(ops) < n:
        kind = kinds[int(rng.choice(len(kinds), p=probs))]
        if kind == "D" and not live:
            kind = "I"
        if kind == "I":
            if arc_level:
                x, y = float(rng.uniform(0, L)), float(rng.uniform(0, 0.999))
            else:
                x, y = draw()
            live[nid] = (x, y)
            ops.append(Op("I", x, y, nid))
            nid += 1
        elif kind == "D":
            ids = sorted(live)
            pid = ids[int(rng.integers(len(ids)))]
            del live[pid]
            ops.append(Op("D", id=pid))
        elif kind == "K":
            while True:
                x = float(rng.uniform(-1, L + 1))
                if not _near_arc(live, x, math.inf, margin):
                    break
            ops.append(Op("K", x, k=int(rng.integers(1, cfg.max_k + 1))))
        else:
            for _ in range(1000):
                if arc_level:
                    x, y = float(rng.uniform(-1, L + 1)), float(rng.uniform(-1, 0))
                    bad = _near_arc(live, x, y, margin)
                else:
                    x, y = float(rng.uniform(-1, L + 1)), float(rng.uniform(-1, L + 1))
                    bad = _near_boundary(live, x, y, margin)
                if not bad:
                    break
            ops.append(Op(kind, x, y))
    return Trace(ops)


# ---------------------------------------------------------------------------
# replay
# ---------------------------------------------------------------------------

ENGINES = ("oracle", "dynamic", "static", "static-rebuild")


class _OracleEngine:
    def __init__(self, arc_level: bool, tol: float):
        self.arc_level = arc_level
        self.tol = tol
        self.pts: Dict[int, Point] = {}
        self.work = 0

    def insert(self, p: Point):
        if p.id in self.pts:
            raise ValueError(f"duplicate id {p.id}")
        self.pts[p.id] = p

    def delete(self, pid: int):
        del self.pts[pid]

    def _arcs(self):
        return [geo.UnitArc(Point(p.x, p.y), *_span(p), geo.Side.BELOW, p.id)
                for p in self.pts.values()]

    def report(self, q: Point):
        self.work += len(self.pts)
        if self.arc_level:
            return {a.source_id for a in self._arcs() if geo.arc_below_point(q, a, self.tol)}
        return oracle_report(self.pts.values(), q, self.tol)

    def empty(self, q: Point):
        self.work += len(self.pts)
        if self.arc_level:
            low = oracle_k_lowest(self._arcs(), q.x, 1)
            return low[0][1] if low and low[0][0] <= q.y + self.tol else None
        w = oracle_empty(self.pts.values(), q, self.tol)
        return None if w is None else w.id

    def k_lowest(self, x: float, k: int):
        self.work += len(self.pts)
        return [i for _, i in oracle_k_lowest(self._arcs(), x, k)]


def _span(p: Point):
    w = math.sqrt(max(0.0, 1.0 - p.y * p.y))
    return p.x - w, p.x + w


class _ArcEngine:
    def __init__(self, tol: float, cfg: Optional[dynarcs.ArcConfig]):
        self.s = dynarcs.DynamicArcSet((), cfg, tol)
        self.tol = tol

    @property
    def work(self):
        return self.s.work

    def insert(self, p: Point):
        self.s.insert((p.id, p.x, p.y))

    def delete(self, pid: int):
        self.s.delete(pid)

    def report(self, q: Point):
        return set(self.s.arcs_below(q))

    def empty(self, q: Point):
        low = self.s.lowest_arc(q.x)
        return low[1] if low is not None and low[0] <= q.y + self.tol else None

    def k_lowest(self, x: float, k: int):
        return [i for _, i in self.s.k_lowest(x, k)]


class _DynamicEngine:
    def __init__(self, tol: float, cfg: Optional[dynarcs.ArcConfig]):
        self.d = eng.DynamicUDRR((), cfg, tol)

    @property
    def work(self):
        return self.d.work

    def insert(self, p: Point):
        self.d.insert(p)

    def delete(self, pid: int):
        self.d.delete(pid)

    def report(self, q: Point):
        return self.d.report(q)

    def empty(self, q: Point):
        w = self.d.empty(q)
        return None if w is None else w.id


class _StaticRebuildEngine:
    """Static structure rebuilt lazily before the first query after a change."""

    def __init__(self, tol: float):
        self.tol = tol
        self.pts: Dict[int, Point] = {}
        self.s: Optional[eng.StaticUDRR] = None
        self.work = 0

    def insert(self, p: Point):
        if p.id in self.pts:
            raise ValueError(f"duplicate id {p.id}")
        self.pts[p.id] = p
        self.s = None

    def delete(self, pid: int):
        del self.pts[pid]
        self.s = None

    def _ready(self):
        if self.s is None:
            self.s = eng.StaticUDRR(list(self.pts.values()), tol=self.tol)
        return self.s

    def report(self, q: Point):
        s = self._ready()
        r = s.report(q)
        self.work += s.last.cells + s.last.comparisons + s.last.candidates
        return r

    def empty(self, q: Point):
        w = self._ready().empty(q)
        return None if w is None else w.id


def replay(trace: Trace, engine: str = "dynamic", tol: Optional[float] = None,
           cfg: Optional[dynarcs.ArcConfig] = None) -> List[dict]:
    """Run a trace; one result record per op."""
    t = geo.TAU if tol is None else tol
    arc = trace.arc_level
    if engine == "oracle":
        E = _OracleEngine(arc, t)
    elif engine == "dynamic":
        E = _ArcEngine(t, cfg) if arc else _DynamicEngine(t, cfg)
    elif engine in ("static", "static-rebuild"):
        if arc:
            raise ValueError("arc-level traces need the dynamic or oracle engine")
        E = _StaticRebuildEngine(t)
    else:
        raise ValueError(f"unknown engine {engine!r}")
    out = []
    pts: Dict[int, Point] = {}
    for i, op in enumerate(trace.ops):
        w0 = E.work
        t0 = time.perf_counter_ns()
        rec = {"op_index": i, "kind": op.kind}
        if op.kind == "I":
            p = Point(op.x, op.y, op.id)
            E.insert(p)
            pts[op.id] = p
        elif op.kind == "D":
            E.delete(op.id)
            pts.pop(op.id, None)
        elif op.kind == "Q":
            rec["answer_ids"] = sorted(E.report(Point(op.x, op.y)))
        elif op.kind == "E":
            wid = E.empty(Point(op.x, op.y))
            rec["witness"] = wid
            if wid is not None and not arc:
                rec["witness_ok"] = geo.dist(pts[wid], Point(op.x, op.y)) <= 1.0 + t
        elif op.kind == "K":
            if not arc:
                raise ValueError("K ops need an arc-level trace")
            rec["arcs"] = E.k_lowest(op.x, op.k)
        rec["nanos"] = time.perf_counter_ns() - t0
        rec["touched_counter"] = E.work - w0
        out.append(rec)
    return out


@dataclass
class Mismatch:
    op_index: int
    kind: str
    a: object
    b: object


def diff(A: Sequence[dict], B: Sequence[dict]) -> List[Mismatch]:
    """Ops whose answers differ.  Emptiness compares presence of a witness."""
    out = []
    for i, (ra, rb) in enumerate(zip(A, B)):
        if ra["kind"] != rb["kind"]:
            out.append(Mismatch(i, ra["kind"] + "/" + rb["kind"], ra, rb))
            continue
        k = ra["kind"]
        if k == "Q" and ra["answer_ids"] != rb["answer_ids"]:
            out.append(Mismatch(i, k, ra["answer_ids"], rb["answer_ids"]))
        elif k == "E":
            if (ra["witness"] is None) != (rb["witness"] is None) or \
                    not ra.get("witness_ok", True) or not rb.get("witness_ok", True):
                out.append(Mismatch(i, k, ra["witness"], rb["witness"]))
        elif k == "K" and ra["arcs"] != rb["arcs"]:
            out.append(Mismatch(i, k, ra["arcs"], rb["arcs"]))
    if len(A) != len(B):
        out.append(Mismatch(min(len(A), len(B)), "length", len(A), len(B)))
    return out


def write_results(results: Sequence[dict], fh) -> None:
    for r in results:
        fh.write(json.dumps(r) + "\n")


def read_results(fh) -> List[dict]:
    return [json.loads(line) for line in fh if line.strip()]


# ---------------------------------------------------------------------------
# benchmarks
# ---------------------------------------------------------------------------

@dataclass
class BenchRow:
    n: int
    build_seconds: float
    query_seconds: float
    query_counter_mean: float
    query_counter_max: float
    counter_bound_ratio: float
    dyn_ops: int
    dyn_counter_mean: float


def bench(sizes: Sequence[int], seed: int = 0, queries: int = 200, dyn_ops: int = 0,
          box_density: float = 4.0, csv_path: Optional[str] = None) -> List[BenchRow]:
    """Static build/query timing and counters; optional dynamic per-op counters.

    Points are uniform in a square whose side grows with sqrt(n) so the
    density (points per unit area) stays at ``box_density``.
    """
    rows = []
    for n in sizes:
        rng = np.random.default_rng(seed + n)
        L = math.sqrt(n / box_density)
        xy = rng.uniform(0, L, (n, 2))
        P = [Point(float(x), float(y), i) for i, (x, y) in enumerate(xy)]
        t0 = time.perf_counter()
        S = eng.StaticUDRR(P)
        tb = time.perf_counter() - t0
        cnt = []
        ratio = 0.0
        t0 = time.perf_counter()
        for _ in range(queries):
            q = Point(float(rng.uniform(0, L)), float(rng.uniform(0, L)))
            k = len(S.report(q))
            c = S.last.cells + S.last.comparisons + S.last.candidates
            cnt.append(c)
            ratio = max(ratio, c / (math.log2(max(n, 2)) + k))
        tq = (time.perf_counter() - t0) / max(queries, 1)
        dmean = 0.0
        if dyn_ops:
            dmean = dynamic_counter(n, seed + n, dyn_ops, box_density)
        rows.append(BenchRow(n, tb, tq, float(np.mean(cnt)) if cnt else 0.0,
                             float(max(cnt)) if cnt else 0.0, ratio, dyn_ops, dmean))
    if csv_path:
        with open(csv_path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(list(BenchRow.__dataclass_fields__))
            for r in rows:
                w.writerow([getattr(r, f) for f in BenchRow.__dataclass_fields__])
    return rows


def build_times(sizes: Sequence[int], budget: float = 20.0, seed: int = 0,
                box_density: float = 4.0) -> List[float]:
    """Mean CPU seconds of a static build per size.

    Each size is rebuilt until it has used ``budget`` CPU seconds, round-robin
    over the sizes, so small and large builds average over a similar stretch
    of a machine whose speed drifts.
    """
    pts = {}
    for n in sizes:
        xy = np.random.default_rng(seed + n).uniform(0, math.sqrt(n / box_density), (n, 2))
        pts[n] = [Point(float(x), float(y), i) for i, (x, y) in enumerate(xy)]
    total = {n: 0.0 for n in sizes}
    count = {n: 0 for n in sizes}
    while any(total[n] < budget or not count[n] for n in sizes):
        for n in sizes:
            if total[n] < budget or not count[n]:
                gc.collect()
                t = time.process_time()
                eng.StaticUDRR(pts[n])
                total[n] += time.process_time() - t
                count[n] += 1
    return [total[n] / count[n] for n in sizes]


def dynamic_counter(n: int, seed: int, ops: int, box_density: float = 4.0,
                    cfg: Optional[dynarcs.ArcConfig] = None) -> float:
    """Mean work per op of a mixed trace run on a dynamic engine holding ~n points."""
    rng = np.random.default_rng(seed)
    L = math.sqrt(n / box_density)
    xy = rng.uniform(0, L, (n, 2))
    P = [Point(float(x), float(y), i) for i, (x, y) in enumerate(xy)]
    D = eng.DynamicUDRR(P, cfg)
    live = list(range(n))
    nid = n
    w0 = D.work
    for _ in range(ops):
        u = rng.random()
        if u < 0.25:
            D.insert(Point(float(rng.uniform(0, L)), float(rng.uniform(0, L)), nid))
            live.append(nid)
            nid += 1
        elif u < 0.5 and live:
            j = int(rng.integers(len(live)))
            live[j], live[-1] = live[-1], live[j]
            D.delete(live.pop())
        elif u < 0.75:
            D.report(Point(float(rng.uniform(0, L)), float(rng.uniform(0, L))))
        else:
            D.empty(Point(float(rng.uniform(0, L)), float(rng.uniform(0, L))))
    return (D.work - w0) / max(ops, 1)


def loglog_exponent(ns: Sequence[float], values: Sequence[float]) -> float:
    """Slope of log(value) against log(n)."""
    x = np.log(np.asarray(ns, dtype=float))
    y = np.log(np.maximum(np.asarray(values, dtype=float), 1e-12))
    return float(np.polyfit(x, y, 1)[0])
