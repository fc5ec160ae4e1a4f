"""Unit-disk range reporting and emptiness, static and dynamic.

A query q is answered cell by cell.  Points in q's own cell are within
distance 1 of it (the cell has diameter < 1).  Every other non-empty cell C'
of q's neighborhood is separated from q by the line through one of its
edges; in that edge's frame the points of C' lie above y = 0, q lies on or
below it, and the question becomes one about unit semicircles below the
separator.  Each non-empty cell keeps one structure per edge.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Set, Tuple

from . import coverage as cov_mod
from . import dynarcs
from . import envelopes
from . import geometry as geo
from .coverage import Cell, Coverage
from .geometry import Point

EDGES = ("bottom", "top", "left", "right")


@dataclass(frozen=True)
class FrameTransform:
    """Maps the supporting line of one cell edge to y = 0, cell side up."""
    edge: str
    x0: float
    x1: float
    y0: float
    y1: float

    @classmethod
    def of(cls, cell: Cell, edge: str) -> "FrameTransform":
        if edge not in EDGES:
            raise ValueError(f"unknown edge {edge!r}")
        return cls(edge, cell.x_range[0], cell.x_range[1], cell.y_range[0], cell.y_range[1])

    def apply(self, p: Point) -> Point:
        e = self.edge
        if e == "bottom":
            return Point(p.x, p.y - self.y0, p.id)
        if e == "top":
            return Point(p.x, self.y1 - p.y, p.id)
        if e == "left":
            return Point(p.y, p.x - self.x0, p.id)
        return Point(p.y, self.x1 - p.x, p.id)

    def invert(self, f: Point) -> Point:
        e = self.edge
        if e == "bottom":
            return Point(f.x, f.y + self.y0, f.id)
        if e == "top":
            return Point(f.x, self.y1 - f.y, f.id)
        if e == "left":
            return Point(f.y + self.x0, f.x, f.id)
        return Point(self.x1 - f.y, f.x, f.id)


def facing_edge(cell: Cell, other: Cell) -> Optional[str]:
    """Edge of ``other`` whose line separates it from ``cell`` (None if same)."""
    if other.x_range[1] <= cell.x_range[0]:
        return "right"
    if other.x_range[0] >= cell.x_range[1]:
        return "left"
    if other.y_range[1] <= cell.y_range[0]:
        return "top"
    if other.y_range[0] >= cell.y_range[1]:
        return "bottom"
    return None


def _with_ids(P: Iterable[Point]) -> List[Point]:
    out = []
    seen = set()
    for i, p in enumerate(P):
        if p.id is None:
            p = Point(p.x, p.y, i)
        if p.id in seen:
            raise ValueError(f"duplicate point id {p.id}")
        seen.add(p.id)
        out.append(p)
    return out


@dataclass
class QueryStats:
    cells: int = 0
    candidates: int = 0
    comparisons: int = 0


class StaticUDRR:
    def __init__(self, P: Iterable[Point], mode: str = "cascading", tol: Optional[float] = None):
        self.tol = geo.TAU if tol is None else tol
        self.mode = mode
        pts = _with_ids(P)
        self.by_id: Dict[int, Point] = {p.id: p for p in pts}
        self.cov: Coverage = cov_mod.build(pts)
        self.structs: Dict[Tuple[Tuple[float, float], str], envelopes.LayeredStructure] = {}
        for rec in self.cov.nonempty_cells():
            for e in EDGES:
                fr = FrameTransform.of(rec.cell, e)
                fp = [fr.apply(p) for p in rec.point_list()]
                fp = [f for f in fp if f.y <= 1.0 + self.tol]
                self.structs[(rec.cell.key, e)] = envelopes.build_structure(fp, mode, self.tol)
        self.last = QueryStats()

    def __len__(self):
        return len(self.by_id)

    def _plan(self, q: Point):
        loc = self.cov.locate(q)
        if loc is None:
            return None
        cell, nbrs = loc
        return cell, [self.cov.record(k) for k in nbrs]

    def report(self, q: Point) -> Set[int]:
        st = QueryStats()
        self.last = st
        plan = self._plan(q)
        if plan is None:
            return set()
        cell, recs = plan
        out: Set[int] = set()
        for rec in recs:
            st.cells += 1
            if rec.cell.key == cell.key:
                pts = rec.point_list()
                st.candidates += len(pts)
                out.update(p.id for p in pts)
                continue
            e = facing_edge(cell, rec.cell)
            s = self.structs[(rec.cell.key, e)]
            qf = FrameTransform.of(rec.cell, e).apply(q)
            found = s.report_points(qf)
            st.comparisons += s.last_comparisons
            st.candidates += len(found)
            out.update(f.id for f in found)
        return out

    def empty(self, q: Point) -> Optional[Point]:
        """A point within distance 1 of q, or None."""
        plan = self._plan(q)
        if plan is None:
            return None
        cell, recs = plan
        own = self.cov.record(cell.key)
        if own.points:
            return own.points[0][3]
        for rec in recs:
            if rec.cell.key == cell.key:
                continue
            e = facing_edge(cell, rec.cell)
            s = self.structs[(rec.cell.key, e)]
            hit = s.empty(FrameTransform.of(rec.cell, e).apply(q))
            if hit is not None:
                return self.by_id[hit.id]
        return None


def static_report(P: Iterable[Point], q: Point, **kw) -> Set[int]:
    return StaticUDRR(P, **kw).report(q)


def static_empty(P: Iterable[Point], q: Point, **kw) -> Optional[Point]:
    return StaticUDRR(P, **kw).empty(q)


class DynamicUDRR:
    def __init__(self, P: Iterable[Point] = (), cfg: Optional[dynarcs.ArcConfig] = None,
                 tol: Optional[float] = None):
        self.tol = geo.TAU if tol is None else tol
        self.cfg = cfg or dynarcs.ArcConfig()
        self.by_id: Dict[int, Point] = {}
        self.cov = Coverage()
        self.structs: Dict[Tuple[float, float], Dict[str, dynarcs.DynamicArcSet]] = {}
        self.rebuilds = 0
        self.visits = 0
        self._work = 0
        pts = _with_ids(P)
        if pts:
            for p in pts:
                self.by_id[p.id] = p
            self.cov = cov_mod.build(pts)
            self._rebuild_structs()

    def __len__(self):
        return len(self.by_id)

    def _arcs_for(self, cell: Cell, pts: Iterable[Point]) -> Dict[str, list]:
        out = {e: [] for e in EDGES}
        for e in EDGES:
            fr = FrameTransform.of(cell, e)
            for p in pts:
                f = fr.apply(p)
                if f.y < 1.0:
                    out[e].append((p.id, f.x, max(f.y, 0.0)))
        return out

    @property
    def work(self) -> int:
        """Cells visited plus candidates touched and arcs placed so far."""
        return self.visits + self._work

    def _metered(self, s: dynarcs.DynamicArcSet, fn, *args):
        w = s.work
        r = fn(*args)
        self._work += s.work - w
        return r

    def _rebuild_structs(self):
        self.structs = {}
        for rec in self.cov.nonempty_cells():
            arcs = self._arcs_for(rec.cell, rec.point_list())
            d = {e: dynarcs.DynamicArcSet(arcs[e], self.cfg, self.tol) for e in EDGES}
            self._work += sum(s.work for s in d.values())
            self.structs[rec.cell.key] = d

    def insert(self, p: Point) -> None:
        if p.id is None:
            raise ValueError("dynamic points need ids")
        if p.id in self.by_id:
            raise ValueError(f"duplicate point id {p.id}")
        h = self.cov.insert(p)
        self.by_id[p.id] = p
        cell = self.cov.record(h.key).cell
        d = self.structs.get(h.key)
        if d is None:
            d = {e: dynarcs.DynamicArcSet((), self.cfg, self.tol) for e in EDGES}
            self.structs[h.key] = d
        for e, arcs in self._arcs_for(cell, [p]).items():
            for a in arcs:
                self._metered(d[e], d[e].insert, a)

    def delete(self, p) -> None:
        pid = p.id if isinstance(p, Point) else int(p)
        pt = self.by_id.get(pid)
        if pt is None:
            raise cov_mod.UnknownPoint(pid)
        key, _ = self.cov.find(pt)
        rebuilt = self.cov.delete(pt)
        del self.by_id[pid]
        if rebuilt:
            self.rebuilds += 1
            self._rebuild_structs()
            return
        for s in self.structs[key].values():
            if pid in s:
                self._metered(s, s.delete, pid)

    def _plan(self, q: Point):
        loc = self.cov.locate(q)
        if loc is None:
            return None
        cell, nbrs = loc
        return cell, [self.cov.record(k) for k in nbrs]

    def report(self, q: Point) -> Set[int]:
        plan = self._plan(q)
        if plan is None:
            return set()
        cell, recs = plan
        out: Set[int] = set()
        for rec in recs:
            self.visits += 1
            if rec.cell.key == cell.key:
                out.update(t[2] for t in rec.points)
                continue
            if not rec.points:
                continue
            e = facing_edge(cell, rec.cell)
            qf = FrameTransform.of(rec.cell, e).apply(q)
            s = self.structs[rec.cell.key][e]
            out.update(self._metered(s, s.arcs_below, qf))
        return out

    def empty(self, q: Point) -> Optional[Point]:
        plan = self._plan(q)
        if plan is None:
            return None
        cell, recs = plan
        own = self.cov.record(cell.key)
        if own.points:
            return own.points[0][3]
        for rec in recs:
            self.visits += 1
            if rec.cell.key == cell.key or not rec.points:
                continue
            e = facing_edge(cell, rec.cell)
            qf = FrameTransform.of(rec.cell, e).apply(q)
            s = self.structs[rec.cell.key][e]
            low = self._metered(s, s.lowest_arc, qf.x)
            if low is not None and low[0] <= qf.y + self.tol:
                return self.by_id[low[1]]
        return None


def dyn_insert(d: DynamicUDRR, p: Point) -> None:
    d.insert(p)


def dyn_delete(d: DynamicUDRR, p) -> None:
    d.delete(p)


def dyn_report(d: DynamicUDRR, q: Point) -> Set[int]:
    return d.report(q)


def dyn_empty(d: DynamicUDRR, q: Point) -> Optional[Point]:
    return d.empty(q)
