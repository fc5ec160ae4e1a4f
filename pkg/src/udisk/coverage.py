"""Conforming coverage of a point set by half-unit grid cells.

Each axis keeps its own ordered list of partition lines and its own zone
bookkeeping (:class:`Axis`).  A cell is the product of a column and a row; it
is keyed by its bottom-left corner.  The registry holds the 7x7 block around
every non-empty cell, and every registered cell knows the non-empty cells
whose block contains it.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

from .geometry import Point

HALF = 0.5
MARGIN_LEFT = 1.75          # zone left bound sits this far left of its first point
MARGIN_RIGHT = 2.0          # ... and the right bound at least this far right
GAP_SPLIT = 5.0             # a larger gap between consecutive points starts a new zone
REACH = 3                   # a block spans REACH columns/rows on each side
_EPS = 1e-12


class UnknownPoint(KeyError):
    pass


class Axis:
    """Partition lines and zone bounds along one axis.

    ``lines`` is strictly increasing.  ``bounds`` lists the zone bounding
    coordinates in order; even positions are left (lower) bounds and odd
    positions are right (upper) bounds, so point-zones are
    ``[bounds[2j], bounds[2j+1]]``.
    """

    def __init__(self):
        self.lines: List[float] = []
        self.bounds: List[float] = []
        self.log: List[str] = []

    # construction -------------------------------------------------------
    @classmethod
    def from_values(cls, values: Iterable[float]) -> "Axis":
        ax = cls()
        vs = sorted(values)
        i = 0
        while i < len(vs):
            lo = vs[i] - MARGIN_LEFT
            j = i
            while j + 1 < len(vs) and vs[j + 1] - vs[j] <= GAP_SPLIT:
                j += 1
            width = vs[j] + MARGIN_RIGHT - lo
            cols = math.ceil(width / HALF - 1e-9)
            for c in range(cols + 1):
                ax.lines.append(lo + c * HALF)
            ax.bounds.extend([lo, lo + cols * HALF])
            i = j + 1
        return ax

    # queries ------------------------------------------------------------
    def column(self, v: float) -> Optional[int]:
        """Index i with lines[i] <= v < lines[i+1], or None outside."""
        i = bisect.bisect_right(self.lines, v) - 1
        if i < 0 or i + 1 >= len(self.lines):
            return None
        return i

    def zone_of(self, v: float) -> Optional[int]:
        """Index j of the point-zone [bounds[2j], bounds[2j+1]) holding v."""
        k = bisect.bisect_right(self.bounds, v) - 1
        if k < 0 or k % 2 == 1:
            return None
        return k // 2

    def index_of(self, coord: float) -> int:
        i = bisect.bisect_left(self.lines, coord)
        if i == len(self.lines) or abs(self.lines[i] - coord) > _EPS:
            raise KeyError(coord)
        return i

    def width(self, i: int) -> float:
        return self.lines[i + 1] - self.lines[i]

    def narrow_columns(self) -> List[int]:
        return [i for i in range(len(self.lines) - 1)
                if self.zone_of(self.lines[i]) is not None and self.width(i) < HALF - 1e-9]

    # mutation -----------------------------------------------------------
    def _add_line(self, c: float):
        i = bisect.bisect_left(self.lines, c)
        if i < len(self.lines) and abs(self.lines[i] - c) <= _EPS:
            return
        if i > 0 and abs(self.lines[i - 1] - c) <= _EPS:
            return
        self.lines.insert(i, c)

    def _merge_at(self, right_bound: float, left_bound: float):
        # drop a right bound and the following left bound, fusing two zones
        k = bisect.bisect_left(self.bounds, right_bound - _EPS)
        assert k % 2 == 1 and abs(self.bounds[k] - right_bound) <= _EPS
        assert abs(self.bounds[k + 1] - left_bound) <= _EPS
        del self.bounds[k:k + 2]

    def _grow_right(self, zone: int, target: float) -> None:
        """Move the right bound of ``zone`` to ``target`` in half steps."""
        k = 2 * zone + 1
        old = self.bounds[k]
        nxt = self.bounds[k + 1] if k + 1 < len(self.bounds) else math.inf
        if target < nxt - _EPS:
            steps = round((target - old) / HALF)
            for s in range(1, steps + 1):
                self._add_line(old + s * HALF)
            self.bounds[k] = old + steps * HALF
            self.log.append("grow")
            return
        # would reach the next zone: stop at the largest half multiple not
        # crossing it, leaving a narrow column, and merge the two zones
        steps = math.floor((nxt - old) / HALF + 1e-9)
        stop = old + steps * HALF
        if abs(stop - nxt) <= 1e-9:
            steps -= 1
            stop = nxt
        for s in range(1, steps + 1):
            self._add_line(old + s * HALF)
        self.bounds[k] = stop if stop != nxt else nxt
        self._merge_at(self.bounds[k], nxt)
        self.log.append("merge")

    def _grow_left(self, zone: int, target: float) -> None:
        k = 2 * zone
        old = self.bounds[k]
        prv = self.bounds[k - 1] if k >= 1 else -math.inf
        if target > prv + _EPS:
            steps = round((old - target) / HALF)
            for s in range(1, steps + 1):
                self._add_line(old - s * HALF)
            self.bounds[k] = old - steps * HALF
            self.log.append("grow")
            return
        steps = math.floor((old - prv) / HALF + 1e-9)
        stop = old - steps * HALF
        if abs(stop - prv) <= 1e-9:
            steps -= 1
            stop = prv
        for s in range(1, steps + 1):
            self._add_line(old - s * HALF)
        self.bounds[k] = stop
        self._merge_at(prv, stop)
        self.log.append("merge")

    def ensure(self, v: float) -> bool:
        """Make the column of v have REACH columns on both sides inside its zone.

        Returns True when lines or bounds changed.
        """
        z = self.zone_of(v)
        if z is not None:
            i = self.column(v)
            lo_i = self.index_of(self.bounds[2 * z])
            hi_i = self.index_of(self.bounds[2 * z + 1])
            changed = False
            if i + REACH + 1 > hi_i:
                self._grow_right(z, self.lines[i + 1] + REACH * HALF)
                changed = True
                z = self.zone_of(v)
            if i - REACH < lo_i:
                self._grow_left(z, self.lines[i] - REACH * HALF)
                changed = True
            return changed
        k = bisect.bisect_right(self.bounds, v) - 1
        l1 = self.bounds[k] if k >= 0 else -math.inf
        l2 = self.bounds[k + 1] if k + 1 < len(self.bounds) else math.inf
        d1, d2 = v - l1, l2 - v
        if min(d1, d2) > MARGIN_LEFT:
            lo = v - MARGIN_LEFT
            new = [lo + c * HALF for c in range(2 * REACH + 2)]
            pos = bisect.bisect_left(self.lines, lo)
            self.lines[pos:pos] = new
            bpos = k + 1
            self.bounds[bpos:bpos] = [new[0], new[-1]]
            self.log.append("new-zone")
            return True
        if d1 <= d2:
            zone = k // 2
            m0 = math.floor((v - l1) / HALF) + 1
            self._grow_right(zone, l1 + (m0 + REACH) * HALF)
        else:
            zone = (k + 1) // 2
            m0 = math.ceil((l2 - v) / HALF - 1e-12)
            m0 = max(m0, 0)
            # the column holding v starts at l2 - m0 * HALF (<= v)
            self._grow_left(zone, l2 - (m0 + REACH) * HALF)
        return True

    def check(self) -> List[str]:
        """Narrow columns must stay clear of zone bounds and of each other."""
        errs = []
        narrow = self.narrow_columns()
        bidx = [self.index_of(b) for b in self.bounds]
        for a, b in zip(narrow, narrow[1:]):
            if b - a - 1 < 7:
                errs.append(f"narrow columns {a},{b} closer than 7")
        for n in narrow:
            for bi in bidx:
                if bi - 7 <= n < bi + 7:
                    errs.append(f"narrow column {n} within 7 of a bound")
        return errs


@dataclass(frozen=True)
class Zone:
    orientation: str
    lo: float
    hi: float
    kind: str = "point"


@dataclass(frozen=True)
class Cell:
    key: Tuple[float, float]
    x_range: Tuple[float, float]
    y_range: Tuple[float, float]
    kind: str = "regular"

    def contains(self, q: Point) -> bool:
        return (self.x_range[0] <= q.x < self.x_range[1]
                and self.y_range[0] <= q.y < self.y_range[1])


@dataclass
class CellRecord:
    cell: Cell
    neighbors: set = field(default_factory=set)     # keys of non-empty cells
    points: List[tuple] = field(default_factory=list)  # sorted (x, y, id, Point)

    def point_list(self) -> List[Point]:
        return [t[3] for t in self.points]


@dataclass(frozen=True)
class CellHandle:
    key: Tuple[float, float]
    new_cells: tuple
    newly_nonempty: bool


def _pkey(p: Point) -> tuple:
    return (p.x, p.y, -1 if p.id is None else p.id, p)


class Coverage:
    def __init__(self):
        self.ax = Axis()
        self.ay = Axis()
        self.registry: Dict[Tuple[float, float], CellRecord] = {}
        self.deletion_counter = 0
        self.total_points = 0
        self.live = 0
        self.rebuilds = 0

    # helpers ---------------------------------------------------------------
    def cell_index(self, q: Point) -> Optional[Tuple[int, int]]:
        i = self.ax.column(q.x)
        j = self.ay.column(q.y)
        if i is None or j is None:
            return None
        return i, j

    def _cell_at(self, i: int, j: int) -> Cell:
        xs, ys = self.ax.lines, self.ay.lines
        kind = "regular" if (self.ax.zone_of(xs[i]) is not None
                             and self.ay.zone_of(ys[j]) is not None) else "gap"
        return Cell((xs[i], ys[j]), (xs[i], xs[i + 1]), (ys[j], ys[j + 1]), kind)

    def block(self, i: int, j: int) -> List[Tuple[int, int]]:
        return [(a, b) for a in range(i - REACH, i + REACH + 1)
                for b in range(j - REACH, j + REACH + 1)]

    def _key(self, i: int, j: int):
        return (self.ax.lines[i], self.ay.lines[j])

    def indices_of_key(self, key) -> Tuple[int, int]:
        return self.ax.index_of(key[0]), self.ay.index_of(key[1])

    def _register_block(self, i: int, j: int) -> List[Tuple[float, float]]:
        ck = self._key(i, j)
        new = []
        for a, b in self.block(i, j):
            k = self._key(a, b)
            rec = self.registry.get(k)
            if rec is None:
                rec = CellRecord(self._cell_at(a, b))
                self.registry[k] = rec
                new.append(k)
                # a new cell learns about every non-empty cell around it
                for a2, b2 in self.block(a, b):
                    if 0 <= a2 < len(self.ax.lines) - 1 and 0 <= b2 < len(self.ay.lines) - 1:
                        r2 = self.registry.get(self._key(a2, b2))
                        if r2 is not None and r2.points:
                            rec.neighbors.add(r2.cell.key)
            rec.neighbors.add(ck)
        return new

    # public API ---------------------------------------------------------------
    def locate(self, q: Point):
        ij = self.cell_index(q)
        if ij is None:
            return None
        rec = self.registry.get(self._key(*ij))
        if rec is None:
            return None
        return rec.cell, sorted(rec.neighbors)

    def record(self, key) -> CellRecord:
        return self.registry[key]

    def nonempty_cells(self) -> List[CellRecord]:
        return [r for r in self.registry.values() if r.points]

    def points(self) -> List[Point]:
        out = []
        for r in self.registry.values():
            out.extend(r.point_list())
        return out

    def insert(self, p: Point) -> CellHandle:
        self.ax.ensure(p.x)
        self.ay.ensure(p.y)
        i, j = self.cell_index(p)
        k = self._key(i, j)
        rec = self.registry.get(k)
        newly = rec is None or not rec.points
        new = self._register_block(i, j) if newly else []
        rec = self.registry[k]
        bisect.insort(rec.points, _pkey(p), key=lambda t: t[:3])
        self.total_points += 1
        self.live += 1
        return CellHandle(k, tuple(new), newly)

    def find(self, p: Point) -> Tuple[Tuple[float, float], int]:
        ij = self.cell_index(p)
        if ij is not None:
            k = self._key(*ij)
            rec = self.registry.get(k)
            if rec is not None:
                for idx, t in enumerate(rec.points):
                    if t[2] == (-1 if p.id is None else p.id) and t[0] == p.x and t[1] == p.y:
                        return k, idx
        raise UnknownPoint(p)

    def delete(self, p: Point) -> bool:
        """Remove p; returns True when the deletion triggered a rebuild."""
        k, idx = self.find(p)
        del self.registry[k].points[idx]
        self.deletion_counter += 1
        self.live -= 1
        if self.deletion_counter >= self.total_points / 2:
            live = self.points()
            fresh = build(live)
            self.__dict__.update(fresh.__dict__)
            self.rebuilds += 1
            return True
        return False

    # invariant checks ----------------------------------------------------------
    def zones(self) -> List[Zone]:
        out = []
        for name, ax in (("vertical", self.ax), ("horizontal", self.ay)):
            for a, b in zip(ax.bounds[::2], ax.bounds[1::2]):
                out.append(Zone(name, a, b))
        return out

    def check_blocks(self) -> List[str]:
        errs = []
        for rec in self.registry.values():
            if not rec.points:
                continue
            i, j = self.indices_of_key(rec.cell.key)
            count = 0
            for a, b in self.block(i, j):
                if not (0 <= a < len(self.ax.lines) - 1 and 0 <= b < len(self.ay.lines) - 1):
                    continue
                r2 = self.registry.get(self._key(a, b))
                if r2 is not None:
                    count += 1
                    if rec.cell.key not in r2.neighbors:
                        errs.append(f"{r2.cell.key} misses neighbor {rec.cell.key}")
            if count != 49:
                errs.append(f"block of {rec.cell.key} has {count} cells")
        return errs


def build(P: Iterable[Point]) -> Coverage:
    pts = list(P)
    cov = Coverage()
    if not pts:
        return cov
    cov.ax = Axis.from_values(p.x for p in pts)
    cov.ay = Axis.from_values(p.y for p in pts)
    groups: Dict[Tuple[int, int], list] = {}
    for p in pts:
        groups.setdefault(cov.cell_index(p), []).append(_pkey(p))
    for (i, j), items in groups.items():
        k = cov._key(i, j)
        if k not in cov.registry:
            cov.registry[k] = CellRecord(cov._cell_at(i, j))
        cov.registry[k].points = sorted(items, key=lambda t: t[:3])
    # register blocks and neighbor lists in one pass
    for (i, j) in groups:
        ck = cov._key(i, j)
        for a, b in cov.block(i, j):
            k = cov._key(a, b)
            rec = cov.registry.get(k)
            if rec is None:
                rec = CellRecord(cov._cell_at(a, b))
                cov.registry[k] = rec
            rec.neighbors.add(ck)
    cov.total_points = len(pts)
    cov.live = len(pts)
    return cov


def locate(cov: Coverage, q: Point):
    return cov.locate(q)


def insert(cov: Coverage, p: Point) -> CellHandle:
    return cov.insert(p)


def delete(cov: Coverage, p: Point) -> bool:
    return cov.delete(p)
