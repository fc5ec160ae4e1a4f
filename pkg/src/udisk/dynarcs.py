"""Dynamic sets of unit arcs below y = 0: k lowest arcs at x, arcs below a point.

A :class:`DeletionOnlyArcs` keeps one trapezoid cutting per level
k_i = 2^i with conflict lists and tombstones deleted arcs.  The arcs
meeting the vertical line at x below the top of the level-i cell over x are
all in that cell's conflict list, so if at least k live ones are there (or
the top is the separator) the k lowest live arcs are among them; otherwise
the next coarser level is tried.  Correctness does not depend on the
cutting guarantees, only on exact conflict lists; the guarantees keep the
lists short.

:class:`DynamicArcSet` adds insertions with the logarithmic method.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import cuttings as cu
from . import geometry as geo
from .geometry import Point


class UnknownArc(KeyError):
    pass


@dataclass
class ArcConfig:
    leaf_threshold: int = 32
    C: float = 12.0
    C_size: float = 48.0
    check: bool = False


ArcSpec = Tuple[int, float, float]   # (id, center x, center y) with 0 <= y < 1


def _ids_sorted(A: cu.ArcSet, pos: np.ndarray, x: float) -> List[Tuple[float, int]]:
    ys = A.y_at(pos, x)
    order = np.lexsort((A.ids[pos], ys))
    return [(float(ys[o]), int(A.ids[pos[o]])) for o in order]


class DeletionOnlyArcs:
    def __init__(self, arcs: Iterable[ArcSpec], cfg: Optional[ArcConfig] = None,
                 tol: Optional[float] = None):
        self.cfg = cfg or ArcConfig()
        self.tol = geo.TAU if tol is None else tol
        arcs = list(arcs)
        self.A = cu.ArcSet([a[0] for a in arcs], [a[1] for a in arcs], [a[2] for a in arcs])
        self.n0 = len(arcs)
        self.live = np.ones(self.n0, dtype=bool)
        self.n_live = self.n0
        self.levels: List[cu.TrapezoidCutting] = []
        self.touched = 0
        if self.n0 > self.cfg.leaf_threshold:
            ccfg = cu.CuttingConfig(B=2, C=self.cfg.C, C_size=self.cfg.C_size)
            for vs in cu.hierarchy(self.A, 1, ccfg, self.tol, check=self.cfg.check):
                tc = cu.to_trapezoids(self.A, vs, self.tol)
                # conflict ids -> positions once, for fast filtering
                for c in tc.cells:
                    c.conflicts = self.A.positions(c.conflicts)
                self.levels.append(tc)

    def __len__(self):
        return self.n_live

    def __contains__(self, arc_id) -> bool:
        p = self.A._pos.get(int(arc_id))
        return p is not None and bool(self.live[p])

    def ids(self) -> List[int]:
        return [int(i) for i in self.A.ids[self.live]]

    def specs(self) -> List[ArcSpec]:
        m = self.live
        return list(zip(self.A.ids[m].tolist(), self.A.cx[m].tolist(), self.A.cy[m].tolist()))

    def delete(self, arc_id) -> None:
        p = self.A._pos.get(int(arc_id))
        if p is None or not self.live[p]:
            raise UnknownArc(arc_id)
        self.live[p] = False
        self.n_live -= 1

    def _scan(self, pos: np.ndarray, x: float) -> np.ndarray:
        t = self.tol
        pos = pos[self.live[pos]]
        ok = (self.A.xl[pos] - t <= x) & (x <= self.A.xr[pos] + t)
        return pos[ok]

    def k_lowest(self, x: float, k: int) -> List[Tuple[float, int]]:
        """(y, id) of the k lowest live arcs over x, lowest first."""
        if k <= 0 or self.n_live == 0:
            return []
        if not self.levels:
            pos = self._scan(np.arange(self.n0), x)
            self.touched += self.n0
            return _ids_sorted(self.A, pos, x)[:k]
        i = min(max(0, math.ceil(math.log2(k))), len(self.levels) - 1)
        for tc in self.levels[i:]:
            cell = tc.cell_at(x)
            if cell is None:
                return []
            pos = self._scan(cell.conflicts, x)
            self.touched += len(cell.conflicts)
            top = cell.top_y(x)
            ys = self.A.y_at(pos, x)
            under = pos[ys <= top + self.tol]
            is_sep = cell.top.kind == "flat" and cell.top.cy >= 0.0
            if len(under) >= k or is_sep:
                return _ids_sorted(self.A, under, x)[:k]
        # the coarsest level is a single separator-topped cell, so this is
        # reached only when x lies outside every cell
        return []

    def lowest_arc(self, x: float) -> Optional[Tuple[float, int]]:
        r = self.k_lowest(x, 1)
        return r[0] if r else None

    def arcs_below(self, q: Point) -> List[int]:
        """Ids of live arcs meeting the downward ray from q."""
        k = max(2, math.ceil(math.log2(max(self.n0, 2))))
        while True:
            res = self.k_lowest(q.x, k)
            below = [i for y, i in res if y <= q.y + self.tol]
            if len(below) < len(res) or len(res) < k:
                return below
            k *= 2


class DynamicArcSet:
    """Logarithmic method over deletion-only sets; slot j holds <= 2^j arcs."""

    def __init__(self, arcs: Iterable[ArcSpec] = (), cfg: Optional[ArcConfig] = None,
                 tol: Optional[float] = None):
        self.cfg = cfg or ArcConfig()
        self.tol = geo.TAU if tol is None else tol
        self.slots: List[Optional[DeletionOnlyArcs]] = []
        self.where: Dict[int, int] = {}
        self.rebuilds = 0
        self.placed = 0
        self._touched_dead = 0
        arcs = list(arcs)
        if arcs:
            j = max(0, math.ceil(math.log2(len(arcs))))
            self._place(j, arcs)

    def __len__(self):
        return len(self.where)

    def __contains__(self, arc_id) -> bool:
        return int(arc_id) in self.where

    def _place(self, j: int, arcs: List[ArcSpec]):
        while len(self.slots) <= j:
            self.slots.append(None)
        s = DeletionOnlyArcs(arcs, self.cfg, self.tol)
        old = self.slots[j]
        if old is not None:
            self._touched_dead += old.touched
        self.slots[j] = s
        self.placed += len(arcs)
        for a in arcs:
            self.where[int(a[0])] = j
        self.rebuilds += 1

    def _drop(self, j: int):
        self._touched_dead += self.slots[j].touched
        self.slots[j] = None

    def insert(self, arc: ArcSpec) -> None:
        aid = int(arc[0])
        if aid in self.where:
            raise ValueError(f"arc {aid} already present")
        if not 0.0 <= arc[2] < 1.0:
            raise ValueError("arc center must satisfy 0 <= y < 1")
        carry = [arc]
        j = 0
        while j < len(self.slots) and self.slots[j] is not None:
            carry.extend(self.slots[j].specs())
            self._drop(j)
            j += 1
        # the merged set may fit a lower slot after deletions
        j = max(0, math.ceil(math.log2(len(carry))))
        while j < len(self.slots) and self.slots[j] is not None:
            carry.extend(self.slots[j].specs())
            self._drop(j)
            j = max(j + 1, math.ceil(math.log2(len(carry))))
        self._place(j, carry)

    def delete(self, arc_id) -> None:
        aid = int(arc_id)
        j = self.where.pop(aid, None)
        if j is None:
            raise UnknownArc(arc_id)
        s = self.slots[j]
        s.delete(aid)
        if s.n_live == 0:
            self._drop(j)
        elif s.n_live <= s.n0 // 2:
            self._place(j, s.specs())

    def _parts(self):
        return [s for s in self.slots if s is not None and s.n_live]

    def k_lowest(self, x: float, k: int, sorted: bool = True) -> List[Tuple[float, int]]:
        """The k lowest live arcs over x; unsorted mode returns the same set."""
        out: List[Tuple[float, int]] = []
        for s in self._parts():
            out.extend(s.k_lowest(x, k))
        out.sort()
        out = out[:k]
        if not sorted:
            out.sort(key=lambda t: t[1])
        return out

    def lowest_arc(self, x: float) -> Optional[Tuple[float, int]]:
        r = self.k_lowest(x, 1)
        return r[0] if r else None

    def arcs_below(self, q: Point) -> List[int]:
        out: List[int] = []
        for s in self._parts():
            out.extend(s.arcs_below(q))
        return out

    @property
    def touched(self) -> int:
        return self._touched_dead + sum(s.touched for s in self.slots if s is not None)

    @property
    def work(self) -> int:
        """Candidates touched by queries plus arcs placed by rebuilds."""
        return self.touched + self.placed
