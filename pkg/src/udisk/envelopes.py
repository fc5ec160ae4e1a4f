"""Lower-envelope layers of unit semicircles and the layered query structure.

Points live above the separator y = 0 and queries below it.  Layer i is the
lower envelope of the semicircles of the points left after removing the
sources of layers 1..i-1; its sources are exactly the vertices of the i-th
lower alpha-hull layer, so the layers come straight out of
:func:`hulls.peel_layers`.

Full lower semicircles are used rather than their parts below y = 0.  For a
query below the separator the two give the same answers, and the full curves
keep every layer connected.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Set

from . import geometry as geo
from . import hulls
from .geometry import Point


@dataclass(frozen=True)
class Piece:
    source: Point
    x0: float
    x1: float


@dataclass
class EnvelopeLayer:
    pieces: List[Piece]

    @property
    def sources(self) -> List[Point]:
        return [p.source for p in self.pieces]

    @property
    def starts(self) -> List[float]:
        return [p.x0 for p in self.pieces]

    @property
    def breakpoints(self) -> List[float]:
        """Interior switch abscissae between consecutive pieces."""
        return [p.x0 for p in self.pieces[1:]]

    def span(self):
        return (self.pieces[0].x0, self.pieces[-1].x1) if self.pieces else None

    def locate(self, x: float) -> Optional[int]:
        """Index of the piece over x (right piece at ties), None outside."""
        if not self.pieces or x < self.pieces[0].x0 or x > self.pieces[-1].x1:
            return None
        return max(bisect.bisect_right(self.starts, x) - 1, 0)

    def height(self, x: float) -> float:
        i = self.locate(x)
        if i is None:
            return math.inf
        return hulls.semicircle_y(self.pieces[i].source, x)


def layer_from_vertices(vs: Sequence[Point]) -> EnvelopeLayer:
    """Sweep x-sorted hull-layer vertices into envelope pieces."""
    vs = list(vs)
    if not vs:
        return EnvelopeLayer([])
    cuts = [vs[0].x - 1.0]
    for u, v in zip(vs, vs[1:]):
        cuts.append(hulls.switch_point(u, v)[0])
    cuts.append(vs[-1].x + 1.0)
    return EnvelopeLayer([Piece(v, cuts[i], cuts[i + 1]) for i, v in enumerate(vs)])


def build_layers(Q: Sequence[Point], tol: Optional[float] = None) -> List[EnvelopeLayer]:
    pts = sorted(Q, key=lambda p: p.key())
    if not pts:
        return []
    g = hulls.build_tree_graph(pts, tol)
    layers = hulls.peel_layers(g)
    g.release()
    return [layer_from_vertices(layer) for layer in layers]


class Cascade:
    """Fractional cascading over the piece-start catalogs of all layers.

    Augmented catalog M[i] holds the keys of layer i plus every second key
    of M[i+1].  For every prefix length of M[i] we keep how many of its keys
    come from layer i and how many M[i+1] keys are <= the last of them, so
    one binary search in M[0] is followed by O(1) work per layer.
    """

    def __init__(self, catalogs: List[List[float]]):
        self.catalogs = catalogs
        L = len(catalogs)
        self.M: List[List[float]] = [[] for _ in range(L)]
        self.own: List[List[int]] = [[] for _ in range(L)]
        self.bridge: List[List[int]] = [[] for _ in range(L)]
        for i in range(L - 1, -1, -1):
            mine = [(x, 0) for x in catalogs[i]]
            down = []
            if i + 1 < L:
                down = [(x, 1) for x in self.M[i + 1][1::2]]
            merged = sorted(mine + down)
            self.M[i] = [x for x, _ in merged]
            own = [0]
            for _, tag in merged:
                own.append(own[-1] + (tag == 0))
            self.own[i] = own
            if i + 1 < L:
                nxt = self.M[i + 1]
                br = [0]
                for x in self.M[i]:
                    br.append(bisect.bisect_right(nxt, x))
                self.bridge[i] = br

    def locate_all(self, x: float, counter: Optional[list] = None, limit: Optional[int] = None):
        """Yield bisect_right(catalog_i, x) for i = 0, 1, ... lazily."""
        L = len(self.catalogs) if limit is None else min(limit, len(self.catalogs))
        if L == 0:
            return
        M0 = self.M[0]
        pos = bisect.bisect_right(M0, x)
        if counter is not None:
            counter[0] += max(1, M0 and int(math.log2(len(M0))) + 1 or 1)
        for i in range(L):
            yield self.own[i][pos]
            if i + 1 >= L:
                return
            pos = self.bridge[i][pos]
            nxt = self.M[i + 1]
            while pos < len(nxt) and nxt[pos] <= x:
                pos += 1
                if counter is not None:
                    counter[0] += 1
            if counter is not None:
                counter[0] += 1


@dataclass
class LayeredStructure:
    layers: List[EnvelopeLayer]
    mode: str = "cascading"
    cascade: Optional[Cascade] = None
    tol: float = field(default_factory=geo.tolerance)
    comparisons: int = 0

    def __post_init__(self):
        if self.mode not in ("cascading", "binary"):
            raise ValueError(f"unknown mode {self.mode!r}")
        self._starts = [lay.starts for lay in self.layers]
        if self.cascade is None:
            self.cascade = Cascade(self._starts)

    @property
    def size(self) -> int:
        return sum(len(l.pieces) for l in self.layers)

    def _positions(self, x: float, counter: list):
        if self.mode == "cascading":
            yield from self.cascade.locate_all(x, counter)
        else:
            for st in self._starts:
                counter[0] += max(1, int(math.log2(len(st) or 1)) + 1)
                yield bisect.bisect_right(st, x)

    def locate_positions(self, x: float) -> List[Optional[int]]:
        """Piece index of every layer at x (None where x is outside)."""
        out = []
        c = [0]
        for lay, pos in zip(self.layers, self._positions(x, c)):
            if pos == 0 or x > lay.pieces[-1].x1:
                out.append(None)
            else:
                out.append(pos - 1)
        return out

    def report(self, q: Point) -> Set:
        return {p.id for p in self.report_points(q)}

    def report_points(self, q: Point) -> List[Point]:
        t = self.tol
        c = [0]
        out: List[Point] = []
        for lay, pos in zip(self.layers, self._positions(q.x, c)):
            if pos == 0 or q.x > lay.pieces[-1].x1:
                break
            i = pos - 1
            src = lay.pieces[i].source
            c[0] += 1
            if hulls.semicircle_y(src, q.x) > q.y + t:
                break
            hit = False
            if geo.dist(src, q) <= 1.0 + t:
                out.append(src)
                hit = True
            # walk both ways while centers stay in the disk
            j = i - 1
            while j >= 0:
                c[0] += 1
                s = lay.pieces[j].source
                if geo.dist(s, q) > 1.0 + t:
                    break
                out.append(s)
                hit = True
                j -= 1
            j = i + 1
            while j < len(lay.pieces):
                c[0] += 1
                s = lay.pieces[j].source
                if geo.dist(s, q) > 1.0 + t:
                    break
                out.append(s)
                hit = True
                j += 1
            if not hit:
                break
        self.comparisons += c[0]
        self.last_comparisons = c[0]
        return out

    def empty(self, q: Point) -> Optional[Point]:
        """Some point within distance 1 of q, using the first layer only."""
        if not self.layers:
            return None
        lay = self.layers[0]
        i = lay.locate(q.x)
        self.comparisons += 1 + int(math.log2(len(lay.pieces) or 1))
        if i is None:
            return None
        src = lay.pieces[i].source
        if geo.dist(src, q) <= 1.0 + self.tol:
            return src
        # within tolerance of a breakpoint the neighbour may be the witness
        for j in (i - 1, i + 1):
            if 0 <= j < len(lay.pieces) and geo.dist(lay.pieces[j].source, q) <= 1.0 + self.tol:
                return lay.pieces[j].source
        return None


def build_structure(Q: Sequence[Point], mode: str = "cascading",
                    tol: Optional[float] = None) -> LayeredStructure:
    t = geo.TAU if tol is None else tol
    return LayeredStructure(build_layers(Q, t), mode=mode, tol=t)


def query_report(s: LayeredStructure, q: Point) -> Set:
    return s.report(q)


def query_emptiness(s: LayeredStructure, q: Point) -> Optional[Point]:
    return s.empty(q)
