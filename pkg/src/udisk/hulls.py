"""Line-separated alpha-hulls and lower alpha-hull layers.

Two unrelated hull flavours live here.

* ``ls_alpha_hull`` works on points below the separator y = 0: the region
  left after removing every unit disk centered on or above the separator
  that avoids the points.  Its boundary is a chain of wings, connecting arcs
  and bridges.  The cutting code builds vertical decompositions on it.

* ``TreeGraph`` works on points above the separator that fit in one unit
  disk.  It stores, for every node of a balanced tree, the common tangent
  arc of the lower alpha-hulls of its two children and supports deleting
  hull vertices.  ``peel_layers`` repeatedly strips the current hull.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from . import geometry as geo
from .geometry import Point

INF = math.inf


class DiameterExceeded(ValueError):
    pass


class HullError(ValueError):
    pass


# ---------------------------------------------------------------------------
# line-separated alpha-hull
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Piece:
    """One x-monotone piece of an upper boundary.

    ``kind`` is ``line`` (horizontal at ``cy``), ``wing`` (arc centered on
    the separator), ``arc`` (connecting arc) or ``segment`` (separator
    segment).  ``owners`` are indices of the generating vertices.
    """
    kind: str
    x0: float
    x1: float
    cx: float
    cy: float
    owners: Tuple[int, ...] = ()

    def y_at(self, x: float) -> float:
        if self.kind in ("line", "segment"):
            return self.cy
        return geo.circle_lower_y(self.cx, self.cy, x)

    @property
    def is_arc(self) -> bool:
        return self.kind in ("wing", "arc")


@dataclass
class HullChain:
    vertices: List[Point]
    links: List[str]            # "gamma" or "beta" between consecutive vertices
    pieces: List[Piece]

    def __post_init__(self):
        self._starts = [p.x0 for p in self.pieces]

    def piece_at(self, x: float) -> Piece:
        i = bisect.bisect_right(self._starts, x) - 1
        return self.pieces[max(i, 0)]

    def height(self, x: float) -> float:
        return self.piece_at(x).y_at(x)

    def contains(self, u: Point, tol: Optional[float] = None) -> bool:
        t = geo.TAU if tol is None else tol
        return u.y <= self.height(u.x) + t


def _below_right_wing(v: Point, q: Point) -> bool:
    s = geo.wing_offset(v.y)
    if q.x > v.x + s:
        return q.y <= -1.0
    return q.y <= geo.circle_lower_y(v.x + s, 0.0, q.x)


def ls_alpha_hull(Q: Sequence[Point], tol: Optional[float] = None) -> HullChain:
    t = geo.TAU if tol is None else tol
    pts = [q for q in Q if q.y > -1.0]
    stack: List[Point] = []
    for q in pts:
        while True:
            if not stack:
                stack.append(q)
                break
            last = stack[-1]
            if geo.far_away(last, q):
                stack.append(q)
                break
            if _below_right_wing(last, q):
                break
            arc = geo.connecting_arc(last, q, t) if (last.x, last.y) != (q.x, q.y) else None
            if arc is None:
                if (last.x, last.y) == (q.x, q.y):
                    break
                stack.pop()
                continue
            if len(stack) >= 2:
                prev = stack[-2]
                if math.hypot(prev.x - arc.cx, prev.y - arc.cy) < 1.0 - t:
                    stack.pop()
                    continue
            stack.append(q)
            break
    return _chain_from_vertices(stack, t)


def _chain_from_vertices(vs: List[Point], t: float) -> HullChain:
    if not vs:
        return HullChain([], [], [Piece("line", -INF, INF, 0.0, -1.0)])
    pieces: List[Piece] = []
    links: List[str] = []
    s0 = geo.wing_offset(vs[0].y)
    pieces.append(Piece("line", -INF, vs[0].x - s0, 0.0, -1.0, (0,)))
    pieces.append(Piece("wing", vs[0].x - s0, vs[0].x, vs[0].x - s0, 0.0, (0,)))
    for i in range(len(vs) - 1):
        a, b = vs[i], vs[i + 1]
        arc = None if geo.far_away(a, b) else geo.connecting_arc(a, b, t)
        if arc is not None:
            links.append("gamma")
            pieces.append(Piece("arc", a.x, b.x, arc.cx, arc.cy, (i, i + 1)))
        else:
            links.append("beta")
            sa, sb = geo.wing_offset(a.y), geo.wing_offset(b.y)
            pieces.append(Piece("wing", a.x, a.x + sa, a.x + sa, 0.0, (i,)))
            if b.x - sb > a.x + sa:
                pieces.append(Piece("line", a.x + sa, b.x - sb, 0.0, -1.0, (i, i + 1)))
            pieces.append(Piece("wing", max(b.x - sb, a.x + sa), b.x, b.x - sb, 0.0, (i + 1,)))
    n = len(vs) - 1
    sn = geo.wing_offset(vs[-1].y)
    pieces.append(Piece("wing", vs[-1].x, vs[-1].x + sn, vs[-1].x + sn, 0.0, (n,)))
    pieces.append(Piece("line", vs[-1].x + sn, INF, 0.0, -1.0, (n,)))
    pieces = [p for p in pieces if p.x1 > p.x0 or p.kind == "arc"]
    return HullChain(list(vs), links, pieces)


# ---------------------------------------------------------------------------
# vertical decomposition of the hull plus separator segments
# ---------------------------------------------------------------------------

@dataclass
class VCell:
    """Bottom-open cell: walls at x0, x1 and a top edge given by ``top``.

    ``vertices`` holds the indices (into the VDecomp point list) whose
    conflict lists bound this cell's conflicts; ``segment`` the index of the
    separator segment forming the top, if any.
    """
    x0: float
    x1: float
    top: Piece
    vertices: Tuple[int, ...] = ()
    segment: Optional[int] = None
    conflicts: Optional[list] = None

    def top_y(self, x: float) -> float:
        return self.top.y_at(x)


@dataclass
class VDecomp:
    points: List[Point]
    segments: List[Tuple[float, float]]
    chain: HullChain
    cells: List[VCell] = field(default_factory=list)

    def __post_init__(self):
        self._starts = [c.x0 for c in self.cells]

    def cell_at(self, x: float) -> VCell:
        i = bisect.bisect_right(self._starts, x) - 1
        return self.cells[max(i, 0)]

    def upper(self, x: float) -> float:
        return self.cell_at(x).top_y(x)

    def contains(self, u: Point, tol: Optional[float] = None) -> bool:
        t = geo.TAU if tol is None else tol
        return u.y <= self.upper(u.x) + t


def vertical_decomposition(Q: Sequence[Point], S: Sequence[Tuple[float, float]] = (),
                           tol: Optional[float] = None) -> VDecomp:
    """Cells below the upper envelope of H(Q) and the separator segments S.

    Q must be x-sorted.  Segments are (x_left, x_right) pairs on y = 0.
    """
    t = geo.TAU if tol is None else tol
    Q = list(Q)
    segs = sorted((min(a, b), max(a, b)) for a, b in S)
    for (a0, a1), (b0, b1) in zip(segs, segs[1:]):
        if b0 < a1 - t:
            raise HullError(f"segments [{a0},{a1}] and [{b0},{b1}] overlap")
    on_sep = {round(q.x, 12) for q in Q if abs(q.y) <= t}
    for a, b in segs:
        if round(a, 12) not in on_sep or round(b, 12) not in on_sep:
            raise HullError(f"segment [{a},{b}] has an endpoint outside Q")
    # map chain vertex order back to Q indices
    chain = ls_alpha_hull(Q, t)
    index = {}
    for i, q in enumerate(Q):
        index.setdefault((q.x, q.y), i)
    vid = [index[(v.x, v.y)] for v in chain.vertices]
    out: List[VCell] = []

    def emit(piece: Piece, x0: float, x1: float):
        if x1 <= x0 and not (x1 == x0 and piece.kind == "arc"):
            return
        owners = tuple(vid[o] for o in piece.owners if piece.kind != "line" or False)
        if piece.kind == "line":
            owners = ()
        out.append(VCell(x0, x1, piece, owners))

    si = 0
    for piece in chain.pieces:
        x0, x1 = piece.x0, piece.x1
        # clip out the parts covered by separator segments
        cur = x0
        while si < len(segs) and segs[si][1] <= cur + t and segs[si][1] < x1:
            si += 1
        j = si
        while j < len(segs) and segs[j][0] < x1 - t:
            a, b = segs[j]
            if a > cur:
                emit(piece, cur, a)
            cur = max(cur, b)
            j += 1
        if cur < x1:
            emit(piece, cur, x1)
    for k, (a, b) in enumerate(segs):
        ia = index.get((a, 0.0))
        ib = index.get((b, 0.0))
        if ia is None:
            ia = min(range(len(Q)), key=lambda i: abs(Q[i].x - a) + abs(Q[i].y))
        if ib is None:
            ib = min(range(len(Q)), key=lambda i: abs(Q[i].x - b) + abs(Q[i].y))
        out.append(VCell(a, b, Piece("segment", a, b, 0.0, 0.0, ()), (ia, ib), k))
    out.sort(key=lambda c: (c.x0, c.x1))
    return VDecomp(Q, segs, chain, out)


# ---------------------------------------------------------------------------
# tree graph for lower alpha-hull layers
# ---------------------------------------------------------------------------

#
# Every point p is handled through its lower unit semicircle
#     f_p(x) = p.y - sqrt(1 - (x - p.x)^2),   |x - p.x| <= 1.
# Vertices of the lower alpha-hull of a point set are the points whose
# semicircle shows up on the lower envelope of all semicircles, and a hull
# arc between neighbours u, v corresponds to the envelope breakpoint where
# the envelope switches from f_u to f_v.  Unit semicircles are translates of
# one convex curve, so any two of them switch at most once; this is what
# makes purely local tangency tests exact.

def semicircle_y(p: Point, x: float, tol: float = 0.0) -> float:
    """f_p(x); +inf outside the domain [p.x - 1, p.x + 1]."""
    d = x - p.x
    if d > 1.0 + tol or d < -1.0 - tol:
        return INF
    r = 1.0 - d * d
    return p.y - math.sqrt(r if r > 0.0 else 0.0)


def switch_point(u: Point, v: Point) -> Tuple[float, float, float]:
    """Where the envelope of f_u and f_v passes from u to v (u left of v).

    Returns ``(x, yl, yr)`` with yl = f_u(x) and yr = f_v(x).  The two
    values agree at a proper crossing; they differ when the switch happens
    at the start of v's domain (v begins below u) or at the end of u's.
    Ties go to the right function.
    """
    x0 = v.x - 1.0
    fu0 = semicircle_y(u, x0)
    if v.y <= fu0:
        return x0, fu0, v.y
    x1 = u.x + 1.0
    fv1 = semicircle_y(v, x1)
    if fv1 > u.y:
        return x1, u.y, fv1
    pts = geo._circle_intersections(u.x, u.y, v.x, v.y)
    if pts is not None:
        x, y = min(pts, key=lambda c: c[1])
        if x0 <= x <= x1 and abs(semicircle_y(u, x) - y) < 1e-9 and abs(semicircle_y(v, x) - y) < 1e-9:
            return x, y, y
    # f_v - f_u is decreasing on [x0, x1]: bisect for its root
    lo, hi = x0, x1
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if semicircle_y(v, mid) - semicircle_y(u, mid) > 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    y = semicircle_y(v, hi)
    return hi, semicircle_y(u, hi), y


def arc_center(u: Point, v: Point) -> Optional[Point]:
    """Center of the hull arc between neighbours u and v, if they cross."""
    if u.key() > v.key():
        u, v = v, u
    x, yl, yr = switch_point(u, v)
    if abs(yl - yr) > 1e-9:
        return None
    return Point(x, yl)


@dataclass
class _Node:
    lo: int                 # leaf index range [lo, hi)
    hi: int
    height: int
    left: Optional["_Node"] = None
    right: Optional["_Node"] = None
    parent: Optional["_Node"] = None
    s: Optional[int] = None  # tangent arc endpoints (point indices)
    t: Optional[int] = None
    uid: int = 0


class TreeGraph:
    """Balanced tree over x-sorted points storing common tangent arcs.

    ``L_r[i]`` lists the nodes whose arc leaves point i to the right,
    ``L_l[i]`` those whose arc enters it from the left, both ordered by node
    height.  Walking a node's hull only needs the highest entry that lies
    inside the node's subtree, so no per-node hull lists are kept.
    """

    def __init__(self, Q: Sequence[Point], tol: Optional[float] = None):
        self.tol = geo.TAU if tol is None else tol
        self.pts: List[Point] = list(Q)
        n = len(self.pts)
        for a, b in zip(self.pts, self.pts[1:]):
            if b.key() < a.key():
                raise HullError("points must be x-sorted")
        self._check_diameter()
        self.alive = [True] * n
        self.n_alive = n
        self.L_r: List[List[_Node]] = [[] for _ in range(n)]
        self.L_l: List[List[_Node]] = [[] for _ in range(n)]
        self.leaves: List[Optional[_Node]] = [None] * n
        self.promotions = 0
        self.confirmations = 0
        self.fallbacks = 0
        self.work = 0
        self._uid = 0
        self._sw = {}
        self.root = self._build(0, n, None) if n else None

    # construction -----------------------------------------------------------
    def _check_diameter(self):
        pts = self.pts
        if len(pts) < 2:
            return
        xs = [p.x for p in pts]
        ys = [p.y for p in pts]
        if math.hypot(max(xs) - min(xs), max(ys) - min(ys)) <= 2.0:
            return
        import numpy as np
        P = np.array([[p.x, p.y] for p in pts])
        for i in range(0, len(P), 512):
            d = np.sqrt(((P[i:i + 512, None, :] - P[None, :, :]) ** 2).sum(-1))
            if d.max() > 2.0 + self.tol:
                raise DiameterExceeded("points do not fit in one unit disk")

    def _build(self, lo: int, hi: int, parent) -> _Node:
        self._uid += 1
        if hi - lo == 1:
            node = _Node(lo, hi, 0, parent=parent, uid=self._uid)
            self.leaves[lo] = node
            return node
        mid = (lo + hi + 1) // 2
        node = _Node(lo, hi, 0, parent=parent, uid=self._uid)
        node.left = self._build(lo, mid, node)
        node.right = self._build(mid, hi, node)
        node.height = 1 + max(node.left.height, node.right.height)
        s, t = self._bridge_walk(node)
        self._set_bridge(node, s, t)
        return node

    def release(self) -> None:
        """Break the parent links so the tree is freed without the cycle collector."""
        stack = [self.root] if self.root else []
        while stack:
            v = stack.pop()
            if v.left is not None:
                stack.extend([v.left, v.right])
            v.left = v.right = v.parent = None
        self.root = None
        self.leaves = []
        self.L_r = self.L_l = []

    # hull navigation ----------------------------------------------------------
    def next_in(self, node: _Node, x: Optional[int]) -> Optional[int]:
        if x is None:
            return None
        best = None
        for w in self.L_r[x]:
            if w.height <= node.height and w.lo >= node.lo and w.hi <= node.hi:
                best = w
        return None if best is None else best.t

    def prev_in(self, node: _Node, x: Optional[int]) -> Optional[int]:
        if x is None:
            return None
        best = None
        for w in self.L_l[x]:
            if w.height <= node.height and w.lo >= node.lo and w.hi <= node.hi:
                best = w
        return None if best is None else best.s

    def leftmost(self, node: _Node) -> Optional[int]:
        for i in range(node.lo, node.hi):
            if self.alive[i]:
                return i
        return None

    def rightmost(self, node: _Node) -> Optional[int]:
        for i in range(node.hi - 1, node.lo - 1, -1):
            if self.alive[i]:
                return i
        return None

    def hull(self, node: Optional[_Node] = None) -> List[int]:
        node = self.root if node is None else node
        if node is None:
            return []
        x = self.leftmost(node)
        out = []
        while x is not None:
            out.append(x)
            x = self.next_in(node, x)
        return out

    # envelope helpers ------------------------------------------------------------
    def _switch(self, i: int, j: int) -> Tuple[float, float, float]:
        """switch_point for point indices with i < j, memoised."""
        key = (i, j)
        r = self._sw.get(key)
        if r is None:
            r = self._sw[key] = switch_point(self.pts[i], self.pts[j])
        return r

    def _f(self, i: Optional[int], x: float) -> float:
        return INF if i is None else semicircle_y(self.pts[i], x, self.tol)

    def _piece(self, node: _Node, x: int) -> Tuple[float, float, Optional[int], Optional[int]]:
        """Interval of x's piece on node's envelope, plus its neighbours."""
        a, b = self.prev_in(node, x), self.next_in(node, x)
        lo = -INF if a is None else self._switch(a, x)[0]
        hi = INF if b is None else self._switch(x, b)[0]
        return lo, hi, a, b

    def _step(self, node: _Node, u: int, v: int) -> Optional[str]:
        """Which pointer to move for candidate pair (u, v), None if tangent."""
        L, R = node.left, node.right
        t = self.tol
        X, yl, yr = self._switch(u, v)
        lo_u, hi_u, pu, nu = self._piece(L, u)
        lo_v, hi_v, pv, nv = self._piece(R, v)
        if X < lo_u - t:
            return "u-"
        if X > hi_u + t:
            return "u+"
        if X < lo_v - t:
            return "v-"
        if X > hi_v + t:
            return "v+"
        if yr > yl + t and nu is not None and self._f(v, X) > self._f(nu, X) + t:
            # u's domain ends here but the left envelope carries on lower
            return "u+"
        if yl > yr + t and pv is not None and self._f(pv, X) < self._f(u, X) - t:
            return "v-"
        return None

    def _tangent_ok(self, node: _Node, s: Optional[int], t: Optional[int]) -> bool:
        if s is None or t is None:
            return self.leftmost(node.left) is None or self.leftmost(node.right) is None
        if not (self.alive[s] and self.alive[t]):
            return False
        if not (node.left.lo <= s < node.left.hi and node.right.lo <= t < node.right.hi):
            return False
        return self._step(node, s, t) is None

    def _bridge_walk(self, node: _Node, u: Optional[int] = None, v: Optional[int] = None):
        """Common tangent of the children's hulls by the two-pointer walk."""
        L, R = node.left, node.right
        if u is None:
            u = self.rightmost(L)
        if v is None:
            v = self.leftmost(R)
        if u is None or v is None:
            return None, None
        seen = set()
        while (u, v) not in seen:
            seen.add((u, v))
            move = self._step(node, u, v)
            self.work += 1
            if move is None:
                return u, v
            nu = {"u-": self.prev_in(L, u), "u+": self.next_in(L, u)}.get(move, u)
            nv = {"v-": self.prev_in(R, v), "v+": self.next_in(R, v)}.get(move, v)
            if nu is None or nv is None:
                break
            u, v = nu, nv
        return self._exhaustive_bridge(node)

    def _exhaustive_bridge(self, node: _Node):
        # safety net; counted so tests can insist it never runs
        self.fallbacks += 1
        for u in self.hull(node.left):
            for v in self.hull(node.right):
                if self._step(node, u, v) is None:
                    return u, v
        raise HullError("no common tangent found")

    def _set_bridge(self, node: _Node, s: Optional[int], t: Optional[int]):
        if node.s is not None:
            self.L_r[node.s].remove(node)
            self.L_l[node.t].remove(node)
        node.s, node.t = s, t
        if s is None:
            return
        for lst in (self.L_r[s], self.L_l[t]):
            hs = [w.height for w in lst]
            lst.insert(bisect.bisect_right(hs, node.height), node)

    # edges ------------------------------------------------------------------------
    def edges(self) -> List[Tuple[int, int]]:
        out = []
        stack = [self.root] if self.root else []
        while stack:
            v = stack.pop()
            if v.left is None:
                continue
            if v.s is not None:
                out.append((v.s, v.t))
            stack.extend([v.left, v.right])
        return out

    def bottom_edge(self, x: int) -> Optional[Tuple[int, int]]:
        nxt = self.next_in(self.root, x)
        return None if nxt is None else (x, nxt)

    # deletion ------------------------------------------------------------------------
    def delete(self, p: int) -> None:
        """Remove hull vertex p and repair the tangent arcs above it."""
        if not self.alive[p]:
            raise KeyError(p)
        path = []
        w = self.leaves[p].parent
        while w is not None:
            path.append(w)
            w = w.parent
        # neighbours of p on the old hull of each path node's child on the path
        old = {}
        child = self.leaves[p]
        for w in path:
            old[w.uid] = (self.prev_in(child, p), self.next_in(child, p))
            child = w
        self.alive[p] = False
        self.n_alive -= 1
        child = self.leaves[p]
        for w in path:
            # every path node is inspected: p may be an endpoint higher up even
            # when it is not one here
            if w.s == p or w.t == p:
                a, b = old[w.uid]
                s, t = self._pull_up(w, child, p, a, b)
                if not self._tangent_ok(w, s, t):
                    self.fallbacks += 1
                    s, t = self._bridge_walk(w)
                self._set_bridge(w, s, t)
            child = w

    def _event(self, i: int, j: int, p: Point) -> float:
        """Height the lifted p must reach to stop hiding the i/j switch."""
        if i > j:
            i, j = j, i
        X, yl, yr = self._switch(i, j)
        d = X - p.x
        if abs(d) > 1.0:
            return -INF
        return max(yl, yr) + math.sqrt(max(0.0, 1.0 - d * d))

    def _pull_up(self, node: _Node, u: _Node, p: int, a: Optional[int], b: Optional[int]):
        """New tangent of node after deleting p, which was an endpoint of it.

        p is lifted until it drops off the hull.  ``u`` is the child on p's
        side, already repaired.  ``a`` is p's outer neighbour on u's old hull
        and ``b`` the inner one (toward the other child); ``c`` is the far
        endpoint.  Wrapping a or c promotes a vertex, wrapping b confirms one.
        """
        left_side = node.s == p
        v = node.right if left_side else node.left
        c = node.t if left_side else node.s
        if self.leftmost(u) is None:
            # the far child's vertices hidden under the old arc surface now
            step = self.prev_in if left_side else self.next_in
            x = step(v, c)
            while x is not None:
                self.promotions += 1
                x = step(v, x)
            return None, None
        if not left_side:
            a, b = b, a
        if left_side:
            fwd_u = lambda x: self.next_in(u, x)   # from a toward b
            bwd_u = lambda x: self.prev_in(u, x)
            inward_v = lambda x: self.prev_in(v, x)
        else:
            fwd_u = lambda x: self.prev_in(u, x)
            bwd_u = lambda x: self.next_in(u, x)
            inward_v = lambda x: self.next_in(v, x)
        if a is None and b is None:
            return None, None
        P = self.pts[p]
        a1 = fwd_u(a) if a is not None else None
        b1 = bwd_u(b) if b is not None else None
        c1 = inward_v(c)
        Y = -INF
        tol = self.tol
        guard = 4 * (len(self.pts) + 4)
        while guard > 0:
            guard -= 1
            self.work += 1
            events = []
            if a is not None:
                events.append((self._event(a, c, P), 0, "e1"))
            if b is not None:
                events.append((self._event(b, c, P), 1, "e2"))
            if a is not None and a1 is not None and a1 != b:
                events.append((self._event(a, a1, P), 2, "b1"))
            if b is not None and b1 is not None and b1 != a:
                events.append((self._event(b, b1, P), 3, "b2"))
            if c1 is not None:
                events.append((self._event(c1, c, P), 4, "b3"))
            events = [(max(h, Y), r, k) for h, r, k in events]
            lowest = min(e[0] for e in events)
            tied = [e for e in events if e[0] <= lowest + tol]
            Y, _, kind = min(tied, key=lambda e: e[1])
            if kind == "e1":
                return self._orient(left_side, a, c)
            if kind == "e2":
                return self._orient(left_side, b, c)
            if kind == "b1":
                self.promotions += 1
                a, a1 = a1, fwd_u(a1)
            elif kind == "b2":
                self.confirmations += 1
                b, b1 = b1, bwd_u(b1)
            else:
                self.promotions += 1
                c, c1 = c1, inward_v(c1)
        return None, None

    @staticmethod
    def _orient(left_side: bool, x: int, c: int):
        return (x, c) if left_side else (c, x)


def build_tree_graph(Q: Sequence[Point], tol: Optional[float] = None) -> TreeGraph:
    return TreeGraph(Q, tol)


def peel_layers(g: TreeGraph) -> List[List[Point]]:
    """Strip hull layers until no point survives; each layer is x-ordered."""
    layers = []
    while g.n_alive:
        idx = g.hull()
        if not idx:
            raise HullError("empty hull with live points")
        layers.append([g.pts[i] for i in idx])
        for i in idx:
            g.delete(i)
    return layers


def peel_layers_of(Q: Sequence[Point], tol: Optional[float] = None) -> List[List[Point]]:
    pts = sorted(Q, key=lambda p: p.key())
    return peel_layers(build_tree_graph(pts, tol))


def is_lower_hull_vertex(p: Point, others: Sequence[Point], tol: Optional[float] = None) -> bool:
    """Brute-force test: does f_p show up on the lower envelope?

    Candidate witnesses are the crossings of f_p with every other
    semicircle, both ends of p's domain and p's curve at the domain ends of
    the others.  A witness counts when no other semicircle passes strictly
    below it.
    """
    t = geo.TAU if tol is None else tol
    others = [q for q in others if q is not p and q.key() != p.key()]
    xs = [p.x - 1.0, p.x + 1.0]
    for q in others:
        xs.extend((q.x - 1.0, q.x + 1.0))
        u, v = (p, q) if p.key() < q.key() else (q, p)
        xs.append(switch_point(u, v)[0])
    for x in xs:
        if x < p.x - 1.0 or x > p.x + 1.0:
            continue
        y = semicircle_y(p, x)
        if all(semicircle_y(q, x) >= y - t for q in others):
            # a lone touching point does not make a piece; require a side
            # where p is strictly lowest or the point is an end of p's domain
            return True
    return False
