"""Shallow cuttings for unit arcs hanging below the separator y = 0.

A cutting in vertex-segment form is a set Q of points on or below the
separator plus disjoint separator segments S with endpoints in Q.  The region
it covers is the part below the upper envelope of the line-separated hull of
Q and of S (see :func:`hulls.vertical_decomposition`).  A (k, K)-cutting
covers every point of level <= k, each vertex has level <= K and each segment
meets <= K arcs.

Only the slab [x_min - 1, x_max + 1] around the arcs is covered; outside of
it no arc exists and every level is 0.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import geometry as geo
from . import hulls
from .geometry import Point

log = logging.getLogger(__name__)


class ValidationFailure(RuntimeError):
    pass


@dataclass
class CuttingConfig:
    B: int = 4
    C: float = 12.0
    C_size: float = 48.0
    eps: Optional[float] = None
    retry_growth: float = 2.0
    max_retries: int = 3
    seed: int = 0
    verify_samples: int = 2000
    verify_crossings: int = 96

    def __post_init__(self):
        if self.B < 2:
            raise ValueError("B must be at least 2")
        if self.eps is None:
            self.eps = 1.0 / (3.0 * self.C * self.B)


# ---------------------------------------------------------------------------
# arcs as arrays
# ---------------------------------------------------------------------------

class ArcSet:
    """Arcs below y = 0 of unit circles with centers (cx, cy), 0 <= cy < 1."""

    def __init__(self, ids, cx, cy):
        self.ids = np.asarray(ids, dtype=np.int64)
        self.cx = np.asarray(cx, dtype=float)
        self.cy = np.asarray(cy, dtype=float)
        if len(self.cy) and (self.cy.min() < 0.0 or self.cy.max() >= 1.0):
            raise ValueError("arc centers must satisfy 0 <= y < 1")
        w = np.sqrt(1.0 - self.cy ** 2)
        self.xl = self.cx - w
        self.xr = self.cx + w
        self._pos = {int(i): k for k, i in enumerate(self.ids)}

    def __len__(self):
        return len(self.ids)

    @classmethod
    def from_points(cls, pts: Iterable[Point]) -> "ArcSet":
        pts = [p for p in pts if 0.0 <= p.y < 1.0]
        ids = [i if p.id is None else p.id for i, p in enumerate(pts)]
        return cls(ids, [p.x for p in pts], [p.y for p in pts])

    @classmethod
    def from_arcs(cls, arcs: Sequence[geo.UnitArc]) -> "ArcSet":
        ids = [i if a.source_id is None else a.source_id for i, a in enumerate(arcs)]
        return cls(ids, [a.cx for a in arcs], [a.cy for a in arcs])

    def positions(self, ids) -> np.ndarray:
        return np.array([self._pos[int(i)] for i in ids], dtype=np.int64)

    def slab(self) -> Tuple[float, float]:
        if not len(self):
            return (-1.0, 1.0)
        return float(self.xl.min()) - 1.0, float(self.xr.max()) + 1.0

    def y_at(self, idx, x):
        d = x - self.cx[idx]
        return self.cy[idx] - np.sqrt(np.clip(1.0 - d * d, 0.0, None))

    def unit_arc(self, pos: int) -> geo.UnitArc:
        c = Point(float(self.cx[pos]), float(self.cy[pos]), int(self.ids[pos]))
        return geo.UnitArc(c, float(self.xl[pos]), float(self.xr[pos]), geo.Side.BELOW, int(self.ids[pos]))


def levels(A: ArcSet, X, Y, tol: Optional[float] = None, idx=None) -> np.ndarray:
    """Number of arcs (restricted to positions ``idx``) on or below each point."""
    t = geo.TAU if tol is None else tol
    X = np.atleast_1d(np.asarray(X, dtype=float))
    Y = np.atleast_1d(np.asarray(Y, dtype=float))
    if idx is None:
        idx = np.arange(len(A))
    out = np.zeros(len(X), dtype=np.int64)
    if not len(idx) or not len(X):
        return out
    cx, cy, xl, xr = A.cx[idx], A.cy[idx], A.xl[idx], A.xr[idx]
    # bucket the query points by x so each bucket only sees overlapping arcs
    width = 0.25
    b = np.floor(X / width).astype(np.int64)
    order = np.argsort(b, kind="stable")
    bs = b[order]
    cuts = np.nonzero(np.diff(bs))[0] + 1
    for grp in np.split(order, cuts):
        x = X[grp]
        lo, hi = x.min(), x.max()
        m = (xl - t <= hi) & (xr + t >= lo)
        if not m.any():
            continue
        acx, acy, axl, axr = cx[m], cy[m], xl[m], xr[m]
        step = max(1, 2_000_000 // len(acx))
        for s in range(0, len(grp), step):
            g = grp[s:s + step]
            xx = X[g, None]
            d = xx - acx
            ya = acy - np.sqrt(np.clip(1.0 - d * d, 0.0, None))
            ok = (axl - t <= xx) & (xx <= axr + t) & (ya <= Y[g, None] + t)
            out[g] = ok.sum(1)
    return out


def below_ids(A: ArcSet, x: float, y: float, tol: Optional[float] = None, idx=None) -> np.ndarray:
    t = geo.TAU if tol is None else tol
    if idx is None:
        idx = np.arange(len(A))
    idx = np.asarray(idx, dtype=np.int64)
    if not len(idx):
        return np.zeros(0, dtype=np.int64)
    ya = A.y_at(idx, x)
    ok = (A.xl[idx] - t <= x) & (x <= A.xr[idx] + t) & (ya <= y + t)
    return A.ids[idx[ok]]


def crossing_ids(A: ArcSet, a: float, b: float, tol: Optional[float] = None, idx=None) -> np.ndarray:
    """Arcs meeting the separator segment [a, b], i.e. with an end inside it."""
    t = geo.TAU if tol is None else tol
    if idx is None:
        idx = np.arange(len(A))
    idx = np.asarray(idx, dtype=np.int64)
    if not len(idx):
        return np.zeros(0, dtype=np.int64)
    xl, xr = A.xl[idx], A.xr[idx]
    ok = ((a - t <= xl) & (xl <= b + t)) | ((a - t <= xr) & (xr <= b + t))
    return A.ids[idx[ok]]


# ---------------------------------------------------------------------------
# boundary curves: lower unit semicircles or horizontal lines
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Curve:
    kind: str           # "circ" (lower unit semicircle) or "flat"
    cx: float = 0.0
    cy: float = 0.0

    def y(self, x):
        if self.kind == "flat":
            return np.full_like(np.asarray(x, dtype=float), self.cy) if np.ndim(x) else self.cy
        d = np.asarray(x, dtype=float) - self.cx
        r = self.cy - np.sqrt(np.clip(1.0 - d * d, 0.0, None))
        return r if np.ndim(x) else float(r)


SEPARATOR = Curve("flat", 0.0, 0.0)
FLOOR = Curve("flat", 0.0, -1.0)


def curve_of_piece(piece: hulls.Piece) -> Curve:
    if piece.kind in ("line", "segment"):
        return Curve("flat", 0.0, piece.cy)
    return Curve("circ", piece.cx, piece.cy)


def _le_interval(A: ArcSet, idx, curve: Curve, lo: float, hi: float, tol: float):
    """Per arc, the closed sub-interval of [lo, hi] where it is <= curve + tol.

    Returns (s, e, ok).  Arcs and circle curves are translates of one convex
    curve, so their difference is monotone and the set is a prefix or a
    suffix of the common range; against a flat line it is a centred window.
    """
    idx = np.asarray(idx, dtype=np.int64)
    cx, cy = A.cx[idx], A.cy[idx]
    s = np.maximum(A.xl[idx], lo)
    e = np.minimum(A.xr[idx], hi)
    ok = s <= e
    if curve.kind == "flat":
        h = cy - curve.cy
        w = np.sqrt(np.clip(1.0 - np.minimum(h, 1.0) ** 2, 0.0, None))
        reach = h <= 1.0 + tol
        # widen by the slope-free slack so touching arcs still count
        s2 = np.maximum(s, cx - w)
        e2 = np.minimum(e, cx + w)
        ok = ok & reach & (s2 <= e2 + 1e-12)
        return s2, np.maximum(e2, s2), ok

    def diff(x):
        d = x - cx
        fa = cy - np.sqrt(np.clip(1.0 - d * d, 0.0, None))
        dc = x - curve.cx
        fc = curve.cy - np.sqrt(np.clip(1.0 - dc * dc, 0.0, None))
        return fa - fc - tol

    ds, de = diff(s), diff(e)
    inc = cx < curve.cx   # difference increasing: the good set is a prefix
    dec = cx > curve.cx
    both = (ds <= 0) & (de <= 0)
    none = (ds > 0) & (de > 0)
    mixed = ok & ~both & ~none
    S, E = s.copy(), e.copy()
    if mixed.any():
        sm, em = s[mixed], e[mixed]
        root = _lower_crossing(cx[mixed], cy[mixed], curve.cx, curve.cy + tol, sm, em)
        miss = np.isnan(root)
        if miss.any():
            root[miss] = _bisect_root(cx[mixed][miss], cy[mixed][miss], curve, tol,
                                      sm[miss], em[miss], ds[mixed][miss] <= 0)
        sign_lo = ds[mixed] <= 0
        S[mixed] = np.where(sign_lo, sm, root)
        E[mixed] = np.where(sign_lo, root, em)
    ok = ok & ~none
    # equal centers x: difference constant, decided by ds alone
    same = ~inc & ~dec
    ok = ok & ~(same & (ds > 0))
    return S, E, ok


def _lower_crossing(ax, ay, bx, by, lo, hi):
    """x of the lower intersection of unit circles, NaN if not in [lo, hi]."""
    dx, dy = bx - ax, by - ay
    d2 = dx * dx + dy * dy
    good = (d2 > 0) & (d2 <= 4.0)
    d = np.sqrt(np.where(good, d2, 1.0))
    h = np.sqrt(np.clip(1.0 - d2 / 4.0, 0.0, None))
    mx, my = ax + dx / 2, ay + dy / 2
    x1, y1 = mx - h * dy / d, my + h * dx / d
    x2, y2 = mx + h * dy / d, my - h * dx / d
    pad = 1e-12
    in1 = good & (x1 >= lo - pad) & (x1 <= hi + pad)
    in2 = good & (x2 >= lo - pad) & (x2 <= hi + pad)
    pick2 = in2 & (~in1 | (y2 < y1))
    x = np.where(pick2, x2, np.where(in1, x1, np.nan))
    return np.clip(x, lo, hi)


def _bisect_root(cx, cy, curve: Curve, tol, lo, hi, sign_lo):
    lo, hi = lo.copy(), hi.copy()
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        d = mid - cx
        fa = cy - np.sqrt(np.clip(1.0 - d * d, 0.0, None))
        dc = mid - curve.cx
        fc = curve.cy - np.sqrt(np.clip(1.0 - dc * dc, 0.0, None))
        move_lo = ((fa - fc - tol) <= 0) == sign_lo
        lo = np.where(move_lo, mid, lo)
        hi = np.where(move_lo, hi, mid)
    return np.where(sign_lo, lo, hi)


def _ge_interval(A: ArcSet, idx, curve: Curve, lo: float, hi: float, tol: float):
    """Closed sub-interval of [lo, hi] where the arc is >= curve - tol."""
    idx = np.asarray(idx, dtype=np.int64)
    s = np.maximum(A.xl[idx], lo)
    e = np.minimum(A.xr[idx], hi)
    ok = s <= e
    if curve.kind == "flat":
        # arcs are convex: >= a line outside a centred window, which can
        # leave two pieces; report the hull of the good set (callers only
        # use it together with an upper bound, see _crosses_open)
        cx, cy = A.cx[idx], A.cy[idx]
        h = cy - curve.cy
        w = np.sqrt(np.clip(1.0 - np.minimum(h, 1.0) ** 2, 0.0, None))
        inner = (s >= cx - w + tol) & (e <= cx + w - tol) & (h < 1.0)
        return s, e, ok & ~inner
    S, E, okl = _le_interval(A, idx, curve, lo, hi, -tol)
    # complement of a prefix/suffix inside [s, e]
    cx = A.cx[idx]
    inc = cx < curve.cx
    gS = np.where(~okl, s, np.where(inc, E, s))
    gE = np.where(~okl, e, np.where(inc, e, S))
    full_le = okl & (S <= s + 1e-15) & (E >= e - 1e-15)
    return gS, gE, ok & ~full_le


# ---------------------------------------------------------------------------
# cutting containers
# ---------------------------------------------------------------------------

@dataclass
class VertexSegmentCutting:
    k: float
    K: float
    Q: List[Point]
    q_conf: List[np.ndarray]
    S: List[Tuple[float, float]]
    s_conf: List[np.ndarray]
    slab: Tuple[float, float]
    retries: int = 0
    _vd: Optional[hulls.VDecomp] = field(default=None, repr=False)

    def decomposition(self) -> hulls.VDecomp:
        if self._vd is None:
            self._vd = hulls.vertical_decomposition(self.Q, self.S)
        return self._vd

    def covers(self, u: Point) -> bool:
        if not (self.slab[0] <= u.x <= self.slab[1]):
            return True
        if u.y <= -1.0:
            return True
        return self.decomposition().contains(u)

    @property
    def size(self) -> int:
        return len(self.Q)


@dataclass
class TrapCell:
    x0: float
    x1: float
    top: Curve
    bottom: Optional[Curve]
    conflicts: np.ndarray
    corners: Tuple[int, ...] = ()       # Q indices of the top corners, if known
    special: bool = False

    def top_y(self, x: float) -> float:
        return float(self.top.y(x))


@dataclass
class TrapezoidCutting:
    cells: List[TrapCell]
    slab: Tuple[float, float]
    k: float = 0
    K: float = 0
    vs: Optional[VertexSegmentCutting] = None

    def __post_init__(self):
        self.cells.sort(key=lambda c: (c.x0, c.x1))
        self._starts = [c.x0 for c in self.cells]

    def cell_at(self, x: float) -> Optional[TrapCell]:
        import bisect
        if not self.cells:
            return None
        i = bisect.bisect_right(self._starts, x) - 1
        if i < 0:
            return None
        c = self.cells[i]
        return c if x <= c.x1 else None


# ---------------------------------------------------------------------------
# epsilon-cuttings by sampling
# ---------------------------------------------------------------------------

def _pair_crossings(A: ArcSet, idx) -> np.ndarray:
    """x of every crossing between two arcs of ``idx`` (below y = 0)."""
    idx = np.asarray(idx, dtype=np.int64)
    if len(idx) < 2:
        return np.zeros(0)
    i, j = np.triu_indices(len(idx), 1)
    a, b = idx[i], idx[j]
    ax, ay, bx, by = A.cx[a], A.cy[a], A.cx[b], A.cy[b]
    dx, dy = bx - ax, by - ay
    d2 = dx * dx + dy * dy
    good = (d2 > 0) & (d2 <= 4.0)
    d = np.sqrt(np.where(good, d2, 1.0))
    h = np.sqrt(np.clip(1.0 - d2 / 4.0, 0.0, None))
    mx, my = ax + dx / 2, ay + dy / 2
    ux, uy = -dy / d, dx / d
    xs = []
    for sgn in (1.0, -1.0):
        x = mx + sgn * h * ux
        y = my + sgn * h * uy
        ok = good & (y < 0) & (y <= np.minimum(ay, by)) & \
            (A.xl[a] <= x) & (x <= A.xr[a]) & (A.xl[b] <= x) & (x <= A.xr[b])
        xs.append(x[ok])
    return np.concatenate(xs)


def _crosses_open(A: ArcSet, idx, x0, x1, top: Curve, bottom: Optional[Curve], tol: float) -> np.ndarray:
    """Mask of arcs meeting the open cell between bottom and top on (x0, x1)."""
    idx = np.asarray(idx, dtype=np.int64)
    if not len(idx):
        return np.zeros(0, dtype=bool)
    s1, e1, ok1 = _le_interval(A, idx, top, x0, x1, -tol)
    if bottom is None:
        return ok1 & (e1 > s1 + 1e-12) | (ok1 & (x1 - x0 <= 1e-12))
    s2, e2, ok2 = _ge_interval(A, idx, bottom, x0, x1, -tol)
    lo = np.maximum(s1, s2)
    hi = np.minimum(e1, e2)
    return ok1 & ok2 & (hi > lo + 1e-12)


def _sample_decomposition(A: ArcSet, sample, slab, tol) -> List[Tuple[float, float, Curve, Optional[Curve]]]:
    xs = [slab[0], slab[1]]
    if len(sample):
        xs.extend(A.xl[sample].tolist())
        xs.extend(A.xr[sample].tolist())
        xs.extend(_pair_crossings(A, sample).tolist())
    xs = sorted(set(x for x in xs if slab[0] <= x <= slab[1]))
    cells = []
    for a, b in zip(xs, xs[1:]):
        if b - a <= 1e-12:
            continue
        mid = 0.5 * (a + b)
        live = [int(i) for i in sample if A.xl[i] <= a + 1e-12 and A.xr[i] >= b - 1e-12]
        live.sort(key=lambda i: float(A.y_at(i, mid)))
        curves = [Curve("circ", float(A.cx[i]), float(A.cy[i])) for i in live]
        below = None
        for c in curves:
            cells.append((a, b, c, below))
            below = c
        cells.append((a, b, SEPARATOR, below))
    return cells


def _merge_cells(raw):
    """Join x-adjacent cells bounded by the same two curves."""
    open_: Dict[tuple, list] = {}
    out = []
    for a, b, top, bottom in raw:
        key = (top, bottom)
        cur = open_.get(key)
        if cur is not None and abs(cur[1] - a) <= 1e-12:
            cur[1] = b
        else:
            cur = [a, b, top, bottom]
            open_[key] = cur
            out.append(cur)
    return [tuple(c) for c in out]


def epsilon_cutting(A: ArcSet, eps: float, slab: Optional[Tuple[float, float]] = None,
                    seed: int = 0, idx=None, max_rounds: int = 8,
                    tol: Optional[float] = None) -> TrapezoidCutting:
    """Cells covering the slab below the separator, each crossed by <= eps*|arcs|.

    A seeded random sample is decomposed into pseudo-trapezoids; if some
    cell is crossed by too many arcs the sample is redrawn, and after
    ``max_rounds`` failures every arc is used (no cell is then crossed).
    """
    if not 0 < eps <= 1:
        raise ValueError("eps must lie in (0, 1]")
    t = geo.TAU if tol is None else tol
    if idx is None:
        idx = np.arange(len(A))
    idx = np.asarray(idx, dtype=np.int64)
    if slab is None:
        slab = A.slab() if len(idx) else (-1.0, 1.0)
    n = len(idx)
    bound = eps * n
    r = math.ceil((4.0 / eps) * math.log(max(4.0 / eps, 2.0)))
    rng = np.random.default_rng(seed)
    for rnd in range(max_rounds + 1):
        if r >= n or rnd == max_rounds:
            sample = idx
        else:
            sample = rng.choice(idx, size=r, replace=False)
        raw = _merge_cells(_sample_decomposition(A, sample, slab, t))
        cells = []
        worst = 0
        for (a, b, top, bottom) in raw:
            m = _crosses_open(A, idx, a, b, top, bottom, t)
            conf = A.ids[idx[m]]
            worst = max(worst, len(conf))
            cells.append(TrapCell(a, b, top, bottom, conf))
        if worst <= bound or len(sample) == n:
            return TrapezoidCutting(cells, slab)
    raise AssertionError("unreachable")


# ---------------------------------------------------------------------------
# base cutting and refinement
# ---------------------------------------------------------------------------

def base_cutting(A: ArcSet, tol: Optional[float] = None) -> VertexSegmentCutting:
    """Two separator points at the slab ends and one segment between them."""
    t = geo.TAU if tol is None else tol
    slab = A.slab()
    n = len(A)
    Q = [Point(slab[0], 0.0), Point(slab[1], 0.0)]
    qc = [below_ids(A, q.x, q.y, t) for q in Q]
    S = [(slab[0], slab[1])]
    sc = [crossing_ids(A, slab[0], slab[1], t)]
    return VertexSegmentCutting(n, n, Q, qc, S, sc, slab)


class _Chain:
    """Greedy construction of one cell's output chain."""

    def __init__(self, A: ArcSet, G: np.ndarray, top: Curve, x0: float, x1: float,
                 k: float, K: float, tol: float):
        self.A, self.G, self.top = A, G, top
        self.x0, self.x1 = x0, x1
        self.k, self.K, self.tol = k, K, tol
        self.m = max(int(math.floor(K)) - 1, int(k) + 2)
        self.checks = 0

    def point_at(self, x: float) -> Point:
        """Point of the capped m-level at x."""
        T = float(self.top.y(x))
        G = self.G
        if len(G):
            alive = (self.A.xl[G] <= x) & (x <= self.A.xr[G])
            ys = self.A.y_at(G[alive], x)
            ys = ys[ys <= T]
            if len(ys) >= self.m:
                y = float(np.partition(ys, self.m - 1)[self.m - 1])
                return Point(x, min(y, T))
        return Point(x, min(T, 0.0))

    def _on_sep(self, p: Point) -> bool:
        return abs(p.y) <= self.tol

    def segment_ok(self, v: Point, w: Point) -> bool:
        if not (self.top.kind == "flat" and self.top.cy == 0.0):
            return False
        if not (self._on_sep(v) and self._on_sep(w)):
            return False
        return len(crossing_ids(self.A, v.x, w.x, self.tol, self.G)) <= self.K

    def arc_ok(self, v: Point, w: Point) -> bool:
        self.checks += 1
        t = self.tol
        if w.x - v.x <= 1e-12:
            return True
        try:
            arc = geo.connecting_arc(v, w, t)
        except geo.GeometryError:
            return True
        if arc is None:
            return False
        A_curve = Curve("circ", arc.cx, arc.cy)
        lo, hi = v.x, w.x
        # part of the edge strictly inside the cell (below its top)
        if self.top.kind == "flat":
            if self.top.cy >= 0.0:
                R = (lo, hi)
            else:
                return True
        else:
            # A < top is a prefix or suffix of [lo, hi]
            ya_lo = float(A_curve.y(lo)) - float(self.top.y(lo))
            ya_hi = float(A_curve.y(hi)) - float(self.top.y(hi))
            if ya_lo >= -t and ya_hi >= -t:
                return True
            if ya_lo < -t and ya_hi < -t:
                R = (lo, hi)
            else:
                a, b = lo, hi
                for _ in range(60):
                    mid = 0.5 * (a + b)
                    inside = float(A_curve.y(mid)) - float(self.top.y(mid)) < -t
                    if inside == (ya_lo < -t):
                        a = mid
                    else:
                        b = mid
                R = (lo, b) if ya_lo < -t else (a, hi)
        need = int(math.floor(self.k)) + 1
        G = self.G
        if len(G) < need:
            return False
        s, e, ok = _le_interval(self.A, G, A_curve, R[0], R[1], t)
        s, e = s[ok], e[ok]
        if len(s) < need:
            return False
        s = np.sort(s)
        e = np.sort(e)
        # coverage at R.lo and just after every interval end inside R
        cov0 = np.searchsorted(s, R[0], "right") - np.searchsorted(e, R[0], "left")
        if cov0 < need:
            return False
        inner = e[(e >= R[0]) & (e < R[1] - 1e-12)]
        if len(inner):
            cov = np.searchsorted(s, inner, "right") - np.searchsorted(e, inner, "right")
            if cov.min() < need:
                return False
        return True

    def edge(self, v: Point, w: Point) -> Optional[str]:
        if self.segment_ok(v, w):
            return "segment"
        if self.arc_ok(v, w):
            return "arc"
        return None

    def build(self, max_depth: int = 48):
        """Vertices (x-sorted) and separator segments for this cell."""
        v = self.point_at(self.x0)
        verts = [v]
        segs = []
        while v.x < self.x1 - 1e-12:
            span = self.x1 - v.x
            best = None
            step = span
            depth = 0
            # shrink until an edge is valid
            while depth < max_depth:
                w = self.point_at(v.x + step) if step < span else self.point_at(self.x1)
                kind = self.edge(v, w)
                if kind is not None:
                    best = (w, kind, step)
                    break
                step *= 0.5
                depth += 1
            if best is None:
                return None
            # try to stretch between the valid step and the failed double
            if best[2] < span:
                good, bad = best[2], min(best[2] * 2.0, span)
                for _ in range(6):
                    mid = 0.5 * (good + bad)
                    w = self.point_at(v.x + mid)
                    kind = self.edge(v, w)
                    if kind is not None:
                        good, best = mid, (w, kind, mid)
                    else:
                        bad = mid
            w, kind, _ = best
            if kind == "segment":
                segs.append((v.x, w.x))
            verts.append(w)
            v = w
        return verts, segs


def _cell_candidates(cut: VertexSegmentCutting, x0: float, x1: float, A: ArcSet, t: float):
    """Arc positions that may meet the cell over [x0, x1] (by vertex/segment lists)."""
    parts = []
    for q, conf in zip(cut.Q, cut.q_conf):
        if x0 - 1e-9 <= q.x <= x1 + 1e-9:
            parts.append(conf)
    for (a, b), conf in zip(cut.S, cut.s_conf):
        if a <= x1 + 1e-9 and b >= x0 - 1e-9:
            parts.append(conf)
    if not parts:
        return np.zeros(0, dtype=np.int64)
    ids = np.unique(np.concatenate(parts))
    return A.positions(ids)


def cell_conflicts(A: ArcSet, cand, x0: float, x1: float, top: Curve, tol: float) -> np.ndarray:
    """Positions among ``cand`` of arcs meeting the closed bottom-open cell."""
    cand = np.asarray(cand, dtype=np.int64)
    if not len(cand):
        return cand
    if top.kind == "flat" and top.cy <= -1.0:
        # nothing reaches below y = -1 except at a single lowest point
        low = (A.cy[cand] <= tol) & (A.cx[cand] >= x0) & (A.cx[cand] <= x1)
        return cand[low]
    _, _, ok = _le_interval(A, cand, top, x0, x1, tol)
    return cand[ok]


def refine(A: ArcSet, cut_in: VertexSegmentCutting, k: float, cfg: CuttingConfig,
           C: Optional[float] = None, tol: Optional[float] = None) -> VertexSegmentCutting:
    """A (k, C*k)-cutting from a coarser cutting, one input cell at a time."""
    t = geo.TAU if tol is None else tol
    C = cfg.C if C is None else C
    K = C * k
    vd = cut_in.decomposition()
    lo_s, hi_s = cut_in.slab
    verts: Dict[Tuple[float, float], Point] = {}
    segs: List[Tuple[float, float]] = []
    for cell in vd.cells:
        x0, x1 = max(cell.x0, lo_s), min(cell.x1, hi_s)
        if x1 - x0 <= 1e-12:
            continue
        top = curve_of_piece(cell.top)
        if top.kind == "flat" and top.cy <= -1.0:
            continue
        cand = _cell_candidates(cut_in, x0, x1, A, t)
        G = cell_conflicts(A, cand, x0, x1, top, t)
        ch = _Chain(A, G, top, x0, x1, k, K, t)
        res = ch.build()
        if res is None:
            raise ValidationFailure(f"no chain over [{x0}, {x1}] at k={k}")
        vs, ss = res
        for v in vs:
            verts.setdefault((v.x, v.y), v)
        segs.extend(ss)
    Q = sorted(verts.values(), key=lambda p: (p.x, p.y))
    # a point strictly below another at the same x adds nothing
    pruned: List[Point] = []
    for q in Q:
        pruned.append(q)
    Q = pruned
    segs = _merge_segments(segs)
    qc = [below_ids(A, q.x, q.y, t) for q in Q]
    sc = [crossing_ids(A, a, b, t) for a, b in segs]
    # segment endpoints must be vertices
    qx = {(q.x, q.y) for q in Q}
    for a, b in segs:
        for x in (a, b):
            if (x, 0.0) not in qx:
                Q.append(Point(x, 0.0))
                qc.append(below_ids(A, x, 0.0, t))
                qx.add((x, 0.0))
    order = sorted(range(len(Q)), key=lambda i: (Q[i].x, Q[i].y))
    Q = [Q[i] for i in order]
    qc = [qc[i] for i in order]
    return VertexSegmentCutting(k, K, Q, qc, segs, sc, cut_in.slab)


def _merge_segments(segs):
    segs = sorted(segs)
    out = []
    for a, b in segs:
        if out and a <= out[-1][1] + 1e-12 and False:
            out[-1] = (out[-1][0], max(out[-1][1], b))
        else:
            out.append((a, b))
    return out


def hierarchy(A: ArcSet, k: float, cfg: Optional[CuttingConfig] = None,
              tol: Optional[float] = None, check: bool = True,
              stats: Optional[dict] = None) -> List[VertexSegmentCutting]:
    """Cuttings for levels B^i * k, finest first; the last one is the base."""
    cfg = cfg or CuttingConfig()
    t = geo.TAU if tol is None else tol
    n = len(A)
    if n == 0:
        return [base_cutting(A, t)]
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    top = 0
    while cfg.B ** top * k < n:
        top += 1
    cur = base_cutting(A, t)
    out = [cur]
    retries = 0
    for i in range(top - 1, -1, -1):
        ki = cfg.B ** i * k
        C = cfg.C
        for attempt in range(cfg.max_retries + 1):
            try:
                nxt = refine(A, cur, ki, cfg, C, t)
                if check:
                    rep = verify(A, nxt, ki, C * ki, samples=cfg.verify_samples,
                                 seed=cfg.seed + i, size_bound=cfg.C_size * n / ki,
                                 crossing_limit=cfg.verify_crossings)
                    if not rep.ok:
                        raise ValidationFailure(str(rep.violations[:3]))
                nxt.retries = attempt
                break
            except ValidationFailure as exc:
                retries += 1
                log.warning("level k=%s failed (%s); retrying with C=%s", ki, exc, C * cfg.retry_growth)
                C *= cfg.retry_growth
        else:
            raise ValidationFailure(f"level k={ki} failed after {cfg.max_retries} retries")
        cur = nxt
        out.append(cur)
    if stats is not None:
        stats["retries"] = retries
        stats["levels"] = len(out)
    out.reverse()
    return out


# ---------------------------------------------------------------------------
# conversions between the two forms
# ---------------------------------------------------------------------------

def to_trapezoids(A: ArcSet, vs: VertexSegmentCutting, tol: Optional[float] = None) -> TrapezoidCutting:
    """Bottom-open cells of VD(Q, S) with conflict lists.

    Cells under a y = -1 half-line are lifted to the separator; no arc can
    cross them when the cutting is valid, which is asserted.
    """
    t = geo.TAU if tol is None else tol
    vd = vs.decomposition()
    lo_s, hi_s = vs.slab
    cells = []
    for cell in vd.cells:
        x0, x1 = max(cell.x0, lo_s), min(cell.x1, hi_s)
        if x1 - x0 <= 1e-12:
            continue
        top = curve_of_piece(cell.top)
        special = top.kind == "flat" and top.cy <= -1.0
        if special:
            crossing = cell_conflicts(A, np.arange(len(A)), x0, x1, SEPARATOR, t)
            # arcs inside the lifted cell would have uncovered level-0 points
            # just below them
            if len(crossing) and vs.k >= 0:
                inside = [p for p in crossing if A.xl[p] < x1 and A.xr[p] > x0]
                if inside:
                    raise ValidationFailure("arc crosses a lifted wing cell")
            cells.append(TrapCell(x0, x1, SEPARATOR, None, np.zeros(0, dtype=np.int64),
                                  special=True))
            continue
        cand = _cell_candidates(vs, x0, x1, A, t)
        conf = cell_conflicts(A, cand, x0, x1, top, t)
        corners = tuple(i for i in cell.vertices)
        cells.append(TrapCell(x0, x1, top, None, A.ids[conf], corners))
    return TrapezoidCutting(cells, vs.slab, vs.k, 3 * vs.K, vs)


def trapezoids_to_vs(A: ArcSet, tc: TrapezoidCutting, k: float,
                     tol: Optional[float] = None) -> VertexSegmentCutting:
    t = geo.TAU if tol is None else tol
    if not tc.cells:
        return VertexSegmentCutting(k, 0, [], [], [], [], tc.slab)
    pts: Dict[Tuple[float, float], Point] = {}
    segs = []
    for c in tc.cells:
        for x in (c.x0, c.x1):
            y = min(float(c.top.y(x)), 0.0)
            pts.setdefault((x, y), Point(x, y))
        if c.top.kind == "flat" and c.top.cy == 0.0:
            segs.append((c.x0, c.x1))
    Q = sorted(pts.values(), key=lambda p: (p.x, p.y))
    segs = sorted(segs)
    qc = [below_ids(A, q.x, q.y, t) for q in Q]
    sc = [crossing_ids(A, a, b, t) for a, b in segs]
    K = max([len(c) for c in qc] + [len(c) for c in sc] + [0])
    return VertexSegmentCutting(k, K, Q, qc, segs, sc, tc.slab)


# ---------------------------------------------------------------------------
# verification
# ---------------------------------------------------------------------------

@dataclass
class VerifyReport:
    size_ok: bool = True
    levels_ok: bool = True
    segments_ok: bool = True
    coverage_ok: bool = True
    violations: List[str] = field(default_factory=list)
    max_level: int = 0
    max_crossings: int = 0
    samples_checked: int = 0

    @property
    def ok(self) -> bool:
        return self.size_ok and self.levels_ok and self.segments_ok and self.coverage_ok


def verify(A: ArcSet, cut: VertexSegmentCutting, k: float, K: float, samples: int = 10_000,
           seed: int = 0, size_bound: Optional[float] = None, crossing_limit: int = 512,
           tol: Optional[float] = None) -> VerifyReport:
    """Brute-force check of the cutting conditions."""
    t = geo.TAU if tol is None else tol
    rep = VerifyReport()
    n = len(A)
    if n == 0:
        return rep
    if size_bound is not None and len(cut.Q) > size_bound:
        rep.size_ok = False
        rep.violations.append(f"size {len(cut.Q)} > {size_bound:.1f}")
    if cut.Q:
        lv = levels(A, [q.x for q in cut.Q], [q.y for q in cut.Q], t)
        rep.max_level = int(lv.max())
        for q, l in zip(cut.Q, lv):
            if l > K:
                rep.levels_ok = False
                rep.violations.append(f"vertex ({q.x:.6f},{q.y:.6f}) level {l} > {K}")
                break
    for (a, b) in cut.S:
        c = len(crossing_ids(A, a, b, t))
        rep.max_crossings = max(rep.max_crossings, c)
        if c > K:
            rep.segments_ok = False
            rep.violations.append(f"segment [{a:.6f},{b:.6f}] crosses {c} > {K}")
    rng = np.random.default_rng(seed)
    lo, hi = cut.slab
    X = rng.uniform(lo, hi, samples)
    Y = rng.uniform(-1.0, 0.0, samples)
    # bias half of the samples to sit just under the (k+1)-level
    half = samples // 2
    if half:
        Xh = X[:half]
        Yh = _level_heights(A, Xh, int(math.floor(k)) + 1) - rng.uniform(1e-7, 0.05, half)
        Y[:half] = np.clip(Yh, -1.0, 0.0)
    pts_x, pts_y = X, Y
    # all crossing vertices too (sampled for large inputs)
    cx = _crossing_points(A, crossing_limit, rng)
    if len(cx):
        pts_x = np.concatenate([pts_x, cx[:, 0]])
        pts_y = np.concatenate([pts_y, cx[:, 1]])
    lv = levels(A, pts_x, pts_y, t)
    sel = np.nonzero(lv <= k)[0]
    # a sample within tolerance of an arc is judged by its level just below
    rep.samples_checked = len(sel)
    ux, uy = pts_x[sel], pts_y[sel]
    top = upper_many(cut, ux)
    bad = np.nonzero(uy > top + 11 * t)[0]
    if len(bad):
        rep.coverage_ok = False
        for i in bad[:20]:
            rep.violations.append(f"uncovered ({ux[i]:.6f},{uy[i]:.6f}) level {lv[sel[i]]}")
    return rep


def upper_many(cut: VertexSegmentCutting, X) -> np.ndarray:
    """Top of the covered region at each x (+inf outside the slab)."""
    X = np.asarray(X, dtype=float)
    out = np.full(len(X), np.inf)
    inside = (X >= cut.slab[0]) & (X <= cut.slab[1])
    vd = cut.decomposition()
    if not vd.cells:
        return out
    starts = np.array([c.x0 for c in vd.cells])
    ci = np.clip(np.searchsorted(starts, X, "right") - 1, 0, len(vd.cells) - 1)
    for j in np.unique(ci[inside]):
        g = np.nonzero(inside & (ci == j))[0]
        c = curve_of_piece(vd.cells[j].top)
        out[g] = c.y(X[g])
    return np.maximum(out, np.where(inside, -1.0, np.inf))


def _level_heights(A: ArcSet, X, j: int) -> np.ndarray:
    """Height of the j-th lowest arc at each x (0 where fewer arcs)."""
    out = np.zeros(len(X))
    for s in range(0, len(X), 512):
        x = X[s:s + 512, None]
        d = x - A.cx
        ya = A.cy - np.sqrt(np.clip(1.0 - d * d, 0.0, None))
        ya = np.where((A.xl <= x) & (x <= A.xr), ya, 0.0)
        if j <= ya.shape[1]:
            out[s:s + 512] = np.partition(ya, j - 1, axis=1)[:, j - 1]
    return out


def _crossing_points(A: ArcSet, limit: int, rng) -> np.ndarray:
    n = len(A)
    if n < 2:
        return np.zeros((0, 2))
    idx = np.arange(n)
    if n > limit:
        idx = np.sort(rng.choice(n, size=limit, replace=False))
    i, j = np.triu_indices(len(idx), 1)
    a, b = idx[i], idx[j]
    ax, ay, bx, by = A.cx[a], A.cy[a], A.cx[b], A.cy[b]
    dx, dy = bx - ax, by - ay
    d2 = dx * dx + dy * dy
    good = (d2 > 0) & (d2 <= 4.0)
    d = np.sqrt(np.where(good, d2, 1.0))
    h = np.sqrt(np.clip(1.0 - d2 / 4.0, 0.0, None))
    out = []
    for sgn in (1.0, -1.0):
        x = ax + dx / 2 + sgn * h * (-dy / d)
        y = ay + dy / 2 + sgn * h * (dx / d)
        ok = good & (y < 0) & (y <= np.minimum(ay, by)) & \
            (A.xl[a] <= x) & (x <= A.xr[a]) & (A.xl[b] <= x) & (x <= A.xr[b])
        out.append(np.column_stack([x[ok], y[ok]]))
    return np.concatenate(out)


# ---------------------------------------------------------------------------
# dump format
# ---------------------------------------------------------------------------

def dump_jsonl(cut: VertexSegmentCutting, fh) -> None:
    fh.write(json.dumps({"type": "meta", "k": cut.k, "K": cut.K, "slab": list(cut.slab)}) + "\n")
    for q, c in zip(cut.Q, cut.q_conf):
        fh.write(json.dumps({"type": "vertex", "x": q.x, "y": q.y,
                             "conflicts": [int(i) for i in c]}) + "\n")
    for (a, b), c in zip(cut.S, cut.s_conf):
        fh.write(json.dumps({"type": "segment", "a": a, "b": b,
                             "conflicts": [int(i) for i in c]}) + "\n")


def load_jsonl(fh) -> VertexSegmentCutting:
    meta, Q, qc, S, sc = None, [], [], [], []
    for line in fh:
        if not line.strip():
            continue
        r = json.loads(line)
        if r["type"] == "meta":
            meta = r
        elif r["type"] == "vertex":
            Q.append(Point(r["x"], r["y"]))
            qc.append(np.array(r["conflicts"], dtype=np.int64))
        elif r["type"] == "segment":
            S.append((r["a"], r["b"]))
            sc.append(np.array(r["conflicts"], dtype=np.int64))
    if meta is None:
        raise ValueError("missing meta record")
    return VertexSegmentCutting(meta["k"], meta["K"], Q, qc, S, sc, tuple(meta["slab"]))
