"""Four-sided range skyline over a shallow weight-balanced tree.

Each internal node ``u`` keeps a right-open structure ``R(u)`` on the points
below it: a :class:`DynTopOpen` over axis-swapped points, since a band
``[lo, hi]`` in y becomes a top-open x-range once the axes are exchanged.
A query walks to the two boundary leaves and probes the fully covered
children from right to left, raising the y threshold as points are found.
"""
from __future__ import annotations

import math
from bisect import bisect_left
from typing import Iterable, Sequence

from .dynamic_topopen import DynTopOpen, _chunks
from .emblock import BlockStore
from .geom import INF, Point, QueryRect, skyline_scan, swap_axes, xkey


def fanout(n: int, B: int, eps: float) -> int:
    """Branching factor for ``n`` points.

    The nominal ``(n/B)^eps / log(n/B)`` is at most 2 for every desk-scale
    input, so it is raised to the smallest value keeping the height within
    ``ceil(1/eps) + 1`` at build time.
    """
    if not 0 < eps <= 1:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    m = n / B
    if m <= 2:
        return 2
    nominal = round(m ** eps / max(1.0, math.log2(m)))
    levels = math.ceil(1 / eps) + 1
    floor = math.ceil(m ** (1 / levels))
    return max(2, nominal, floor)


class _WNode:
    __slots__ = ("level", "pts", "keys", "kids", "R", "lo", "hi", "size")

    def __init__(self, level: int):
        self.level = level
        self.pts: list[Point] = []
        self.keys: list[tuple] = []
        self.kids: list[_WNode] = []
        self.R: DynTopOpen | None = None
        self.lo = self.hi = None
        self.size = 0

    @property
    def leaf(self) -> bool:
        return self.level == 0

    def __repr__(self) -> str:
        return f"_WNode(level={self.level}, size={self.size})"


class FourSided:
    """Linear-size structure for 4-sided skyline queries with updates."""

    def __init__(self, B: int = 64, eps: float = 0.5, dyn_eps: float = 0.5,
                 store: BlockStore | None = None):
        self.store = store or BlockStore(B, memory_budget_blocks=1 << 30)
        self.B = self.store.B
        self.eps = eps
        self.dyn_eps = dyn_eps
        self.f = 2
        self.root: _WNode | None = None
        self.n0 = 0
        self.updates = 0
        self.rebuilds = 0

    # -- construction ----------------------------------------------------
    @classmethod
    def build(cls, points: Iterable[Point], B: int = 64, eps: float = 0.5,
              dyn_eps: float = 0.5, store: BlockStore | None = None) -> "FourSided":
        F = cls(B, eps, dyn_eps, store)
        F._rebuild(list(points))
        return F

    def _rebuild(self, pts: list[Point]) -> None:
        st = self.store
        pts = sorted(pts, key=xkey)
        for p, q in zip(pts, pts[1:]):
            if xkey(p) == xkey(q):
                raise ValueError(f"duplicate point {p}")
        st.scan(len(pts))
        self.n0 = len(pts)
        self.updates = 0
        self.f = fanout(len(pts), self.B, self.eps)
        if not pts:
            self.root = None
            return
        level = []
        for chunk in _chunks(pts, self.B):
            u = _WNode(0)
            u.pts = chunk
            self._refresh(u)
            level.append(u)
        h = 0
        while len(level) > 1:
            h += 1
            nxt = []
            for group in _chunks(level, self.f):
                u = _WNode(h)
                u.kids = group
                self._refresh(u, rebuild_R=True)
                nxt.append(u)
            level = nxt
        self.root = level[0]

    def _refresh(self, u: _WNode, rebuild_R: bool = False) -> None:
        if u.leaf:
            u.keys = [xkey(p) for p in u.pts]
            u.size = len(u.pts)
            u.lo, u.hi = u.keys[0], u.keys[-1]
            self.store.emit(u.size)
            return
        u.size = sum(c.size for c in u.kids)
        u.lo, u.hi = u.kids[0].lo, u.kids[-1].hi
        if rebuild_R:
            swapped = sorted(swap_axes(self._points_below(u)), key=xkey)
            u.R = DynTopOpen.build_sorted(swapped, B=self.B, eps=self.dyn_eps,
                                          store=self.store)

    def _points_below(self, u: _WNode) -> list[Point]:
        if u.leaf:
            return list(u.pts)
        return [p for c in u.kids for p in self._points_below(c)]

    def __len__(self) -> int:
        return 0 if self.root is None else self.root.size

    @property
    def height(self) -> int:
        return 0 if self.root is None else self.root.level

    def max_height(self) -> int:
        return math.ceil(1 / self.eps) + 2

    # -- queries -----------------------------------------------------------
    def query(self, q: QueryRect) -> list[Point]:
        """Skyline of the points inside ``q``, by increasing x."""
        if self.root is None:
            return []
        pieces: list[tuple[_WNode, bool]] = []
        self._collect(self.root, q.x_lo, q.x_hi, pieces)
        out: list[list[Point]] = []
        lo = q.y_lo
        last = None
        for u, whole in reversed(pieces):
            if lo > q.y_hi:
                break
            if u.leaf:
                self.store.scan(len(u.pts))
                x_lo, x_hi = (-INF, INF) if whole else (q.x_lo, q.x_hi)
                found = skyline_scan(u.pts, _Band(x_lo, x_hi, lo, q.y_hi))
            else:
                found = self._probe(u, lo, q.y_hi)
            if found:
                top = found[0]
                # the threshold only ever rises along the sweep
                assert last is None or top.y >= last.y
                last = top
                lo = top.y + 1
                out.append(found)
        out.reverse()
        return [p for part in out for p in part]

    def _probe(self, u: _WNode, lo, hi) -> list[Point]:
        """Right-open probe of ``R(u)`` on the band ``[lo, hi]`` in y."""
        got = u.R.query(lo, hi, -INF)
        return [Point(p.y, p.x, p.id) for p in reversed(got)]

    def _collect(self, u: _WNode, a1, a2, pieces: list) -> None:
        if u.hi[0] < a1 or u.lo[0] > a2:
            return
        if a1 <= u.lo[0] and u.hi[0] <= a2:
            pieces.append((u, True))
            return
        if u.leaf:
            pieces.append((u, False))
            return
        self.store.scan(len(u.kids))
        for c in u.kids:
            self._collect(c, a1, a2, pieces)

    # -- updates -----------------------------------------------------------
    def _path(self, k: tuple) -> list[_WNode]:
        path = []
        u = self.root
        while not u.leaf:
            self.store.scan(len(u.kids))
            i = 0
            while i + 1 < len(u.kids) and u.kids[i + 1].lo <= k:
                i += 1
            path.append(u)
            u = u.kids[i]
        path.append(u)
        return path

    def insert(self, p: Point) -> None:
        if self.root is None:
            self._rebuild([p])
            return
        k = xkey(p)
        path = self._path(k)
        leaf = path[-1]
        i = bisect_left(leaf.keys, k)
        if i < len(leaf.keys) and leaf.keys[i] == k:
            raise KeyError(f"point {p} already present")
        for u in path[:-1]:
            u.R.insert(Point(p.y, p.x, p.id))
        leaf.pts.insert(i, p)
        self._after_update(path)

    def delete(self, p: Point) -> None:
        if self.root is None:
            raise KeyError(f"point {p} not present")
        k = xkey(p)
        path = self._path(k)
        leaf = path[-1]
        i = bisect_left(leaf.keys, k)
        if i == len(leaf.keys) or leaf.keys[i] != k:
            raise KeyError(f"point {p} not present")
        for u in path[:-1]:
            u.R.delete(Point(p.y, p.x, p.id))
        del leaf.pts[i]
        self._after_update(path)

    def _after_update(self, path: list[_WNode]) -> None:
        self.updates += 1
        if self.updates >= max(1, self.n0 // 2):
            self.rebuilds += 1
            self._rebuild(self._points_below(self.root))
            return
        # bottom-up: drop empty nodes, split overweight ones
        repl = [path[-1]]
        for depth in range(len(path) - 1, -1, -1):
            u = path[depth]
            new = []
            for v in repl:
                if v.leaf:
                    if v.pts:
                        self._refresh(v)
                        new.extend(self._split(v))
                else:
                    v.size = sum(c.size for c in v.kids)
                    if v.kids and v.size:
                        v.lo, v.hi = v.kids[0].lo, v.kids[-1].hi
                        new.extend(self._split(v))
            if depth == 0:
                self._set_root(new)
                return
            parent = path[depth - 1]
            j = parent.kids.index(u)
            parent.kids[j:j + 1] = new
            repl = [parent]

    def _set_root(self, nodes: list[_WNode]) -> None:
        if not nodes:
            self.root = None
        elif len(nodes) == 1:
            self.root = nodes[0]
        else:
            r = _WNode(nodes[0].level + 1)
            r.kids = nodes
            self._refresh(r, rebuild_R=True)
            self.root = r

    def _limit(self, level: int) -> int:
        return 2 * self.B * self.f ** level

    def _split(self, u: _WNode) -> list[_WNode]:
        """``u`` itself, or two halves of it rebuilt from scratch."""
        if u.size <= self._limit(u.level):
            return [u]
        if u.leaf:
            h = len(u.pts) // 2
            halves = [u.pts[:h], u.pts[h:]]
        else:
            if len(u.kids) < 2:
                return [u]
            acc, h = 0, 0
            while h < len(u.kids) - 1 and acc + u.kids[h].size <= u.size // 2:
                acc += u.kids[h].size
                h += 1
            h = max(1, h)
            halves = [u.kids[:h], u.kids[h:]]
        out = []
        for part in halves:
            v = _WNode(u.level)
            if u.leaf:
                v.pts = part
                self._refresh(v)
            else:
                v.kids = part
                self._refresh(v, rebuild_R=True)
            out.append(v)
        return out

    # -- inspection --------------------------------------------------------
    def nodes(self) -> list[_WNode]:
        out = []
        stack = [self.root] if self.root is not None else []
        while stack:
            u = stack.pop()
            out.append(u)
            stack.extend(u.kids)
        return out

    def points(self) -> list[Point]:
        return [] if self.root is None else self._points_below(self.root)

    def blocks(self) -> int:
        total = 0
        for u in self.nodes():
            if u.leaf:
                total += self.store.cost(len(u.pts))
            else:
                total += self.store.cost(len(u.kids)) + u.R.blocks()
        return total

    def check(self) -> str | None:
        """First structural problem found, or None."""
        if self.height > self.max_height():
            return f"height {self.height} exceeds {self.max_height()}"
        for u in self.nodes():
            if u.leaf:
                continue
            mine = sorted(self._points_below(u), key=xkey)
            theirs = sorted((Point(p.y, p.x, p.id) for p in u.R.points()), key=xkey)
            if mine != theirs:
                return f"{u}: R(u) holds {len(theirs)} points, subtree has {len(mine)}"
            if any(c.level != u.level - 1 for c in u.kids):
                return f"{u}: child on the wrong level"
        return None


class _Band:
    """Closed rectangle test used for the leaf scans."""
    __slots__ = ("x_lo", "x_hi", "y_lo", "y_hi")

    def __init__(self, x_lo, x_hi, y_lo, y_hi):
        self.x_lo, self.x_hi, self.y_lo, self.y_hi = x_lo, x_hi, y_lo, y_hi

    def contains(self, p: Point) -> bool:
        return self.x_lo <= p.x <= self.x_hi and self.y_lo <= p.y <= self.y_hi


def build(points: Sequence[Point], eps: float = 0.5, B: int = 64,
          store: BlockStore | None = None) -> FourSided:
    return FourSided.build(points, B=B, eps=eps, store=store)


def query(F: FourSided, q: QueryRect) -> list[Point]:
    return F.query(q)
