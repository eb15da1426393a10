"""Dynamic top-open skyline structure.

An (a, 2a)-tree over the points in x order, with ``a = ceil(2 B^eps)`` and
leaves of ``[B, 2B]`` points.  Every node carries a persistent CPQA over its
subtree: a point ``p`` becomes the element ``(-y, -x, -id)``, so in x order an
element is attrited by a later one exactly when that point dominates it, and
a node's queue drains to the skyline of its subtree from left to right.

Internal nodes keep a representative block holding copies of their
children's critical records.  Reading it makes those records resident, so the
children's queues can be catenated without further I/O.
"""
from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from typing import Iterable, Sequence

from . import cpqa as C
from .emblock import BlockStore
from .geom import Point, xkey


def elem(p: Point) -> tuple:
    return (-p.y, -p.x, -p.id)


def point_of(e: tuple) -> Point:
    return Point(-e[1], -e[0], -e[2])


def params(B: int, eps: float) -> tuple[int, int]:
    """Branching parameter ``a`` and CPQA buffer size ``b``."""
    if not 0 <= eps <= 1:
        raise ValueError(f"eps must lie in [0, 1], got {eps}")
    a = max(2, math.ceil(2 * B ** eps))
    b = min(B, max(1, round(B ** (1 - eps))))
    return a, b


class _Node:
    __slots__ = ("leaf", "pts", "keys", "kids", "q", "lo", "hi", "size", "rep",
                 "rep_elems", "rep_bid")

    def __init__(self, leaf: bool):
        self.leaf = leaf
        self.pts: list[Point] = []       # leaves: points in x order
        self.keys: list[tuple] = []      # leaves: their xkeys
        self.kids: list[_Node] = []
        self.q: C.Cpqa | None = None
        self.lo = self.hi = None         # xkeys of the extreme points
        self.size = 0
        self.rep: tuple = ()             # internal: children's critical records
        self.rep_elems = 0
        self.rep_bid = 0

    def __repr__(self) -> str:
        kind = "leaf" if self.leaf else f"node/{len(self.kids)}"
        return f"_Node({kind}, size={self.size})"


class DynTopOpen:
    """Top-open range skyline with insertions and deletions."""

    def __init__(self, B: int = 64, eps: float = 0.5, store: BlockStore | None = None):
        self.store = store or BlockStore(B, memory_budget_blocks=1 << 30)
        self.B = self.store.B
        self.eps = eps
        self.a, self.b = params(self.B, eps)
        self.root: _Node | None = None

    # -- construction ----------------------------------------------------
    @classmethod
    def build_sorted(cls, points: Sequence[Point], B: int = 64, eps: float = 0.5,
                     store: BlockStore | None = None) -> "DynTopOpen":
        T = cls(B, eps, store)
        pts = list(points)
        for p, q in zip(pts, pts[1:]):
            if q.x < p.x:
                raise ValueError(f"points not sorted by x: {p} before {q}")
        pts.sort(key=xkey)
        for p, q in zip(pts, pts[1:]):
            if xkey(p) == xkey(q):
                raise ValueError(f"duplicate point {p}")
        if not pts:
            return T
        st = T.store
        st.scan(len(pts))
        level = []
        for chunk in _chunks(pts, T.B):
            leaf = _Node(True)
            leaf.pts = chunk
            T._refresh_leaf(leaf)
            level.append(leaf)
        while len(level) > 1:
            nxt = []
            for group in _chunks(level, T.a):
                u = _Node(False)
                u.kids = group
                T._refresh_internal(u)
                nxt.append(u)
            level = nxt
        T.root = level[0]
        return T

    def __len__(self) -> int:
        return 0 if self.root is None else self.root.size

    # -- node maintenance --------------------------------------------------
    def _refresh_leaf(self, u: _Node) -> None:
        st = self.store
        u.keys = [xkey(p) for p in u.pts]
        u.size = len(u.pts)
        u.lo, u.hi = u.keys[0], u.keys[-1]
        st.emit(u.size)
        u.q = C.prepare(C.Cpqa.from_sequence([elem(p) for p in u.pts], self.b, st))

    def _write_rep(self, u: _Node) -> None:
        recs = []
        for c in u.kids:
            recs.extend(C.critical_records(c.q))
        u.rep = tuple((r.bid, r.buf) for r in recs)
        u.rep_elems = sum(len(r.buf) for r in recs)
        u.rep_bid = self.store.new_id()
        self.store.emit(u.rep_elems)

    def _load_rep(self, u: _Node):
        """Read the representative block and keep it resident."""
        st = self.store
        st.charge_read(u.rep_bid, u.rep_elems)
        st.pin(u.rep_bid, u.rep_elems, covers=[bid for bid, _ in u.rep], owner="rep")
        return u.rep_bid

    def _refresh_internal(self, u: _Node) -> None:
        st = self.store
        u.lo, u.hi = u.kids[0].lo, u.kids[-1].hi
        u.size = sum(c.size for c in u.kids)
        self._write_rep(u)
        st.scan(self.B)
        pin = self._load_rep(u)
        try:
            q = C.multi_catenate([c.q for c in u.kids])
        finally:
            st.unpin(pin)
        u.q = C.prepare(q)

    # -- updates -----------------------------------------------------------
    def _path(self, k: tuple) -> list[tuple[_Node, int]]:
        path = []
        u = self.root
        while not u.leaf:
            self.store.scan(self.B)
            i = 0
            while i + 1 < len(u.kids) and u.kids[i + 1].lo <= k:
                i += 1
            path.append((u, i))
            u = u.kids[i]
        self.store.scan(len(u.pts))
        path.append((u, -1))
        return path

    def insert(self, p: Point) -> None:
        k = xkey(p)
        if self.root is None:
            leaf = _Node(True)
            leaf.pts = [p]
            self._refresh_leaf(leaf)
            self.root = leaf
            return
        path = self._path(k)
        leaf = path[-1][0]
        i = bisect_left(leaf.keys, k)
        if i < len(leaf.keys) and leaf.keys[i] == k:
            raise KeyError(f"point {p} already present")
        leaf.pts.insert(i, p)
        self._fix_path(path)

    def delete(self, p: Point) -> None:
        k = xkey(p)
        if self.root is None:
            raise KeyError(f"point {p} not present")
        path = self._path(k)
        leaf = path[-1][0]
        i = bisect_left(leaf.keys, k)
        if i == len(leaf.keys) or leaf.keys[i] != k:
            raise KeyError(f"point {p} not present")
        del leaf.pts[i]
        if not leaf.pts and len(path) == 1:
            self.root = None
            return
        self._fix_path(path)

    def _fix_path(self, path) -> None:
        """Rebalance bottom-up and rebuild every touched queue."""
        nodes = [u for u, _ in path]
        idx = [i for _, i in path]
        depth = len(nodes) - 1
        parent = nodes[depth - 1] if depth else None
        repl, lo, hi = self._rebalance(nodes[depth], parent, idx[depth - 1] if depth else 0)
        for depth in range(len(nodes) - 2, -1, -1):
            u = nodes[depth]
            u.kids[lo:hi + 1] = repl
            parent = nodes[depth - 1] if depth else None
            repl, lo, hi = self._rebalance(u, parent, idx[depth - 1] if depth else 0)
        if len(repl) == 1:
            root = repl[0]
        else:
            root = _Node(False)
            root.kids = repl
            self._refresh_internal(root)
        while not root.leaf and len(root.kids) == 1:
            root = root.kids[0]
        self.root = root

    def _make(self, leaf: bool, items: list) -> _Node:
        u = _Node(leaf)
        if leaf:
            u.pts = items
            self._refresh_leaf(u)
        else:
            u.kids = items
            self._refresh_internal(u)
        return u

    def _rebalance(self, u: _Node, parent: _Node | None, i: int):
        """Replacement for ``parent.kids[lo:hi+1]`` after ``u`` changed."""
        cap = self.B if u.leaf else self.a
        items = u.pts if u.leaf else u.kids
        if parent is not None and len(items) < cap:
            # underflow: merge with a neighbour, then split again if too big
            j = i + 1 if i + 1 < len(parent.kids) else i - 1
            sib = parent.kids[j]
            sib_items = sib.pts if sib.leaf else sib.kids
            self.store.scan(len(sib_items) if sib.leaf else self.B)
            merged = items + sib_items if j > i else sib_items + items
            out = [self._make(u.leaf, ch) for ch in _chunks(merged, cap)]
            return out, min(i, j), max(i, j)
        if len(items) > 2 * cap:
            return [self._make(u.leaf, ch) for ch in _chunks(items, cap)], i, i
        if u.leaf:
            self._refresh_leaf(u)
        else:
            self._refresh_internal(u)
        return [u], i, i

    # -- queries -----------------------------------------------------------
    def query(self, a1, a2, beta) -> list[Point]:
        """Skyline of the points in ``[a1, a2] x [beta, inf)``, by increasing x."""
        if a1 > a2:
            raise ValueError("a1 > a2")
        if self.root is None:
            return []
        pieces: list[C.Cpqa] = []
        self._collect(self.root, a1, a2, pieces)
        if not pieces:
            return []
        st = self.store
        aux = pieces[-1]
        with st.operation():
            for q in reversed(pieces[:-1]):
                aux = C.catenate_and_attrite(q, aux)
        out = []
        limit = -beta
        pinned = C.pin_critical(aux, owner="query")
        try:
            while aux.total:
                e = C.find_min(aux)
                if e[0] > limit:
                    break
                out.append(point_of(e))
                _, nxt = C.delete_min(aux)
                new = C.pin_critical(nxt, owner="query")
                for bid in pinned:
                    st.unpin(bid)
                pinned = new
                aux = nxt
        finally:
            for bid in pinned:
                st.unpin(bid)
        return out

    def _collect(self, u: _Node, a1, a2, pieces: list) -> None:
        st = self.store
        if u.leaf:
            st.scan(len(u.pts))
            inside = [elem(p) for p in u.pts if a1 <= p.x <= a2]
            if inside:
                pieces.append(C.Cpqa.from_sequence(inside, self.b, st))
            return
        st.scan(self.B)
        group: list[C.Cpqa] = []
        pin = None

        def flush():
            nonlocal group
            if group:
                pieces.append(C.multi_catenate(group))
                group = []

        try:
            for c in u.kids:
                lo_x, hi_x = c.lo[0], c.hi[0]
                if hi_x < a1 or lo_x > a2:
                    continue
                if a1 <= lo_x and hi_x <= a2:
                    if pin is None:
                        pin = self._load_rep(u)
                    group.append(c.q)
                else:
                    flush()
                    self._collect(c, a1, a2, pieces)
            flush()
        finally:
            if pin is not None:
                st.unpin(pin)

    # -- inspection --------------------------------------------------------
    def nodes(self) -> list[_Node]:
        out = []
        stack = [self.root] if self.root is not None else []
        while stack:
            u = stack.pop()
            out.append(u)
            if not u.leaf:
                stack.extend(u.kids)
        return out

    def blocks(self) -> int:
        """Block census: leaf blocks, one per internal node, representative blocks."""
        st = self.store
        total = 0
        for u in self.nodes():
            if u.leaf:
                total += st.cost(len(u.pts))
            else:
                total += 1 + st.cost(u.rep_elems)
        return total

    def points(self) -> list[Point]:
        out = []
        for u in self._leaves(self.root):
            out.extend(u.pts)
        return out

    def _leaves(self, u):
        if u is None:
            return
        if u.leaf:
            yield u
        else:
            for c in u.kids:
                yield from self._leaves(c)

    def check_node(self, u: _Node) -> str | None:
        """First problem found at ``u``, or None."""
        rep = C.check_invariants(u.q)
        if not rep:
            return f"{u}: {rep.violation}"
        if not C.lemma_ready(u.q):
            return f"{u}: queue not ready for multi-catenation"
        pts = list(self._leaves(u))
        allp = [p for leaf in pts for p in leaf.pts]
        stair = _staircase(allp)
        with self.store.uncounted():
            got = [point_of(e) for e in C.drain(u.q)]
        if got != stair:
            return f"{u}: queue drains to {len(got)} points, skyline has {len(stair)}"
        if not u.leaf:
            expect = tuple((r.bid, r.buf) for c in u.kids for r in C.critical_records(c.q))
            if expect != u.rep:
                return f"{u}: representative block out of date"
        return None

    def check_shape(self) -> str | None:
        if self.root is None:
            return None
        B, a = self.B, self.a
        for u in self.nodes():
            if u is self.root:
                continue
            if u.leaf and not (B <= len(u.pts) <= 2 * B):
                return f"leaf with {len(u.pts)} points"
            if not u.leaf and not (a <= len(u.kids) <= 2 * a):
                return f"internal node with {len(u.kids)} children"
        depths = set()

        def walk(u, d):
            if u.leaf:
                depths.add(d)
            else:
                for c in u.kids:
                    walk(c, d + 1)
        walk(self.root, 0)
        if len(depths) > 1:
            return f"leaves at depths {sorted(depths)}"
        return None


def _staircase(points: Iterable[Point]) -> list[Point]:
    """Skyline of ``points`` (keyed dominance), by increasing x."""
    out = []
    best = None
    for p in sorted(points, key=xkey, reverse=True):
        k = (p.y, p.x, p.id)
        if best is None or k > best:
            out.append(p)
            best = k
    out.reverse()
    return out


def _chunks(items: list, size: int) -> list[list]:
    """Split into ``max(1, n // size)`` runs of near-equal length in [size, 2 size)."""
    n = len(items)
    m = max(1, n // size)
    out = []
    start = 0
    for j in range(m):
        end = start + n // m + (1 if j < n % m else 0)
        out.append(items[start:end])
        start = end
    return out


def build_sorted(points: Sequence[Point], eps: float = 0.5, B: int = 64,
                 store: BlockStore | None = None) -> DynTopOpen:
    return DynTopOpen.build_sorted(points, B, eps, store)
