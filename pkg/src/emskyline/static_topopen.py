"""Static top-open skyline structure, buildable in linear I/Os from x-sorted input.

A point ``p`` becomes the horizontal segment ``[x_p, x_q) x y_p`` where ``q`` is
the leftmost point dominating ``p``.  A query ``[a1, a2] x [b, inf)`` first finds
the highest y in ``[a1, a2]`` (range-max tree) and then reports the segments
crossing the vertical segment ``a2 x [b, b']`` from a partially persistent
B-tree over the segments.  Because every update of the sweep happens at the
bottom of the current snapshot, the persistent tree is built level by level
touching only the lowest leaf.

Ties are broken with the keyed orders of :mod:`emskyline.geom`.  A point
whose dominator shares its x gets an empty segment; such segments are never
reported and are left out of the tree.
"""
from __future__ import annotations

import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .emblock import BlockStore
from .geom import INF, Point, xkey

NEG_INF = -math.inf
BOTTOM = (NEG_INF,)            # router key below every entry key
SPLIT_FRAC = 0.8
MERGE_FRAC = 0.25


class Segment(NamedTuple):
    x_lo: float
    x_hi: float
    y: object
    owner: int

    @property
    def empty(self) -> bool:
        return not (self.x_lo < self.x_hi)


@dataclass
class SigmaSet:
    segments: list

    def __iter__(self):
        return iter(self.segments)

    def __len__(self) -> int:
        return len(self.segments)


@dataclass(frozen=True)
class SigmaReport:
    ok: bool
    violation: str | None = None

    def __bool__(self) -> bool:
        return self.ok


class BuildError(AssertionError):
    pass


class _SpillStack:
    """A stack kept on disk except for its two top blocks."""

    def __init__(self, store: BlockStore):
        self.store = store
        self.items: list = []
        self.resident = 0      # elements held in memory

    def push(self, x) -> None:
        B = self.store.B
        self.items.append(x)
        self.resident += 1
        if self.resident > 2 * B:
            self.store.emit(B)
            self.resident -= B

    def pop(self):
        B = self.store.B
        x = self.items.pop()
        self.resident -= 1
        if self.resident == 0 and len(self.items) > 0:
            self.store.scan(B)
            self.resident = min(B, len(self.items))
        return x

    def top(self):
        return self.items[-1]

    def __len__(self) -> int:
        return len(self.items)


def _check_sorted(points: Sequence[Point]) -> list[Point]:
    for a, b in zip(points, points[1:]):
        if b.x < a.x:
            raise ValueError(f"points not sorted by x: {a} before {b}")
    return sorted(points, key=xkey)


def compute_sigma(points: Sequence[Point], store: BlockStore | None = None) -> SigmaSet:
    """Segments of ``points`` (x-sorted) by the stack sweep.

    Output order is by right endpoint, lower segments first on ties.
    """
    pts = _check_sorted(list(points))
    store = store or BlockStore(64)
    store.scan(len(pts))
    stack = _SpillStack(store)
    out: list[Segment] = []
    for p in pts:
        ky = (p.y, p.x, p.id)
        while len(stack) and stack.top()[0] < ky:
            q = stack.pop()[1]
            out.append(Segment(q.x, p.x, q.y, q.id))
        stack.push((ky, p))
    while len(stack):
        q = stack.pop()[1]
        out.append(Segment(q.x, INF, q.y, q.id))
    store.emit(len(out))
    return SigmaSet(out)


def verify_sigma_properties(segments: Iterable[Segment]) -> SigmaReport:
    """Check that non-empty segments are nesting and monotonic.

    Sorted by left end (longer first, higher first), the intervals form a
    forest; nesting holds iff each interval fits inside the open one below it
    on the stack.  Along any vertical line the crossing intervals are then a
    chain, and monotonicity amounts to every interval lying no higher than the
    one containing it.
    """
    segs = sorted((s for s in segments if s.x_lo < s.x_hi),
                  key=lambda s: (s.x_lo, -s.x_hi, _neg(s.y)))
    stack: list[Segment] = []
    for s in segs:
        while stack and stack[-1].x_hi <= s.x_lo:
            stack.pop()
        if stack:
            top = stack[-1]
            if s.x_hi > top.x_hi:
                return SigmaReport(False, f"nesting: {top} and {s} cross")
            if s.y > top.y and (s.x_lo, s.x_hi) != (top.x_lo, top.x_hi):
                return SigmaReport(
                    False, f"monotonic: at x={s.x_lo} {s} lies above the longer {top}")
        stack.append(s)
    return SigmaReport(True)


class _Neg:
    __slots__ = ("v",)

    def __init__(self, v):
        self.v = v

    def __lt__(self, other):
        return other.v < self.v

    def __eq__(self, other):
        return self.v == other.v


def _neg(y):
    return _Neg(y)


def verify_sigma_brute(segments: Iterable[Segment]) -> SigmaReport:
    """Quadratic reference for :func:`verify_sigma_properties`."""
    segs = [s for s in segments if s.x_lo < s.x_hi]
    for i, a in enumerate(segs):
        for b in segs[i + 1:]:
            lo, hi = max(a.x_lo, b.x_lo), min(a.x_hi, b.x_hi)
            if not (lo < hi):
                continue
            a_in_b = b.x_lo <= a.x_lo and a.x_hi <= b.x_hi
            b_in_a = a.x_lo <= b.x_lo and b.x_hi <= a.x_hi
            if not (a_in_b or b_in_a):
                return SigmaReport(False, f"nesting: {a} and {b} cross")
    xs = sorted({s.x_lo for s in segs} | {s.x_hi for s in segs if s.x_hi != INF})
    for x in xs:
        cross = sorted((s for s in segs if s.x_lo <= x < s.x_hi), key=lambda s: s.y)
        lens = [s.x_hi - s.x_lo for s in cross]
        for (s1, l1), (s2, l2) in zip(zip(cross, lens), zip(cross[1:], lens[1:])):
            if l2 < l1 and s2.y != s1.y:
                return SigmaReport(False, f"monotonic: at x={x} {s2} shorter than {s1}")
    return SigmaReport(True)


# -- range-max tree ----------------------------------------------------------

class RangeMaxTree:
    """Static B-tree over x with subtree maxima of y."""

    def __init__(self, points: Sequence[Point], store: BlockStore):
        self.store = store
        self.xs = [p.x for p in points]
        B = store.B
        self.fan = max(2, B)
        levels = [[p.y for p in points]]
        store.scan(len(points))
        store.emit(len(points))
        while len(levels[-1]) > 1:
            cur = levels[-1]
            nxt = [max(cur[i:i + self.fan]) for i in range(0, len(cur), self.fan)]
            store.emit(len(nxt))
            levels.append(nxt)
        self.levels = levels

    @property
    def height(self) -> int:
        return len(self.levels)

    def query(self, a1, a2):
        """max y over points with a1 <= x <= a2, or -inf."""
        lo = bisect_left(self.xs, a1)
        hi = bisect_right(self.xs, a2) - 1
        # the root-to-leaf descent locating both ends
        self.store.scan(self.store.B * max(1, self.height - 1))
        if lo > hi:
            return NEG_INF
        f = self.fan
        best = NEG_INF
        lvl = 0
        while lo <= hi:
            vals = self.levels[lvl]
            if lo // f == hi // f:
                best = max(best, max(vals[lo:hi + 1]))
                self.store.scan(1)
                break
            lend = (lo // f + 1) * f
            rstart = (hi // f) * f
            best = max(best, max(vals[lo:lend]), max(vals[rstart:hi + 1]))
            self.store.scan(1)
            self.store.scan(1)
            lo, hi = lo // f + 1, hi // f - 1
            lvl += 1
        return best


# -- partially persistent B-tree ---------------------------------------------

class PNode:
    """A node of the persistent tree; its rectangle is [x_lo, x_hi) x [y_low, ...)."""

    __slots__ = ("nid", "level", "x_lo", "x_hi", "y_low", "ents", "live", "up")

    def __init__(self, nid, level, x, y_low):
        self.nid = nid
        self.level = level
        self.x_lo = x
        self.x_hi = INF
        self.y_low = y_low
        self.ents: list = []     # [key, x_lo, x_hi, payload], key-sorted
        self.live = 0
        self.up = None           # next leaf above, fixed while alive

    def alive_at(self, x) -> bool:
        return self.x_lo <= x < self.x_hi

    def __repr__(self) -> str:
        return (f"PNode(l{self.level}#{self.nid} [{self.x_lo},{self.x_hi}) "
                f"y>={self.y_low} live={self.live}/{len(self.ents)})")


DEL, INS = 0, 1


def _order_events(raw: list) -> list:
    """Per abscissa: deletes lowest first, then inserts highest first.

    Items born and killed at the same abscissa are dropped.  ``raw`` holds
    ``(x, op, key, payload)`` in the order they happened.
    """
    out: list = []
    i = 0
    n = len(raw)
    while i < n:
        x = raw[i][0]
        j = i
        while j < n and raw[j][0] == x:
            j += 1
        group = raw[i:j]
        born = {id(e[3]) for e in group if e[1] == INS}
        dead = {id(e[3]) for e in group if e[1] == DEL}
        both = born & dead
        dels = [e for e in group if e[1] == DEL and id(e[3]) not in both]
        ins = [e for e in group if e[1] == INS and id(e[3]) not in both]
        dels.sort(key=lambda e: e[2])
        ins.sort(key=lambda e: e[2], reverse=True)
        out.extend(dels)
        out.extend(ins)
        i = j
    return out


class _LevelBuilder:
    """Sweep one level of the persistent tree, updating only its lowest node."""

    def __init__(self, level: int, B: int, store: BlockStore, ids):
        self.level = level
        self.B = B
        self.store = store
        self.ids = ids
        self.alive: list[PNode] = []     # snapshot order, lowest last
        self.nodes: list[PNode] = []
        self.lifted: list = []           # events for the next level
        self.max_alive = 0
        self.alive_io = _SpillStack(store)

    def _new(self, x, y_low, ents, above) -> PNode:
        u = PNode(next(self.ids), self.level, x, y_low)
        u.ents = [[k, a, INF, p] for k, a, _, p in ents]
        u.live = len(u.ents)
        u.up = above
        self.nodes.append(u)
        self.alive.append(u)
        self.alive_io.push(u.nid)
        self.lifted.append((x, INS, y_low, u))
        return u

    def _kill(self, u: PNode, x) -> None:
        u.x_hi = x
        self.store.emit(self.B)       # the node block goes to disk
        self.lifted.append((x, DEL, u.y_low, u))

    def _restructure(self, x) -> None:
        B = self.B
        u = self.alive.pop()
        self.alive_io.pop()
        self._kill(u, x)
        live = [e for e in u.ents if e[2] == INF]
        if len(live) < MERGE_FRAC * B and self.alive:
            v = self.alive.pop()
            self.alive_io.pop()
            self.store.scan(B)        # fetch the sibling
            self._kill(v, x)
            live += [e for e in v.ents if e[2] == INF]
        above = self.alive[-1] if self.alive else None
        if len(live) > SPLIT_FRAC * B:
            h = len(live) // 2
            hi_node = self._new(x, live[h][0], live[h:], above)
            self._new(x, u.y_low, live[:h], hi_node)
        else:
            self._new(x, u.y_low, live, above)

    def run(self, events: list) -> None:
        self.store.scan(len(events))
        for x, op, key, payload in events:
            if op == DEL:
                if not self.alive:
                    raise BuildError("delete on an empty snapshot")
                u = self.alive[-1]
                low = None
                for e in u.ents:
                    if e[2] == INF:
                        low = e
                        break
                if low is None or low[0] != key or low[3] is not payload:
                    raise BuildError(
                        f"level {self.level}: delete of {key} is not at the bottom (x={x})")
                low[2] = x
                u.live -= 1
                # weak underflow: merge with the sibling above
                if u.live < MERGE_FRAC * self.B and len(self.alive) > 1:
                    self._restructure(x)
            else:
                if not self.alive:
                    self._new(x, BOTTOM, [], None)
                u = self.alive[-1]
                ceiling = u.up.y_low if u.up is not None else None
                low = next((e[0] for e in u.ents if e[2] == INF), None)
                if (low is not None and not key < low) or (
                        ceiling is not None and not key < ceiling):
                    raise BuildError(
                        f"level {self.level}: insert of {key} is not at the bottom (x={x})")
                if len(u.ents) >= self.B:
                    self._restructure(x)
                    u = self.alive[-1]
                ent = [key, x, INF, payload]
                pos = 0
                while pos < len(u.ents) and u.ents[pos][0] <= key:
                    pos += 1
                u.ents.insert(pos, ent)
                u.live += 1
            self.max_alive = max(self.max_alive, len(self.alive))
        for u in self.alive:
            self.store.emit(self.B)
        self.store.emit(len(self.lifted))


def _leaf_events(sigma: Sequence[Segment], points_by_id: dict) -> list:
    """Endpoint events of the non-empty segments in sweep order."""
    segs = [s for s in sigma if s.x_lo < s.x_hi]
    starts = sorted(segs, key=lambda s: (s.x_lo, s.y, s.owner))
    ends = [s for s in segs if s.x_hi != INF]      # already in right-end order
    raw = []
    i = j = 0
    while i < len(starts) or j < len(ends):
        if j < len(ends) and (i == len(starts) or ends[j].x_hi <= starts[i].x_lo):
            s = ends[j]
            raw.append((s.x_hi, DEL, (s.y, s.x_lo, s.owner), s))
            j += 1
        else:
            s = starts[i]
            raw.append((s.x_lo, INS, (s.y, s.x_lo, s.owner), s))
            i += 1
    return _order_events(raw)


class StaticTopOpen:
    """Top-open range skyline over a fixed point set."""

    def __init__(self, points: Sequence[Point], block: int = 64,
                 store: BlockStore | None = None):
        if (store.B if store is not None else block) < 4:
            raise ValueError("the persistent tree needs B >= 4")
        self.store = store or BlockStore(block)
        B = self.store.B
        self.points = _check_sorted(list(points))
        self.n = len(self.points)
        self.by_id = {p.id: p for p in self.points}
        if len(self.by_id) != self.n:
            raise ValueError("point ids must be distinct")
        self.sigma = compute_sigma(self.points, self.store)
        self.rmax = RangeMaxTree(self.points, self.store)
        self.levels: list[list[PNode]] = []
        self.sigma_levels: list[list[Segment]] = []
        ids = iter(range(1, 1 << 62))
        events = _leaf_events(self.sigma.segments, self.by_id)
        level = 0
        self.roots: list[PNode] = []
        while events:
            lb = _LevelBuilder(level, B, self.store, ids)
            lb.run(events)
            self.levels.append(lb.nodes)
            nodes = [u for u in lb.nodes if u.x_lo < u.x_hi]
            self.sigma_levels.append(
                [Segment(u.x_lo, u.x_hi, u.y_low, u.nid) for u in nodes])
            if lb.max_alive <= 1:
                self.roots = sorted(nodes, key=lambda u: u.x_lo)
                break
            events = _order_events(lb.lifted)
            level += 1
        self.root_x = [u.x_lo for u in self.roots]
        self._check_links()

    def _check_links(self) -> None:
        # each leaf's upper neighbour must outlive it
        for nodes in self.levels:
            for u in nodes:
                if u.up is not None and u.x_lo < u.x_hi:
                    if not (u.up.x_lo <= u.x_lo and u.x_hi <= u.up.x_hi):
                        raise BuildError(f"sibling link of {u} changes during its life")

    @property
    def height(self) -> int:
        return len(self.levels)

    def blocks(self) -> int:
        """Block census: one per persistent node, plus the range-max tree."""
        st = self.store
        return (sum(len(nodes) for nodes in self.levels)
                + sum(st.cost(len(lv)) for lv in self.rmax.levels))

    def sigma1(self) -> list[Segment]:
        """Bottom edges of the leaf rectangles."""
        return self.sigma_levels[0] if self.sigma_levels else []

    def range_max_y(self, a1, a2):
        if a1 > a2:
            raise ValueError("a1 > a2")
        return self.rmax.query(a1, a2)

    def _root_at(self, x):
        # predecessor search in the version array
        self.store.scan(self.store.B * max(1, math.ceil(
            math.log(max(2, len(self.roots)), max(2, self.store.B)))))
        i = bisect_right(self.root_x, x) - 1
        if i < 0 or not self.roots[i].alive_at(x):
            return None
        return self.roots[i]

    def _descend(self, root: PNode, x, target) -> PNode:
        u = root
        self.store.scan(self.store.B)
        while u.level > 0:
            best = None
            for e in u.ents:
                if e[1] <= x < e[2] and e[0] <= target:
                    best = e
            if best is None:
                raise BuildError(f"no child of {u} covers {target} at x={x}")
            u = best[3]
            self.store.scan(self.store.B)
        return u

    def query(self, a1, a2, beta) -> list[Point]:
        """Skyline of the points in ``[a1, a2] x [beta, inf)``, by increasing x."""
        if a1 > a2:
            raise ValueError("a1 > a2")
        top = self.rmax.query(a1, a2)
        if top < beta:
            return []
        root = self._root_at(a2)
        if root is None:
            return []
        target = (beta, NEG_INF, NEG_INF)
        u = self._descend(root, a2, target)
        out = []
        while u is not None:
            for key, lo, hi, seg in u.ents:
                if not (lo <= a2 < hi) or key < target:
                    continue
                if key[0] > top:
                    u = None
                    break
                out.append(self.by_id[seg.owner])
            else:
                u = u.up
                if u is not None:
                    self.store.scan(self.store.B)
        out.reverse()
        return out

    def snapshot(self, x) -> list[Segment]:
        """Segments stored in the snapshot tree at abscissa ``x``, bottom up."""
        with self.store.uncounted():
            root = self._root_at(x)
            if root is None:
                return []
            u = self._descend(root, x, BOTTOM)
            out = []
            while u is not None:
                out.extend(seg for _, lo, hi, seg in u.ents if lo <= x < hi)
                u = u.up
        return out


def build(points: Sequence[Point], block: int = 64,
          store: BlockStore | None = None) -> StaticTopOpen:
    return StaticTopOpen(points, block, store)


def query(S: StaticTopOpen, a1, a2, beta) -> list[Point]:
    return S.query(a1, a2, beta)


def range_max_y(S: StaticTopOpen, a1, a2):
    return S.range_max_y(a1, a2)
