"""Planar points, query rectangles, skyline oracles and point-set transforms."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

import numpy as np

INF = math.inf

KINDS = ("4-sided", "top-open", "right-open", "bottom-open", "left-open",
         "dominance", "anti-dominance", "contour")


class Point(NamedTuple):
    x: int
    y: int
    id: int = 0

    # Ties are broken so that keyed dominance agrees with raw dominance:
    # sharing an x, the higher point sorts right; sharing a y, the point
    # further right sorts higher; exact duplicates fall back to the id.
    @property
    def xkey(self) -> tuple:
        return (self.x, self.y, self.id)

    @property
    def ykey(self) -> tuple:
        return (self.y, self.x, self.id)


def xkey(p: Point) -> tuple:
    return (p.x, p.y, p.id)


def ykey(p: Point) -> tuple:
    return (p.y, p.x, p.id)


def dominates(p: Point, q: Point) -> bool:
    """True iff ``p`` dominates ``q`` (>= in both coordinates)."""
    if p.x == q.x and p.y == q.y:
        if p.id == q.id:
            raise ValueError(f"dominance undefined for equal points {p!r}")
        # coincident points: the id decides, as in the keyed order
        return p.id > q.id
    return p.x >= q.x and p.y >= q.y


@dataclass(frozen=True)
class QueryRect:
    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float
    kind: str = "4-sided"

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown query kind {self.kind!r}")
        if self.x_lo > self.x_hi or self.y_lo > self.y_hi:
            raise ValueError(f"empty rectangle {self}")
        expected = _infinite_sides(self.kind)
        actual = (self.x_lo == -INF, self.x_hi == INF,
                  self.y_lo == -INF, self.y_hi == INF)
        if expected != actual:
            raise ValueError(f"sides of {self} do not match kind {self.kind!r}")

    def contains(self, p: Point) -> bool:
        return self.x_lo <= p.x <= self.x_hi and self.y_lo <= p.y <= self.y_hi

    # constructors for the common shapes
    @classmethod
    def four_sided(cls, x_lo, x_hi, y_lo, y_hi) -> "QueryRect":
        return cls(x_lo, x_hi, y_lo, y_hi, "4-sided")

    @classmethod
    def top_open(cls, x_lo, x_hi, y_lo) -> "QueryRect":
        return cls(x_lo, x_hi, y_lo, INF, "top-open")

    @classmethod
    def right_open(cls, x_lo, y_lo, y_hi) -> "QueryRect":
        return cls(x_lo, INF, y_lo, y_hi, "right-open")


def _infinite_sides(kind: str) -> tuple[bool, bool, bool, bool]:
    # (left, right, bottom, top) unbounded
    return {
        "4-sided": (False, False, False, False),
        "top-open": (False, False, False, True),
        "right-open": (False, True, False, False),
        "bottom-open": (False, False, True, False),
        "left-open": (True, False, False, False),
        "dominance": (False, True, False, True),
        "anti-dominance": (True, False, True, False),
        "contour": (True, False, True, True),
    }[kind]


def rect(x_lo=-INF, x_hi=INF, y_lo=-INF, y_hi=INF) -> QueryRect:
    """Build a rectangle and infer its kind from the unbounded sides.

    Shapes with no named kind (the full plane, say) come back as a plain
    rectangle usable only by the oracles.
    """
    sides = (x_lo == -INF, x_hi == INF, y_lo == -INF, y_hi == INF)
    for kind in KINDS:
        if _infinite_sides(kind) == sides:
            return QueryRect(x_lo, x_hi, y_lo, y_hi, kind)
    return _FreeRect(x_lo, x_hi, y_lo, y_hi)


@dataclass(frozen=True)
class _FreeRect:
    """Rectangle of no named kind; accepted by the oracles only."""
    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float
    kind: str = "free"

    def contains(self, p: Point) -> bool:
        return self.x_lo <= p.x <= self.x_hi and self.y_lo <= p.y <= self.y_hi


PLANE = _FreeRect(-INF, INF, -INF, INF)


def skyline_oracle(points: Iterable[Point], q=PLANE) -> list[Point]:
    """Maxima of ``points`` inside ``q`` by pairwise dominance tests.

    Every pair inside ``q`` is compared, so the cost is quadratic; large
    inputs go through the same test vectorised over rows of the pair matrix.
    The answer is sorted by increasing x.
    """
    inside = [p for p in points if q.contains(p)]
    if len(inside) > 64:
        out = _pairwise_np(inside)
    else:
        out = [p for p in inside
               if not any(o is not p and o != p and dominates(o, p) for o in inside)]
    out.sort(key=xkey)
    return out


def _pairwise_np(inside: list[Point], rows: int = 512) -> list[Point]:
    a = np.array([(p.x, p.y, p.id) for p in inside], dtype=np.int64)
    return [inside[j] for j in _unbeaten(a, rows)]


def _unbeaten(a: np.ndarray, rows: int = 512) -> list[int]:
    """Row indices of ``a`` (columns x, y, id) that no other row dominates.

    Dominance is transitive, so a beaten row is beaten by some maximal one.
    Rows are therefore tested only against the rows maximal within their
    own chunk, a superset of the maxima.
    """
    if len(a) > rows:
        cand = np.concatenate([s + np.array(_unbeaten(a[s:s + rows], rows), dtype=np.int64)
                               for s in range(0, len(a), rows)])
    else:
        cand = np.arange(len(a))
    x, y, i = a[cand, 0], a[cand, 1], a[cand, 2]
    out = []
    for s in range(0, len(a), rows):
        px, py, pi = a[s:s + rows, 0, None], a[s:s + rows, 1, None], a[s:s + rows, 2, None]
        same = (x == px) & (y == py)
        dom = ((x >= px) & (y >= py) & ~same) | (same & (i > pi))
        out.extend(s + int(j) for j in np.flatnonzero(~dom.any(axis=1)))
    return out


class Oracle:
    """Pairwise oracle over a fixed point set, for many queries.

    Same answers as :func:`skyline_oracle`; the points are converted to
    arrays once and the containment filter is vectorised.
    """

    def __init__(self, points: Iterable[Point]):
        self.points = list(points)
        self.a = np.array([(p.x, p.y, p.id) for p in self.points],
                          dtype=np.int64).reshape(-1, 3)

    def __call__(self, q=PLANE) -> list[Point]:
        x, y = self.a[:, 0], self.a[:, 1]
        idx = np.flatnonzero((x >= q.x_lo) & (x <= q.x_hi) & (y >= q.y_lo) & (y <= q.y_hi))
        out = [self.points[idx[j]] for j in _unbeaten(self.a[idx])]
        out.sort(key=xkey)
        return out


def skyline_scan(points: Iterable[Point], q=PLANE) -> list[Point]:
    """Maxima of ``points`` inside ``q`` by a right-to-left sweep.

    Same answer as :func:`skyline_oracle` in O(m log m) time; used where the
    quadratic oracle would be too slow.
    """
    inside = sorted((p for p in points if q.contains(p)), key=xkey, reverse=True)
    out = []
    best = None
    for p in inside:
        k = ykey(p)
        if best is None or k > best:
            out.append(p)
            best = k
    out.reverse()
    return out


def is_staircase(answer: Sequence[Point]) -> bool:
    """Strictly increasing x and strictly decreasing y under the keyed order."""
    return all(xkey(a) < xkey(b) and ykey(a) > ykey(b)
               for a, b in zip(answer, answer[1:]))


def mirror_y(points: Iterable[Point]) -> list[Point]:
    return [Point(p.x, -p.y, p.id) for p in points]


def swap_axes(points: Iterable[Point]) -> list[Point]:
    return [Point(p.y, p.x, p.id) for p in points]


def general_position(points: Iterable[Point]) -> bool:
    pts = list(points)
    return (len({p.x for p in pts}) == len(pts)
            and len({p.y for p in pts}) == len(pts))


def with_ids(coords: Iterable[tuple[int, int]]) -> list[Point]:
    return [Point(int(x), int(y), i) for i, (x, y) in enumerate(coords)]


# -- CSV formats ------------------------------------------------------------

def _fmt(v: float) -> str:
    if v == INF:
        return "inf"
    if v == -INF:
        return "-inf"
    return str(int(v))


def _parse(s: str) -> float:
    s = s.strip()
    if s in ("inf", "+inf"):
        return INF
    if s == "-inf":
        return -INF
    return int(s)


def write_points_csv(path, points: Iterable[Point]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for p in points:
            w.writerow([p.x, p.y])


def read_points_csv(path) -> list[Point]:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and r[0].strip()]
    return [Point(int(r[0]), int(r[1]), i) for i, r in enumerate(rows)]


def write_queries_csv(path, queries: Iterable[QueryRect]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for q in queries:
            w.writerow([q.kind, _fmt(q.x_lo), _fmt(q.x_hi), _fmt(q.y_lo), _fmt(q.y_hi)])


def read_queries_csv(path) -> list[QueryRect]:
    out = []
    with open(path, newline="") as fh:
        for r in csv.reader(fh):
            if not r or not r[0].strip():
                continue
            out.append(QueryRect(_parse(r[1]), _parse(r[2]), _parse(r[3]),
                                 _parse(r[4]), r[0].strip()))
    return out
