"""Low-discrepancy adversarial inputs for quadrant skyline queries.

Point ``i`` sits at ``(i, rho(i))`` where ``rho`` reverses the base-omega
digits of ``i`` and complements each one.  Queries are upper-right quadrants
whose minimal points are exactly ``omega`` input points, and two distinct
queries share at most one of them.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .geom import INF, Point, QueryRect

DEFAULT_SIZE_CAP = 1 << 16


class SizeCapExceeded(ValueError):
    pass


def size_cap() -> int:
    """Largest allowed ``omega ** lambda``; ``EM_SKYLINE_SIZE_CAP`` overrides."""
    raw = os.environ.get("EM_SKYLINE_SIZE_CAP")
    return int(raw) if raw else DEFAULT_SIZE_CAP


def _check_params(omega: int, lam: int) -> None:
    if omega < 2:
        raise ValueError(f"omega must be >= 2, got {omega}")
    if lam < 1:
        raise ValueError(f"lambda must be >= 1, got {lam}")


def rho(i: int, omega: int, lam: int) -> int:
    _check_params(omega, lam)
    n = omega ** lam
    if not 0 <= i < n:
        raise ValueError(f"i={i} outside [0, {n})")
    out = 0
    for _ in range(lam):
        i, d = divmod(i, omega)
        out = out * omega + (omega - 1 - d)
    return out


def rho_all(omega: int, lam: int) -> np.ndarray:
    """``rho`` over the whole range, vectorised."""
    _check_params(omega, lam)
    i = np.arange(omega ** lam, dtype=np.int64)
    out = np.zeros_like(i)
    for _ in range(lam):
        i, d = np.divmod(i, omega)
        out = out * omega + (omega - 1 - d)
    return out


@dataclass(frozen=True)
class AdvQuery:
    x_min: int
    y_min: int
    depth: int
    expected: tuple[int, ...]  # x coordinates of the answer, increasing

    def as_dominance(self) -> QueryRect:
        return QueryRect(self.x_min, INF, self.y_min, INF, "dominance")


@dataclass
class AdvInput:
    omega: int
    lam: int
    ys: np.ndarray
    queries: list[AdvQuery] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.ys)

    @property
    def points(self) -> list[Point]:
        return [Point(i, int(y), i) for i, y in enumerate(self.ys)]


def gen_input(omega: int, lam: int, cap: int | None = None) -> AdvInput:
    _check_params(omega, lam)
    cap = size_cap() if cap is None else cap
    n = omega ** lam
    if n > cap:
        raise SizeCapExceeded(f"omega^lambda = {n} exceeds the size cap {cap}")
    ys = rho_all(omega, lam)
    # rho is an involution, so the x of the point at height y is rho(y)
    x_of = ys
    queries = []
    for d in range(lam):
        width = omega ** (lam - d)      # points below a trie node at depth d
        stride = width // omega
        for base in range(0, n, width):
            for j in range(stride):
                group = base + j + stride * np.arange(omega)
                xs = np.sort(x_of[group])
                queries.append(AdvQuery(int(xs[0]), int(group[0]), d,
                                        tuple(int(x) for x in xs)))
    return AdvInput(omega, lam, ys, queries)


def minimal_points(ys: np.ndarray, x_min: int, y_min: int) -> list[int]:
    """x coordinates of the minimal points in the quadrant, by brute force."""
    tail = ys[x_min:]
    xs = np.nonzero(tail >= y_min)[0]
    if not len(xs):
        return []
    vals = tail[xs]
    # a point is minimal iff it is lower than everything to its left
    prev = np.minimum.accumulate(vals)
    keep = np.ones(len(vals), dtype=bool)
    keep[1:] = vals[1:] < prev[:-1]
    return [int(x) + x_min for x in xs[keep]]


@dataclass
class FavorableReport:
    ok: bool
    queries: int
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok


def check_favorable(inp: AdvInput) -> FavorableReport:
    """Recompute every answer and check sizes and pairwise overlaps."""
    om = inp.omega
    m = len(inp.queries)
    want = inp.lam * inp.n // om
    if m != want:
        return FavorableReport(False, m, f"{m} queries, expected {want}")
    seen: dict[tuple[int, int], int] = {}
    for qi, q in enumerate(inp.queries):
        got = minimal_points(inp.ys, q.x_min, q.y_min)
        if tuple(got) != q.expected:
            return FavorableReport(False, m, f"query {qi}: answer {got} != {list(q.expected)}")
        if len(got) != om:
            return FavorableReport(False, m, f"query {qi}: {len(got)} points, expected {om}")
        # two answers sharing two points would share a pair
        for a in range(om):
            for b in range(a + 1, om):
                key = (got[a], got[b])
                if key in seen:
                    return FavorableReport(
                        False, m, f"queries {seen[key]} and {qi} share points {key}")
                seen[key] = qi
    return FavorableReport(True, m)


def negated(inp: AdvInput) -> tuple[list[Point], list[QueryRect]]:
    """The instance as plain skyline (maxima) queries with finite sides.

    Negating both coordinates turns minimal points into maximal ones; the
    open sides are closed at the edge of the data range.
    """
    lo = -inp.n
    pts = [Point(-p.x, -p.y, p.id) for p in inp.points]
    rects = [QueryRect(lo, -q.x_min, lo, -q.y_min, "4-sided") for q in inp.queries]
    return pts, rects
