"""Workloads shared by the command line and the acceptance tests."""
from __future__ import annotations

import random
from dataclasses import dataclass

from . import cpqa as C
from .dynamic_topopen import DynTopOpen
from .emblock import BlockStore
from .foursided import FourSided
from .geom import Point, QueryRect
from .static_topopen import StaticTopOpen


@dataclass
class CpqaRun:
    total_ios: int = 0
    max_op_ios: int = 0
    worst_audit: float = 0
    ops: int = 0
    blocks_used: int = 0


def cpqa_workload(b: int, n_ops: int, seed: int = 1, B: int = 128, pool_size: int = 8,
                  prefill: int = 0, audit: bool = False) -> CpqaRun:
    """Random InsertAndAttrite / DeleteMin / CatenateAndAttrite stream.

    A pool of queues is driven with 60% inserts, 25% deletions and 15%
    catenations of two pool members.  Every operand has its critical records
    pinned before the operation runs, so only unpinned transfers are counted.
    ``prefill`` elements are spread over the pool first.  With ``audit`` the
    largest ``io + delta potential`` over single operations is recorded too.
    """
    rng = random.Random(seed)
    st = BlockStore(B, memory_budget_blocks=1 << 30)
    per = prefill // pool_size
    with st.uncounted():
        pool = [C.Cpqa.from_sorted([(k - per, -1 - p * per - k) for k in range(per)], b, st)
                for p in range(pool_size)]
    run = CpqaRun()
    key = uid = 0
    for _ in range(n_ops):
        r = rng.random()
        i = rng.randrange(pool_size)
        q = pool[i]
        j = -1
        if r < 0.6:
            key += rng.randint(-3, 10)
            uid += 1
            ins = [q]
        elif r < 0.85:
            if not q.total:
                continue
            ins = [q]
        else:
            j = rng.randrange(pool_size)
            if i == j:
                continue
            ins = [q, pool[j]]
        phi0 = C.total_potential(ins) if audit else 0
        for x in ins:
            C.pin_critical(x)
        before = st.total_ios
        if r < 0.6:
            out = C.insert_and_attrite(q, (key, uid))
        elif r < 0.85:
            out = C.delete_min(q)[1]
        else:
            out = C.catenate_and_attrite(q, pool[j])
        io = st.total_ios - before
        for x in ins:
            C.unpin_critical(x)
        run.ops += 1
        run.total_ios += io
        run.max_op_ios = max(run.max_op_ios, io)
        if audit:
            run.worst_audit = max(run.worst_audit, io + C.total_potential([out]) - phi0)
        pool[i] = out
        if j >= 0:
            pool[j] = C.Cpqa.empty(b, st)
    run.blocks_used = sum(C.blocks_used(q) for q in pool)
    return run


def sorted_points(n: int, seed: int, kind: str = "uniform") -> list[Point]:
    """``n`` points with distinct x, sorted by x.

    ``anti`` places them near a descending diagonal so skylines are long.
    """
    rng = random.Random(seed)
    xs = sorted(rng.sample(range(10 * n), n)) if n else []
    if kind == "anti":
        return [Point(x, 10 * n - x + rng.randint(-n // 8, n // 8), i)
                for i, x in enumerate(xs)]
    return [Point(x, rng.randrange(10 * n), i) for i, x in enumerate(xs)]


def build_ios(structure: str, n: int, B: int = 64, eps: float = 0.5,
              seed: int = 0) -> tuple[int, int]:
    """I/Os and blocks used to build over ``n`` sorted points."""
    pts = sorted_points(n, seed)
    st = BlockStore(B, memory_budget_blocks=1 << 30)
    if structure == "static":
        T = StaticTopOpen(pts, block=B, store=st)
        blocks = T.blocks()
    elif structure == "dynamic":
        T = DynTopOpen.build_sorted(pts, B=B, eps=eps, store=st)
        blocks = T.blocks()
    elif structure == "4sided":
        T = FourSided.build(pts, B=B, eps=eps, store=st)
        blocks = T.blocks()
    else:
        raise ValueError(f"unknown structure {structure!r}")
    return st.total_ios, blocks


def topopen_queries(n: int, count: int, rng: random.Random) -> list[tuple[int, int, int]]:
    out = []
    for _ in range(count):
        a1 = rng.randrange(10 * n)
        a2 = rng.randint(a1, 10 * n)
        out.append((a1, a2, rng.randrange(-n, 10 * n)))
    return out


def dynamic_query_costs(n: int, B: int, eps: float, seed: int,
                        count: int = 200) -> list[tuple[int, int]]:
    """``(ios, k)`` for random top-open queries on anti-correlated points."""
    rng = random.Random(seed)
    pts = sorted_points(n, seed, "anti")
    st = BlockStore(B, memory_budget_blocks=1 << 30)
    T = DynTopOpen.build_sorted(pts, B=B, eps=eps, store=st)
    out = []
    for a1, a2, beta in topopen_queries(n, count, rng):
        st.reset_counters()
        k = len(T.query(a1, a2, beta))
        out.append((st.total_ios, k))
    return out


def foursided_query_costs(n: int, B: int, eps: float, seed: int,
                          count: int = 100) -> list[tuple[int, int]]:
    rng = random.Random(seed)
    pts = sorted_points(n, seed)
    st = BlockStore(B, memory_budget_blocks=1 << 30)
    T = FourSided.build(pts, B=B, eps=eps, store=st)
    out = []
    for _ in range(count):
        x1 = rng.randrange(10 * n)
        x2 = rng.randint(x1, 10 * n)
        y1 = rng.randrange(10 * n)
        y2 = rng.randint(y1, 10 * n)
        st.reset_counters()
        k = len(T.query(QueryRect.four_sided(x1, x2, y1, y2)))
        out.append((st.total_ios, k))
    return out
