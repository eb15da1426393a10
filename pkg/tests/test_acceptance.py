"""Acceptance criteria 1 to 10, one test each.

Every test records a PASS/FAIL line that pytest prints in an
"acceptance criteria" section at the end of the run.
"""
import math
import random
import time

import numpy as np
import pytest

from emskyline import advgen as A
from emskyline import bench
from emskyline import cpqa as C
from emskyline import static_topopen as S
from emskyline.dynamic_topopen import DynTopOpen
from emskyline.emblock import BlockStore
from emskyline.foursided import FourSided
from emskyline.geom import Oracle, Point, QueryRect, skyline_oracle, xkey

pytestmark = pytest.mark.acceptance


def mixed_points(rng, n):
    """Uniform, anti-correlated or heavily tied coordinates."""
    kind = rng.choice(["uniform", "anti", "ties"])
    if kind == "anti":
        pts = [Point(3 * i + rng.randint(0, 5), 10 * n - 10 * i + rng.randint(-40, 40), i)
               for i in range(n)]
    else:
        top = 10 * n + 1 if kind == "uniform" else max(4, int(math.sqrt(n)))
        pts = [Point(rng.randrange(top), rng.randrange(top), i) for i in range(n)]
    return sorted(pts, key=xkey)


def test_c1_static_oracle_equivalence(criterion):
    rng = random.Random(101)
    t = time.time()
    bad = 0
    for d in range(50):
        n = rng.randint(1, 4096)
        B = (8, 16, 64)[d % 3]
        pts = mixed_points(rng, n)
        T = S.StaticTopOpen(pts, block=B)
        oracle = Oracle(pts)
        hi = max(p.x for p in pts) + 2
        top = max(p.y for p in pts) + 2
        for _ in range(500):
            a1 = rng.randrange(-2, hi)
            a2 = rng.randint(a1, hi)
            b = rng.randrange(-2, top)
            if T.query(a1, a2, b) != oracle(QueryRect.top_open(a1, a2, b)):
                bad += 1
    took = time.time() - t
    assert criterion(1, bad == 0 and took < 120,
                     f"{bad} mismatches over 50x500 queries, {took:.0f}s (limit 120s)")


def test_c2_dynamic_oracle_equivalence(criterion):
    t = time.time()
    bad = 0
    broken = []
    for run in range(20):
        rng = random.Random(200 + run)
        eps = (0, 0.5, 1)[run % 3]
        B = (4, 8, 16)[run % 3]
        n = rng.randint(200, 800)
        R = 20 * n
        pts = sorted({Point(rng.randrange(R), rng.randrange(R), i) for i in range(n)}, key=xkey)
        T = DynTopOpen.build_sorted(pts, B=B, eps=eps)
        live = set(pts)
        nid = n
        for _ in range(10_000):
            r = rng.random()
            if r < 0.35:
                p = Point(rng.randrange(R), rng.randrange(R), nid)
                nid += 1
                T.insert(p)
                live.add(p)
            elif r < 0.65 and live:
                p = rng.choice(tuple(live))
                T.delete(p)
                live.remove(p)
            else:
                a1 = rng.randrange(R)
                a2 = rng.randint(a1, R)
                b = rng.randrange(R)
                if T.query(a1, a2, b) != skyline_oracle(live, QueryRect.top_open(a1, a2, b)):
                    bad += 1
        nodes = T.nodes()
        for u in rng.sample(nodes, min(50, len(nodes))):
            msg = T.check_node(u)
            if msg:
                broken.append(msg)
    took = time.time() - t
    assert criterion(2, bad == 0 and not broken and took < 180,
                     f"{bad} mismatches, {len(broken)} invariant failures over 20 runs, "
                     f"{took:.0f}s (limit 180s)")


def test_c3_foursided_oracle_equivalence(criterion):
    rng = random.Random(303)
    n = 10_000
    pts = [Point(rng.randrange(10 * n), rng.randrange(10 * n), i) for i in range(n)]
    T = FourSided.build(pts, B=16, eps=0.5)
    oracle = Oracle(pts)
    bad = 0
    for _ in range(1000):
        x1 = rng.randrange(10 * n)
        y1 = rng.randrange(10 * n)
        q = QueryRect.four_sided(x1, rng.randint(x1, 10 * n), y1, rng.randint(y1, 10 * n))
        bad += T.query(q) != oracle(q)
    instances = adv_bad = 0
    for omega in range(2, 9):
        for lam in range(1, 6):
            try:
                inp = A.gen_input(omega, lam)
            except A.SizeCapExceeded:
                continue
            instances += 1
            # answers are checked against the brute-force minimal points
            pts2, rects = A.negated(inp)
            F = FourSided.build(pts2, B=16, eps=0.5)
            for q, r in zip(inp.queries, rects):
                got = F.query(r)
                adv_bad += [-p.x for p in reversed(got)] != A.minimal_points(inp.ys, q.x_min, q.y_min)
    assert criterion(3, bad == 0 and adv_bad == 0,
                     f"{bad} mismatches on 1000 random queries, {adv_bad} on "
                     f"{instances} adversarial instances")


def model_cat(a, b):
    return [x for x in a if x < b[0]] + b if b else list(a)


def test_c4_cpqa_model_equivalence(criterion):
    bad = []
    for b in (1, 2, 4, 8):
        rng = random.Random(400 + b)
        st = BlockStore(16, memory_budget_blocks=1 << 30)
        pool = [(C.Cpqa.empty(b, st), [])]
        uid = base = 0
        for step in range(100_000):
            r = rng.random()
            q, m = pool[rng.randrange(len(pool))]
            if r < 0.5:
                uid += 1
                base += 1
                # drifting keys keep queues a few hundred long
                e = (base + rng.randint(-40, 10), uid)
                new = (C.insert_and_attrite(q, e), model_cat(m, [e]))
            elif r < 0.75:
                if not m:
                    continue
                e, q2 = C.delete_min(q)
                if e != m[0]:
                    bad.append((b, step, "delete_min"))
                new = (q2, m[1:])
            else:
                q2, m2 = pool[rng.randrange(len(pool))]
                new = (C.catenate_and_attrite(q, q2), model_cat(m, m2))
            # old versions stay in the pool and keep being used
            if len(pool) < 32:
                pool.append(new)
            else:
                pool[rng.randrange(len(pool))] = new
            if step % 5000 == 0 and C.drain(new[0]) != new[1]:
                bad.append((b, step, "drain"))
        bad.extend((b, "end", "drain") for q, m in pool if C.drain(q) != m)
    assert criterion(4, not bad, f"{len(bad)} divergent drains over 4x10^5 operations")


def test_c5_cpqa_amortized_io(criterion):
    t8 = bench.cpqa_workload(8, 100_000).total_ios
    t32 = bench.cpqa_workload(32, 100_000).total_ios
    ok_t = t32 <= 0.5 * t8 + 200
    maxes = {}
    for b in (8, 32):
        for n in (1000, 100_000):
            # worst single operation, pooled over three seeds
            maxes[b, n] = max(bench.cpqa_workload(b, 100_000, seed=s, prefill=n).max_op_ios
                              for s in range(3))
    ok_m = all(maxes[b, 1000] == maxes[b, 100_000] for b in (8, 32))
    assert criterion(5, ok_t and ok_m,
                     f"T(32)={t32} vs 0.5*T(8)+200={0.5 * t8 + 200:.0f}; max op "
                     f"b=8: {maxes[8, 1000]}/{maxes[8, 100_000]}, "
                     f"b=32: {maxes[32, 1000]}/{maxes[32, 100_000]} (n=10^3/10^5)")


def test_c6_build_linearity(criterion):
    ratios = {}
    for name, eps in (("static", 0.5), ("dynamic", 0.0), ("dynamic", 0.5), ("dynamic", 1.0)):
        ios = [bench.build_ios(name, 1 << e, 64, eps)[0] for e in (14, 15, 16)]
        ratios[name if name == "static" else f"dynamic eps={eps}"] = [
            ios[1] / ios[0], ios[2] / ios[1]]
    ok = all(1.6 <= r <= 2.4 for rs in ratios.values() for r in rs)
    detail = "; ".join(f"{k}: {rs[0]:.2f}, {rs[1]:.2f}" for k, rs in ratios.items())
    assert criterion(6, ok, f"doubling ratios {detail}")


def test_c7_query_cost_scaling(criterion):
    # B=8: with B=64 and eps=0 the n=2^12 tree is too shallow to show the
    # per-level constant (see the decisions ledger)
    B = 8
    details = []
    ok = True
    for eps in (0.0, 0.5, 1.0):
        L = lambda n: math.log(n / B, 2 * B ** eps)
        per = B ** (1 - eps)
        small = bench.dynamic_query_costs(1 << 12, B, eps, seed=1)
        ys = np.array([io for io, _ in small], float)
        ks = np.array([k / per for _, k in small], float)
        A_ = np.vstack([ks, np.ones_like(ks)]).T
        c2 = max(float(np.linalg.lstsq(A_, ys, rcond=None)[0][0]), 0.0)
        # the log term is constant at one n, so the intercept envelope is c1 * L
        c1 = float(max(ys - c2 * ks)) / L(1 << 12)
        c3 = 0.0
        large = bench.dynamic_query_costs(1 << 18, B, eps, seed=2)
        worst = max(io / (c1 * L(1 << 18) + c2 * k / per + c3) for io, k in large)
        ok &= worst <= 2
        details.append(f"eps={eps}: c1={c1:.2f} c2={c2:.2f} worst ratio {worst:.2f}")
    assert criterion(7, ok, "; ".join(details) + " (limit 2)")


def test_c8_adversarial_integrity(criterion):
    problems = []
    count = 0
    for omega in range(2, 9):
        for lam in range(1, 6):
            try:
                inp = A.gen_input(omega, lam)
            except A.SizeCapExceeded:
                continue
            count += 1
            if len(inp.queries) != lam * omega ** (lam - 1):
                problems.append((omega, lam, "count"))
            rep = A.check_favorable(inp)
            if not rep:
                problems.append((omega, lam, rep.message))
    eight = len(A.gen_input(4, 2).queries) == 8
    assert criterion(8, not problems and eight,
                     f"{count} instances, {len(problems)} violations, (4,2) gives "
                     f"{len(A.gen_input(4, 2).queries)} queries")


def test_c9_sigma_properties(criterion):
    rng = random.Random(909)
    bad = 0
    for d in range(100):
        pts = mixed_points(rng, rng.randint(1, 2000))
        T = S.StaticTopOpen(pts, block=rng.choice([4, 8, 16]))
        bad += not S.verify_sigma_properties(S.compute_sigma(pts))
        bad += not S.verify_sigma_properties(T.sigma1())
    assert criterion(9, bad == 0, f"{bad} failures over 100 datasets (sigma and sigma_1)")


def test_c10_potential_audit(criterion):
    worst = {b: bench.cpqa_workload(b, 10_000, seed=10, audit=True).worst_audit
             for b in (1, 2, 8, 32)}
    top = max(worst.values())
    assert criterion(10, top <= 12,
                     "worst io + dPhi per op: "
                     + ", ".join(f"b={b}: {float(w):.2f}" for b, w in worst.items())
                     + " (budget 12)")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
