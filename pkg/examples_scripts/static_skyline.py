"""Top-open skyline queries on the static structure, with I/O counts.

Run: python3 examples_scripts/static_skyline.py
"""
import random

from emskyline.emblock import BlockStore
from emskyline.geom import Point, QueryRect, skyline_oracle, xkey
from emskyline.static_topopen import StaticTopOpen

rng = random.Random(7)
n, B = 5000, 32
pts = sorted((Point(rng.randrange(10 * n), rng.randrange(10 * n), i) for i in range(n)), key=xkey)

store = BlockStore(B, memory_budget_blocks=1 << 20)
T = StaticTopOpen(pts, block=B, store=store)
print(f"built over {n} points: {store.total_ios} I/Os, {T.blocks()} blocks")

# A query [a1, a2] x [beta, inf) reports the maxima inside the slab.
for a1, a2, beta in [(0, 10 * n, 0), (1000, 20000, 25000), (30000, 31000, 0)]:
    store.reset_counters()
    ans = T.query(a1, a2, beta)
    assert ans == skyline_oracle(pts, QueryRect.top_open(a1, a2, beta))
    print(f"  [{a1}, {a2}] x [{beta}, inf): k={len(ans):3d}  ios={store.total_ios}")
    print("    staircase:", [(p.x, p.y) for p in ans[:6]], "..." if len(ans) > 6 else "")
