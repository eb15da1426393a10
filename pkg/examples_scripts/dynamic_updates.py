"""Inserting and deleting points in the dynamic top-open structure.

The answer is checked against the pairwise oracle after every batch.
Run: python3 examples_scripts/dynamic_updates.py
"""
import random

from emskyline.dynamic_topopen import DynTopOpen
from emskyline.emblock import BlockStore
from emskyline.geom import Point, QueryRect, skyline_oracle, xkey

rng = random.Random(3)
R, B = 20000, 16
live = sorted({Point(rng.randrange(R), rng.randrange(R), i) for i in range(1000)}, key=xkey)
store = BlockStore(B, memory_budget_blocks=1 << 20)
T = DynTopOpen.build_sorted(live, B=B, eps=0.5, store=store)
live = set(live)
nid = len(live)

q = QueryRect.top_open(2000, 15000, 5000)
for batch in range(5):
    store.reset_counters()
    for _ in range(200):
        if rng.random() < 0.5:
            p = Point(rng.randrange(R), rng.randrange(R), nid)
            nid += 1
            T.insert(p)
            live.add(p)
        else:
            p = rng.choice(tuple(live))
            T.delete(p)
            live.remove(p)
    upd = store.total_ios
    store.reset_counters()
    ans = T.query(q.x_lo, q.x_hi, q.y_lo)
    assert ans == skyline_oracle(live, q)
    print(f"batch {batch}: n={len(live)}  update I/Os per op={upd / 200:.1f}  "
          f"query k={len(ans)} ios={store.total_ios}")
