"""Four-sided queries on an adversarial low-discrepancy input.

The generator builds omega^lambda points whose queries each return exactly
omega points and overlap pairwise in at most one. The script checks this,
then answers every query with the four-sided structure.
Run: python3 examples_scripts/foursided_adversarial.py
"""
from emskyline import advgen as A
from emskyline.emblock import BlockStore
from emskyline.foursided import FourSided

inp = A.gen_input(4, 3)
print(f"omega=4 lambda=3: {inp.n} points, {len(inp.queries)} queries")
print("favorable:", A.check_favorable(inp).message or "yes")

pts, rects = A.negated(inp)
store = BlockStore(16, memory_budget_blocks=1 << 20)
T = FourSided.build(pts, B=16, eps=0.5, store=store)
print(f"built: {store.total_ios} I/Os, height {T.height}")

total = 0
for q, r in zip(inp.queries, rects):
    store.reset_counters()
    got = sorted(-p.x for p in T.query(r))
    assert got == list(q.expected)
    total += store.total_ios
print(f"all answers match; {total / len(rects):.1f} I/Os per query on average")
print("first query answer (x values):", list(inp.queries[0].expected))
