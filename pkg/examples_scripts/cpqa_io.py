"""Amortized I/O of the catenable priority queue with attrition.

A larger buffer parameter b spreads each block transfer over more
operations, so total I/Os shrink roughly like 1/b.
Run: python3 examples_scripts/cpqa_io.py
"""
from emskyline import cpqa as C
from emskyline.bench import cpqa_workload
from emskyline.emblock import BlockStore

# Semantics first: inserting e removes every element >= e.
st = BlockStore(8, memory_budget_blocks=1 << 10)
q = C.Cpqa.empty(2, st)
for e in [(5, 0), (9, 1), (7, 2), (8, 3)]:
    q = C.insert_and_attrite(q, e)
print("after inserting 5, 9, 7, 8:", [k for k, _ in C.drain(q)])

r = C.Cpqa.empty(2, st)
for e in [(6, 4), (10, 5)]:
    r = C.insert_and_attrite(r, e)
print("catenated with [6, 10]:   ", [k for k, _ in C.drain(C.catenate_and_attrite(q, r))])

print("\nb    total I/Os over 20000 ops   worst single op")
for b in (1, 2, 8, 32):
    run = cpqa_workload(b, 20_000)
    print(f"{b:<4} {run.total_ios:>12}               {run.max_op_ios}")
