"""Command line: generate inputs, run queries with I/O counts, benchmark.

Exit codes: 0 success, 1 usage error, 2 verification failure, 3 internal
invariant violation.
"""
from __future__ import annotations

import argparse
import csv
import random
import sys
import time

from . import advgen, bench
from .cpqa import InvariantViolation, LemmaPreconditionError
from .dynamic_topopen import DynTopOpen
from .emblock import BlockStore
from .foursided import FourSided
from .geom import (Point, QueryRect, read_points_csv, read_queries_csv,
                   skyline_scan, write_points_csv, write_queries_csv, xkey)
from .static_topopen import BuildError, StaticTopOpen

EXIT_OK, EXIT_USAGE, EXIT_VERIFY, EXIT_INTERNAL = 0, 1, 2, 3
STRUCTURES = ("static-top", "dyn-top", "4sided")
RESULT_FIELDS = ("qid", "k", "ios", "verified", "error")
BENCH_FIELDS = ("suite", "n", "B", "param", "op", "total_ios", "max_op_ios", "blocks_used")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="emskyline", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="write a points file and optionally a queries file")
    g.add_argument("kind", choices=("uniform", "adversarial"))
    g.add_argument("--n", type=int, default=1000, help="points (uniform)")
    g.add_argument("--omega", type=int, default=4)
    g.add_argument("--lambda", dest="lam", type=int, default=2)
    g.add_argument("--num-queries", type=int, default=0, help="queries (uniform)")
    g.add_argument("--query-kind", default="top-open", choices=("top-open", "4-sided"))
    g.add_argument("--coord-max", type=int, default=0,
                   help="coordinates drawn from [0, coord-max); default 10n")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--points", required=True)
    g.add_argument("--queries")

    q = sub.add_parser("query", help="answer a queries file")
    q.add_argument("--structure", choices=STRUCTURES, default="dyn-top")
    q.add_argument("--block", type=int, default=64)
    q.add_argument("--eps", type=float, default=0.5)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--verify", action="store_true")
    q.add_argument("--points", required=True)
    q.add_argument("--queries", required=True)
    q.add_argument("--csv", help="results file (default stdout)")
    q.add_argument("--answers", help="answers file of qid,x,y rows")

    b = sub.add_parser("bench", help="I/O measurements over a parameter grid")
    b.add_argument("suite", choices=("cpqa", "static", "dynamic", "4sided"))
    b.add_argument("--block", type=int, default=0, help="B (suite default when 0)")
    b.add_argument("--eps", type=float, action="append", help="repeatable")
    b.add_argument("--n", type=int, action="append", help="repeatable")
    b.add_argument("--ops", type=int, default=100_000, help="cpqa operations per cell")
    b.add_argument("--seed", type=int, default=1)
    b.add_argument("--csv", help="output file (default stdout)")
    return p


def _check_config(block: int, eps: float) -> None:
    if block < 4:
        raise UsageError(f"--block must be >= 4, got {block}")
    if not 0 <= eps <= 1:
        raise UsageError(f"--eps must lie in [0, 1], got {eps}")


# -- gen ---------------------------------------------------------------------

def cmd_gen(a) -> int:
    if a.kind == "adversarial":
        try:
            inp = advgen.gen_input(a.omega, a.lam)
        except ValueError as e:
            raise UsageError(str(e)) from None
        pts, rects = advgen.negated(inp)
        write_points_csv(a.points, sorted(pts, key=xkey))
        if a.queries:
            write_queries_csv(a.queries, rects)
        return EXIT_OK
    if a.n < 0 or a.num_queries < 0:
        raise UsageError("--n and --num-queries must be non-negative")
    rng = random.Random(a.seed)
    top = a.coord_max or max(1, 10 * a.n)
    pts = [Point(rng.randrange(top), rng.randrange(top), i) for i in range(a.n)]
    write_points_csv(a.points, pts)
    if a.queries:
        rects = []
        for _ in range(a.num_queries):
            x1 = rng.randrange(top)
            x2 = rng.randint(x1, top)
            y1 = rng.randrange(top)
            if a.query_kind == "top-open":
                rects.append(QueryRect.top_open(x1, x2, y1))
            else:
                rects.append(QueryRect.four_sided(x1, x2, y1, rng.randint(y1, top)))
        write_queries_csv(a.queries, rects)
    return EXIT_OK


# -- query -------------------------------------------------------------------

def _build(structure: str, pts: list[Point], block: int, eps: float, st: BlockStore):
    if structure == "static-top":
        return StaticTopOpen(sorted(pts, key=xkey), block=block, store=st)
    if structure == "dyn-top":
        return DynTopOpen.build_sorted(sorted(pts, key=xkey), B=block, eps=eps, store=st)
    return FourSided.build(pts, B=block, eps=max(eps, 0.05), store=st)


def _answer(structure: str, T, r: QueryRect):
    """Answer, or None when the structure does not support ``r.kind``."""
    if structure == "4sided":
        return T.query(r)
    if r.kind != "top-open":
        return None
    return T.query(r.x_lo, r.x_hi, r.y_lo)


def cmd_query(a) -> int:
    _check_config(a.block, a.eps)
    try:
        pts = read_points_csv(a.points)
        rects = read_queries_csv(a.queries)
    except (OSError, ValueError, IndexError) as e:
        raise UsageError(f"cannot read input: {e}") from None
    st = BlockStore(a.block, memory_budget_blocks=1 << 30)
    T = _build(a.structure, pts, a.block, a.eps, st)
    rows, answers = [], []
    failed = False
    for qid, r in enumerate(rects):
        st.reset_counters()
        got = _answer(a.structure, T, r)
        ios = st.total_ios
        if got is None:
            rows.append((qid, "", "", "", "unsupported-kind"))
            continue
        verified = ""
        if a.verify:
            ok = got == skyline_scan(pts, r)
            verified = "true" if ok else "false"
            failed |= not ok
        rows.append((qid, len(got), ios, verified, ""))
        answers.extend((qid, p.x, p.y) for p in got)
    _write_rows(a.csv, RESULT_FIELDS, rows)
    if a.answers:
        _write_rows(a.answers, ("qid", "x", "y"), answers)
    return EXIT_VERIFY if failed else EXIT_OK


def _write_rows(path, header, rows) -> None:
    fh = open(path, "w", newline="") if path else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    finally:
        if path:
            fh.close()


def read_rows(path) -> list[dict]:
    """Read back any CSV this module writes."""
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


# -- bench -------------------------------------------------------------------

def bench_rows(suite: str, block: int = 0, eps=None, ns=None, ops: int = 100_000,
               seed: int = 1) -> list[tuple]:
    rows = []
    if suite == "cpqa":
        B = block or 128
        n = (ns or [0])[0]
        for b in (4, 8, 16, 32):
            run = bench.cpqa_workload(b, ops, seed=seed, B=B, prefill=n)
            rows.append(("cpqa", n, B, b, "mixed", run.total_ios, run.max_op_ios,
                         run.blocks_used))
        return rows
    if suite == "static":
        B = block or 64
        for n in ns or (1 << 14, 1 << 15, 1 << 16):
            ios, blocks = bench.build_ios("static", n, B, seed=seed)
            rows.append(("static", n, B, "", "build", ios, ios, blocks))
        return rows
    if suite == "dynamic":
        B = block or 64
        for e in eps or (0.0, 0.5, 1.0):
            for n in ns or (1 << 12, 1 << 14):
                ios, blocks = bench.build_ios("dynamic", n, B, e, seed=seed)
                rows.append(("dynamic", n, B, e, "build", ios, ios, blocks))
                costs = bench.dynamic_query_costs(n, B, e, seed)
                total = sum(c for c, _ in costs)
                # worst cost per reported point, over queries reporting any
                per = max((c / k for c, k in costs if k), default=0)
                rows.append(("dynamic", n, B, e, "query", total, max(c for c, _ in costs),
                             blocks))
                rows.append(("dynamic", n, B, e, "query-per-point", total,
                             round(per, 4), blocks))
        return rows
    B = block or 16
    for e in eps or (0.5,):
        for n in ns or (1 << 12, 1 << 13):
            ios, blocks = bench.build_ios("4sided", n, B, e, seed=seed)
            rows.append(("4sided", n, B, e, "build", ios, ios, blocks))
            costs = bench.foursided_query_costs(n, B, e, seed)
            rows.append(("4sided", n, B, e, "query", sum(c for c, _ in costs),
                         max(c for c, _ in costs), blocks))
    return rows


def cmd_bench(a) -> int:
    if a.block:
        _check_config(a.block, 0)
    for e in a.eps or ():
        _check_config(max(a.block, 4), e)
    t = time.time()
    rows = bench_rows(a.suite, a.block, a.eps, a.n, a.ops, a.seed)
    _write_rows(a.csv, BENCH_FIELDS, rows)
    print(f"{a.suite}: {len(rows)} rows in {time.time() - t:.1f}s", file=sys.stderr)
    return EXIT_OK


def main(argv=None) -> int:
    try:
        a = _parser().parse_args(argv)
        return {"gen": cmd_gen, "query": cmd_query, "bench": cmd_bench}[a.cmd](a)
    except UsageError as e:
        print(f"emskyline: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (InvariantViolation, LemmaPreconditionError, BuildError, AssertionError) as e:
        print(f"emskyline: internal invariant violated: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
