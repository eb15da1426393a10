"""I/O-efficient catenable priority queues with attrition (CPQA).

A queue holds a first buffer ``F``, a clean deque ``C``, a buffer deque ``B``,
a sequence of dirty deques ``D`` and a last buffer ``L``.  Deques hold
records; a record is a sorted buffer of ``[b, 4b]`` elements plus an optional
pointer to a child queue whose elements all follow the buffer.  The logical
content of a queue is its queue order (``F, C, B, D_1..D_k, L``, records
expanded depth-first) under attrition: an element survives iff it is smaller
than every element after it.

Queues are immutable values.  Every operation returns a new version that
shares unchanged records and deque spines with its inputs, so older versions
stay valid (the dynamic skyline structure relies on this).

I/O accounting goes through the queue's :class:`~emskyline.emblock.BlockStore`:
touching a record's buffer costs ``ceil(|buffer| / B)`` reads unless the record
is pinned or was created in the current operation; creating a record costs
the matching writes.  ``F`` and ``L`` belong to the queue header, which lives
in memory with the root.  Minimum keys of deques are kept in the deque spines
and read for free.
"""
from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import pseq
from .emblock import BlockStore
from .pseq import (concat, first, last, pop_back, pop_front, push_back,
                   push_front, replace_back, replace_front, single, split)


class EmptyQueueError(IndexError):
    pass


class QueueMismatchError(ValueError):
    pass


class LemmaPreconditionError(ValueError):
    pass


class InvariantViolation(AssertionError):
    pass


class _Top:
    """Sentinel greater than every element."""
    __slots__ = ()

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __repr__(self):
        return "TOP"


TOP = _Top()


class Record:
    __slots__ = ("buf", "child", "bid", "w", "nel", "nrec", "nblk", "lo")

    def __init__(self, buf: tuple, child: "Cpqa | None", store: BlockStore):
        self.buf = buf
        self.child = child
        self.bid = store.new_id()
        self.w = 1
        self.lo = buf[0]
        blk = store.cost(len(buf))
        if child is None:
            self.nel = len(buf)
            self.nrec = 1
            self.nblk = blk
        else:
            self.nel = len(buf) + child.total
            self.nrec = 1 + child.nrec
            self.nblk = blk + child.nblk
        store.charge_write(len(buf), self.bid)

    @property
    def hi(self):
        return self.buf[-1]

    @property
    def simple(self) -> bool:
        return self.child is None

    def __repr__(self) -> str:
        tail = "" if self.child is None else f" -> {self.child!r}"
        return f"Record({list(self.buf)}{tail})"


class Cpqa:
    """One immutable version of a catenable priority queue with attrition."""

    __slots__ = ("F", "C", "B", "D", "L", "b", "store", "total", "nrec", "nblk")

    def __init__(self, b: int, store: BlockStore, F: tuple = (), C=None, B=None,
                 D=None, L: tuple = ()):
        if b < 1 or b > store.block_capacity_elems:
            raise ValueError(f"buffer parameter b={b} outside [1, B={store.B}]")
        self.b = b
        self.store = store
        self._set(F, C, B, D, L)

    def _set(self, F, C, B, D, L):
        self.F = F
        self.C = C
        self.B = B
        self.D = D
        self.L = L
        total = len(F) + len(L)
        nrec = 0
        nblk = 0
        for s in (C, B, D):
            if s is not None:
                total += s.nel
                nrec += s.nrec
                nblk += s.nblk
        self.total = total
        self.nrec = nrec
        self.nblk = nblk

    # -- construction ----------------------------------------------------
    @classmethod
    def empty(cls, b: int, store: BlockStore) -> "Cpqa":
        return cls(b, store)

    @classmethod
    def singleton(cls, e, b: int, store: BlockStore) -> "Cpqa":
        return cls(b, store, F=(e,))

    @classmethod
    def from_sorted(cls, elems: Sequence, b: int, store: BlockStore) -> "Cpqa":
        """Pack a strictly increasing run straight into ``F`` and clean records."""
        elems = tuple(elems)
        if any(not (x < y) for x, y in zip(elems, elems[1:])):
            raise ValueError("from_sorted needs a strictly increasing sequence")
        if len(elems) <= 4 * b:
            return cls(b, store, F=elems)
        F = elems[:2 * b]
        rest = elems[2 * b:]
        chunks = [rest[i:i + 2 * b] for i in range(0, len(rest), 2 * b)]
        if len(chunks) > 1 and len(chunks[-1]) < b:
            tail = chunks.pop()
            chunks[-1] = chunks[-1] + tail
        C = None
        with store.operation():
            for ch in chunks:
                C = push_back(C, Record(ch, None, store))
        return cls(b, store, F=F, C=C)

    @classmethod
    def from_sequence(cls, elems: Iterable, b: int, store: BlockStore) -> "Cpqa":
        """Queue equal to inserting ``elems`` one by one with attrition."""
        stair: list = []
        for e in elems:
            cut = bisect_left(stair, e)
            del stair[cut:]
            stair.append(e)
        return cls.from_sorted(stair, b, store)

    def _with(self, F=None, C=0, B=0, D=0, L=None) -> "Cpqa":
        q = object.__new__(Cpqa)
        q.b = self.b
        q.store = self.store
        q._set(self.F if F is None else F,
               self.C if C == 0 else C,
               self.B if B == 0 else B,
               self.D if D == 0 else D,
               self.L if L is None else L)
        return q

    # -- properties ------------------------------------------------------
    def __len__(self) -> int:
        return self.total

    def __bool__(self) -> bool:
        return self.total > 0

    @property
    def k(self) -> int:
        return 0 if self.D is None else self.D.n

    @property
    def is_small(self) -> bool:
        return self.total < self.b

    @property
    def top_records(self) -> int:
        return sum(0 if s is None else s.w for s in (self.C, self.B, self.D))

    def __repr__(self) -> str:
        return (f"Cpqa(b={self.b}, |F|={len(self.F)}, |C|={pseq.size(self.C)}, "
                f"|B|={pseq.size(self.B)}, k={self.k}, |L|={len(self.L)}, "
                f"total={self.total})")


def _rd(store: BlockStore, rec: Record) -> Record:
    store.charge_read(rec.bid, len(rec.buf))
    return rec


def _check_pair(q1: Cpqa, q2: Cpqa) -> None:
    if q1.b != q2.b:
        raise QueueMismatchError(f"buffer parameters differ: {q1.b} vs {q2.b}")
    if q1.store is not q2.store:
        raise QueueMismatchError("queues live in different block stores")


def _child_of(q: Cpqa, C=0) -> Cpqa | None:
    """The part of ``q`` after its buffers, as a child queue (F = L = empty)."""
    c = q._with(F=(), C=C, L=())
    return c if c.total else None


def _drop_dirty_prefix(D, L):
    """Drop dirty deques that are wholly attrited.

    Every deque in front of the one holding the least dirty element is
    attrited by that element; if ``L`` starts lower than all of them, every
    dirty deque is.  Restores the ordering of the first dirty deque after it
    has lost elements.
    """
    if D is None:
        return None
    if L and not (D.lo < L[0]):
        return None
    i = pseq.argmin(D)
    if i:
        _, D = split(D, i)
    return D


def _qmin(q: Cpqa):
    if q.F:
        return q.F[0]
    for s in (q.C, q.B, q.D):
        if s is not None:
            return s.lo
    return q.L[0] if q.L else TOP


# -- Bias and Fill -----------------------------------------------------------

def _bias(q: Cpqa) -> Cpqa:
    b = q.b
    st = q.store
    C, B, D, L = q.C, q.B, q.D, q.L
    if B is not None:
        r1, Brest = pop_front(B)
        _rd(st, r1)
        buf = r1.buf
        if D is None:
            keep = buf if not L else buf[:bisect_left(buf, L[0])]
            if len(keep) == len(buf):
                if L and Brest is not None and not (Brest.lo < L[0]):
                    Brest = None
                return q._with(C=push_back(C, r1), B=Brest)
            # the rest of B lies above an attrited element, so it goes too
            if len(keep) >= b:
                return q._with(C=push_back(C, Record(keep, None, st)), B=None)
            comb = keep + L
            if len(comb) <= 3 * b:
                return _bias(q._with(B=None, L=comb))
            return q._with(C=push_back(C, Record(comb[:2 * b], None, st)), B=None,
                           L=comb[2 * b:])
        e = D.lo
        keep = buf[:bisect_left(buf, e)]
        if len(keep) == len(buf):
            # records after a wholly attrited one are attrited as well
            if Brest is not None and not (Brest.lo < e):
                Brest = None
            return q._with(C=push_back(C, r1), B=Brest)
        if len(keep) >= b:
            return q._with(C=push_back(C, Record(keep, None, st)), B=None)
        D1, Drest = pop_front(D)
        r2, D1rest = pop_front(D1)
        _rd(st, r2)
        comb = keep + r2.buf
        if len(comb) <= 4 * b:
            D1 = push_front(D1rest, Record(comb, r2.child, st))
            return _bias(q._with(B=None, D=push_front(Drest, D1)))
        # Moving the first 2b elements into C is only safe for those below
        # every later dirty deque and below L; anything past that point
        # (and the rest of D_1 with it) is attrited.
        t = min(L[0] if L else TOP, Drest.lo if Drest is not None else TOP)
        take = comb[:2 * b]
        if take[-1] < t:
            D1 = push_front(D1rest, Record(comb[2 * b:], r2.child, st))
            return q._with(C=push_back(C, Record(take, None, st)), B=None,
                           D=_drop_dirty_prefix(push_front(Drest, D1), L))
        s = take[:bisect_left(take, t)]
        return q._with(C=push_back(C, Record(s, None, st)), B=None,
                       D=_drop_dirty_prefix(Drest, L))

    if D is None:
        if C is None and L and len(q.F) <= 2 * b:
            return q._with(F=q.F + L[:b], L=L[b:])
        return q

    if D.n > 1:
        front, Dk = pop_back(D)
        if L and L[0] <= Dk.lo:
            return q._with(D=front)
        e = Dk.lo
        front2, Dk1 = pop_back(front)
        Dk1front, rl = pop_back(Dk1)
        _rd(st, rl)
        if e <= rl.lo:
            kept = Dk1front if Dk1front is not None else None
            D2 = front2 if kept is None else push_back(front2, kept)
            return q._with(D=push_back(D2, Dk))
        if e <= rl.buf[-1]:
            r2 = first(Dk)
            _rd(st, r2)
            keep = rl.buf[:bisect_left(rl.buf, e)]
            comb = keep + r2.buf
            if len(comb) <= 4 * b:
                merged = concat(Dk1front, replace_front(Dk, Record(comb, r2.child, st)))
            else:
                h = len(comb) // 2
                merged = concat(push_back(Dk1front, Record(comb[:h], None, st)),
                                replace_front(Dk, Record(comb[h:], r2.child, st)))
        else:
            merged = concat(Dk1, Dk)
        return q._with(D=push_back(front2, merged))

    # k == 1
    D1 = first(D)
    r, D1rest = pop_front(D1)
    _rd(st, r)
    if L and D1rest is not None and L[0] <= D1rest.lo:
        D1rest = None
    lbuf = r.buf
    if L and L[0] <= lbuf[-1]:
        keep = lbuf[:bisect_left(lbuf, L[0])]
        comb = keep + L
        C2 = C
        while len(comb) > 3 * b:
            C2 = push_back(C2, Record(comb[:2 * b], None, st))
            comb = comb[2 * b:]
        return q._with(C=C2, D=None, L=comb)
    C2 = push_back(C, r if r.child is None else Record(lbuf, None, st))
    Dn = None if D1rest is None else single(D1rest)
    child = r.child
    if child is None:
        return q._with(C=C2, D=Dn)
    # merge the child queue into q, attrited by whatever follows it
    e = min(D1rest.lo if D1rest is not None else TOP, L[0] if L else TOP)
    if not (_qmin(child) < e):
        return q._with(C=C2, D=Dn)
    Cc, Bc, Dc = child.C, child.B, child.D
    if Cc is not None:
        lc = last(Cc)
        _rd(st, lc)
        if e <= lc.buf[-1]:
            return q._with(C=C2, B=Cc, D=Dn)
    C3 = concat(C2, Cc)
    if Dc is None or not (Dc.lo < e):
        B3 = Bc if (Bc is not None and Bc.lo < e) else None
        return q._with(C=C3, B=B3, D=Dn)
    D3 = Dc if D1rest is None else push_back(Dc, D1rest)
    return q._with(C=C3, B=Bc, D=D3)


def _fill(q: Cpqa) -> Cpqa:
    b = q.b
    st = q.store
    while len(q.F) < b and q.total >= b:
        if q.C is not None:
            r, Crest = pop_front(q.C)
            _rd(st, r)
            if len(r.buf) >= 2 * b:
                q = q._with(F=q.F + r.buf[:b],
                            C=push_front(Crest, Record(r.buf[b:], None, st)))
            else:
                q = _bias(q._with(F=q.F + r.buf, C=Crest))
        else:
            nxt = _bias(q)
            if nxt is q:
                raise InvariantViolation(f"fill cannot make progress on {q!r}")
            q = nxt
    return q


def bias(q: Cpqa) -> Cpqa:
    """Improve the state of ``q`` by at least one, leaving its content alone."""
    with q.store.operation():
        return _bias(q)


def fill(q: Cpqa) -> Cpqa:
    """Refill ``F`` from the clean records when it ran short."""
    with q.store.operation():
        return _fill(q)


# -- public operations -------------------------------------------------------

def find_min(q: Cpqa):
    if not q.total:
        raise EmptyQueueError("find_min on an empty queue")
    return q.F[0]


def delete_min(q: Cpqa):
    """Return ``(min, rest)``."""
    if not q.total:
        raise EmptyQueueError("delete_min on an empty queue")
    with q.store.operation():
        e = q.F[0]
        return e, _fill(q._with(F=q.F[1:]))


def catenate_and_attrite(q1: Cpqa, q2: Cpqa) -> Cpqa:
    """Elements of ``q1`` below ``min(q2)``, followed by all of ``q2``."""
    _check_pair(q1, q2)
    if not q2.total:
        return q1
    if not q1.total:
        return q2
    with q1.store.operation():
        return _fill(_catenate(q1, q2))


def insert_and_attrite(q: Cpqa, e) -> Cpqa:
    return catenate_and_attrite(q, Cpqa.singleton(e, q.b, q.store))


def _catenate(q1: Cpqa, q2: Cpqa) -> Cpqa:
    e = q2.F[0]
    F1 = q1.F
    if q1.total < q1.b or not (F1[-1] < e):
        # q1 is only its first buffer, or attrition reaches into it: whatever
        # survives of q1 sits in front of q2's first buffer
        return _prepend_to_front(q2, F1[:bisect_left(F1, e)])
    if q2.total < q2.b:
        return _cat_small_right(q1, q2.F)
    return _cat_large(q1, q2)


# Inside a multi-catenation each intermediate queue only needs state +1, so
# Bias runs just until that holds; elsewhere it runs the full number of times.
_lazy = 0


def _settle(q: Cpqa, times: int = 2) -> Cpqa:
    for _ in range(times):
        if _lazy and delta_state(q) >= 1:
            break
        q = _bias(q)
    return q


def _prepend_to_front(q: Cpqa, head: tuple) -> Cpqa:
    if not head:
        return q
    b = q.b
    F = head + q.F
    C = q.C
    while len(F) > 4 * b:
        C = push_front(C, Record(F[-2 * b:], None, q.store))
        F = F[:-2 * b]
    return q._with(F=F, C=C)


def _last_record(q: Cpqa):
    if q.D is not None:
        return last(last(q.D)), "D"
    if q.B is not None:
        return last(q.B), "B"
    if q.C is not None:
        return last(q.C), "C"
    return None, None


def _drop_last_record(q: Cpqa, where: str):
    if where == "D":
        front, Dk = pop_back(q.D)
        Dk, _ = pop_back(Dk)
        return q.C, q.B, (front if Dk is None else push_back(front, Dk))
    if where == "B":
        B, _ = pop_back(q.B)
        return q.C, B, q.D
    C, _ = pop_back(q.C)
    return C, q.B, q.D


def _replace_last_record(q: Cpqa, where: str, rec: Record):
    if where == "D":
        return q.C, q.B, replace_back(q.D, replace_back(last(q.D), rec))
    if where == "B":
        return q.C, replace_back(q.B, rec), q.D
    return replace_back(q.C, rec), q.B, q.D


def _cat_small_right(q1: Cpqa, F2: tuple) -> Cpqa:
    """Catenate a large ``q1`` with a queue that is only its first buffer."""
    b = q1.b
    st = q1.store
    e = F2[0]
    L = q1.L
    r, where = _last_record(q1)
    if r is not None:
        _rd(st, r)
    if r is not None and e <= r.lo:
        C, B, D = _drop_last_record(q1, where)
        if C is not None:
            lc = last(C)
            _rd(st, lc)
            if e <= lc.buf[-1]:
                # attrition reaches the clean records: they become the buffer
                # deque and get checked against the new last buffer one by one
                B2 = C if C.lo < e else None
                return _bias(q1._with(C=None, B=B2, D=None, L=F2))
        if (B is not None and e <= B.lo) or (D is not None and e <= D.lo):
            B2 = None if (B is not None and e <= B.lo) else B
            return q1._with(C=C, B=B2, D=None, L=F2)
        comb = L[:bisect_left(L, e)] + F2
        if len(comb) <= 4 * b:
            return q1._with(C=C, B=B, D=D, L=comb)
        D2 = push_back(D, single(Record(comb[:4 * b], None, st)))
        return _settle(q1._with(C=C, B=B, D=D2, L=comb[4 * b:]))

    if not L or e <= L[0]:
        if where == "C" and e <= r.buf[-1]:
            # the last clean record is partly attrited: demote it to the
            # buffer deque so that Bias trims it against the new last buffer
            C, _ = pop_back(q1.C)
            return _bias(q1._with(C=C, B=single(r), L=F2))
        return q1._with(L=F2)

    comb = L[:bisect_left(L, e)] + F2
    if len(comb) <= 4 * b:
        return q1._with(L=comb)
    C, B, D = q1.C, q1.B, q1.D
    if r is not None:
        keep = r.buf[:bisect_left(r.buf, L[0])]
        if len(keep) < len(r.buf):
            take = 4 * b - len(keep)
            C, B, D = _replace_last_record(
                q1, where, Record(keep + comb[:take], None, st))
            comb = comb[take:]
    added = False
    if len(comb) > 3 * b:
        nr = Record(comb[:3 * b], None, st)
        comb = comb[3 * b:]
        if D is not None:
            D = replace_back(D, push_back(last(D), nr))
            added = True
        else:
            # no dirty deque to extend; the buffer deque takes it
            B = push_back(B, nr)
    q = q1._with(C=C, B=B, D=D, L=comb)
    return _settle(q, 1) if added else q


def _cat_large(q1: Cpqa, q2: Cpqa) -> Cpqa:
    """Both queues large and ``max(F(q1)) < min(q2)``."""
    b = q1.b
    st = q1.store
    e = q2.F[0]
    C, B, D, L = q1.C, q1.B, q1.D, q1.L
    if C is not None:
        lc = last(C)
        _rd(st, lc)
        if e <= lc.buf[-1]:
            D1 = single(single(Record(q2.F, _child_of(q2), st)))
            B2 = C if C.lo < e else None
            return _settle(q1._with(C=None, B=B2, D=D1, L=q2.L))
    if (B is not None and e <= B.lo) or (D is not None and e <= D.lo):
        B2 = None if (B is not None and e <= B.lo) else B
        D1 = single(single(Record(q2.F, _child_of(q2), st)))
        return _settle(q1._with(B=B2, D=D1, L=q2.L))
    comb = L[:bisect_left(L, e)] + q2.F
    C2 = q2.C
    if len(comb) <= 4 * b:
        head = comb
    else:
        h = len(comb) // 2
        head = comb[:h]
        C2 = push_front(C2, Record(comb[h:], None, st))
    rec = Record(head, _child_of(q2, C=C2), st)
    return _settle(q1._with(D=push_back(D, single(rec)), L=q2.L))


# -- catenating many queues --------------------------------------------------

def delta_state(q: Cpqa) -> int:
    """|C| minus the records and the number of dirty deques."""
    c = 0 if q.C is None else q.C.n
    if q.D is None:
        return c
    return c - q.D.w - q.D.n


def lemma_ready(q: Cpqa) -> bool:
    """State condition under which a queue can join a multi-catenation."""
    rc = q.top_records
    d = delta_state(q)
    if rc <= 1:
        return d >= 0
    if rc == 2:
        return d >= 1
    return d >= 2


def prepare(q: Cpqa, limit: int = 64) -> Cpqa:
    """Run Bias until ``q`` satisfies :func:`lemma_ready`."""
    with q.store.operation():
        for _ in range(limit):
            if lemma_ready(q):
                return _fill(q)
            nxt = _bias(q)
            if nxt is q:
                break
            q = nxt
    if not lemma_ready(q):
        raise LemmaPreconditionError(f"bias did not reach the required state: {q!r}")
    return q


def multi_catenate(queues: Sequence[Cpqa]) -> Cpqa:
    """Right-to-left fold of :func:`catenate_and_attrite`."""
    queues = list(queues)
    if not queues:
        raise ValueError("multi_catenate needs at least one queue")
    for i, q in enumerate(queues):
        if not lemma_ready(q):
            raise LemmaPreconditionError(
                f"queue {i} has state {delta_state(q)} with {q.top_records} records")
        if i:
            _check_pair(queues[0], q)
    store = queues[0].store
    strict = all(critical_resident(q) for q in queues)
    reads = store.counter.reads
    acc = queues[-1]
    global _lazy
    _lazy += 1
    try:
        with store.operation():
            for q in reversed(queues[:-1]):
                acc = catenate_and_attrite(q, acc)
    finally:
        _lazy -= 1
    if strict and store.counter.reads != reads:
        raise InvariantViolation(
            f"multi_catenate read {store.counter.reads - reads} unpinned block(s)")
    return acc


# -- critical records and pinning --------------------------------------------

def critical_records(q: Cpqa) -> list[Record]:
    """Records whose residency lets the operations run without I/O.

    The union of the two published lists, plus the records that two
    consecutive Bias calls may reach: the second record of ``B``,
    ``first(rest(D_1))`` and the ends of the clean deque below ``first(D_1)``.
    """
    out: dict[int, Record] = {}

    def add(r):
        if r is not None:
            out[r.bid] = r

    C, B, D = q.C, q.B, q.D
    if C is not None:
        for i in range(min(3, C.n)):
            add(pseq.nth(C, i))
        add(last(C))
    if B is not None:
        add(first(B))
        if B.n > 1:
            add(pseq.nth(B, 1))
        add(last(B))
    if D is not None:
        D1 = first(D)
        r = first(D1)
        add(r)
        if D1.n > 1:
            add(pseq.nth(D1, 1))
        if r.child is not None:
            # Bias merges this child and may move its clean deque to B
            Cc = r.child.C
            if Cc is not None:
                add(first(Cc))
                if Cc.n > 1:
                    add(pseq.nth(Cc, 1))
                add(last(Cc))
        Dk = last(D)
        add(first(Dk))
        add(last(Dk))
        if Dk.n > 1:
            add(pseq.nth(Dk, Dk.n - 2))
        elif D.n > 1:
            add(last(pseq.nth(D, D.n - 2)))
    return list(out.values())


def pin_critical(q: Cpqa, owner: str | None = None, load: bool = True) -> list[int]:
    """Pin the critical records of ``q``; loading one not yet resident costs a read."""
    ids = []
    for r in critical_records(q):
        if load:
            q.store.charge_read(r.bid, len(r.buf))
        q.store.pin(r.bid, len(r.buf), owner=owner)
        ids.append(r.bid)
    return ids


def critical_resident(q: Cpqa) -> bool:
    return all(q.store.is_resident(r.bid) for r in critical_records(q))


def unpin_critical(q: Cpqa) -> None:
    for r in critical_records(q):
        q.store.unpin(r.bid)


def repin(old: Iterable[Cpqa], new: Iterable[Cpqa], owner: str | None = None) -> None:
    """Move the pins from the critical records of ``old`` to those of ``new``."""
    new = list(new)
    for q in new:
        pin_critical(q, owner)
    for q in old:
        unpin_critical(q)


# -- potential ---------------------------------------------------------------

@dataclass(frozen=True)
class PotentialReport:
    phi_f: Fraction
    phi_l: Fraction
    record_count: int
    phi_total: Fraction


def phi_first(x: int, b: int) -> Fraction:
    if x < 2 * b:
        return 5 - Fraction(2 * x, b)
    if x < 3 * b:
        return Fraction(1)
    return Fraction(2 * x, b) - 5


def phi_last(x: int, b: int) -> Fraction:
    if x < b:
        return Fraction(x, b)
    if x <= 3 * b:
        return Fraction(1)
    return Fraction(2 * x, b) - 5


def potential(q: Cpqa) -> PotentialReport:
    if q.total < q.b:
        return PotentialReport(Fraction(0), Fraction(0), q.nrec,
                               Fraction(3 * q.total, q.b))
    pf = phi_first(len(q.F), q.b)
    pl = phi_last(len(q.L), q.b)
    return PotentialReport(pf, pl, q.nrec, pf + q.nrec + pl)


def total_potential(queues: Iterable[Cpqa]) -> Fraction:
    """Sum of the queue potentials plus one per large queue."""
    tot = Fraction(0)
    for q in queues:
        tot += potential(q).phi_total
        if q.total >= q.b:
            tot += 1
    return tot


def blocks_used(q: Cpqa) -> int:
    """Blocks held by the records reachable from ``q`` (buffers excluded)."""
    return q.nblk


# -- inspection --------------------------------------------------------------

def drain(q: Cpqa) -> list:
    """Content of ``q`` in increasing order, by repeated delete_min on a copy."""
    out = []
    with q.store.uncounted():
        while q.total:
            e, q = delete_min(q)
            out.append(e)
    return out


def queue_order(q: Cpqa) -> list:
    """All stored elements in queue order, attrited ones included."""
    out: list = []
    _walk(q, out)
    return out


def _walk(q: Cpqa, out: list) -> None:
    out.extend(q.F)
    for s in (q.C, q.B):
        if s is not None:
            for r in pseq.iter_items(s):
                out.extend(r.buf)
                if r.child is not None:
                    _walk(r.child, out)
    if q.D is not None:
        for dq in pseq.iter_items(q.D):
            for r in pseq.iter_items(dq):
                out.extend(r.buf)
                if r.child is not None:
                    _walk(r.child, out)
    out.extend(q.L)


def logical_content(q: Cpqa) -> list:
    """Survivors of attrition over the queue order (suffix minima)."""
    order = queue_order(q)
    out = []
    best = TOP
    for e in reversed(order):
        if e < best:
            out.append(e)
            best = e
    out.reverse()
    return out


@dataclass(frozen=True)
class InvariantReport:
    ok: bool
    violation: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def check_invariants(q: Cpqa) -> InvariantReport:
    """Evaluate I.1 to I.9 on ``q`` and every queue below it."""
    try:
        _check(q, root=True, path="Q")
    except InvariantViolation as exc:
        return InvariantReport(False, str(exc))
    return InvariantReport(True)


def _fail(msg: str):
    raise InvariantViolation(msg)


def _sorted_strict(seq) -> bool:
    return all(x < y for x, y in zip(seq, seq[1:]))


def _check_deque(dq, name: str, path: str, simple: bool) -> None:
    prev = None
    for i, r in enumerate(pseq.iter_items(dq)):
        if not r.buf or not _sorted_strict(r.buf):
            _fail(f"{path}.{name}[{i}] buffer not sorted or empty")
        if simple and r.child is not None:
            _fail(f"I.6: {path}.{name}[{i}] is not simple")
        if prev is not None and not (prev.buf[-1] < r.buf[0]):
            _fail(f"I.2: {path}.{name}[{i - 1}] and [{i}] overlap")
        if r.child is not None:
            c = r.child
            if not c.total:
                _fail(f"{path}.{name}[{i}] points to an empty queue")
            if not (r.buf[-1] < _qmin(c)):
                _fail(f"I.1: {path}.{name}[{i}] buffer reaches into its child")
            _check(c, root=False, path=f"{path}.{name}[{i}]")
        prev = r


def _check(q: Cpqa, root: bool, path: str) -> None:
    b = q.b
    F, C, B, D, L = q.F, q.C, q.B, q.D, q.L
    if not _sorted_strict(F) or not _sorted_strict(L):
        _fail(f"{path}: F or L not sorted")
    if not root and (F or L):
        _fail(f"I.9: child {path} has non-empty F or L")
    if C is not None:
        _check_deque(C, "C", path, simple=True)
    if B is not None:
        _check_deque(B, "B", path, simple=True)
    if D is not None:
        for i, dq in enumerate(pseq.iter_items(D)):
            _check_deque(dq, f"D{i + 1}", path, simple=False)
    # I.3: max(F) < min(first(C)) <= max(last(C)) < min(first(B)) < min(first(D1))
    chain = []
    if F:
        chain.append(("max(F)", F[-1]))
    if C is not None:
        chain.append(("min(first(C))", C.lo))
        chain.append(("max(last(C))", last(C).buf[-1]))
    if B is not None:
        chain.append(("min(first(B))", B.lo))
    if D is not None:
        chain.append(("min(first(D1))", first(D).lo))
    for (na, va), (nb, vb) in zip(chain, chain[1:]):
        if na == "min(first(C))":
            if not (va <= vb):
                _fail(f"I.3: {path} {na} > {nb}")
        elif not (va < vb):
            _fail(f"I.3: {path} {na} >= {nb}")
    if D is not None:
        d1 = first(D).lo
        if D.lo != d1:
            _fail(f"I.4: {path} min(first(D1)) is not the least dirty element")
        if L and not (d1 < L[0]):
            _fail(f"I.5: {path} min(first(D1)) >= min(L)")
    elif chain and L and not (chain[-1][1] < L[0]):
        _fail(f"I.5: {path} {chain[-1][0]} >= min(L)")
    if delta_state(q) < 0:
        _fail(f"I.7: {path} state {delta_state(q)} < 0")
    if root:
        if (len(F) < b) != (q.total < b):
            _fail(f"I.8: {path} |F|={len(F)} but |Q|={q.total} with b={b}")
        if q.total < b and (C is not None or B is not None or D is not None or L):
            _fail(f"I.8: small queue {path} holds more than its first buffer")
    expect = len(F) + len(L) + sum(0 if s is None else s.nel for s in (C, B, D))
    if expect != q.total:
        _fail(f"{path}: cached size {q.total} != {expect}")
