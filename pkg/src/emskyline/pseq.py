"""Persistent catenable sequences (path-copying treaps).

Every node caches aggregates of its subtree so that sizes, element counts and
the minimum key are available at the root without walking the items.  Items
must expose ``w``, ``nel``, ``nrec``, ``nblk`` and ``lo``; a sequence root is
itself such an item, which lets sequences nest (the dirty deques of a CPQA are
a sequence of sequences).

All operations return new roots and never modify existing nodes.  ``None`` is
the empty sequence.
"""
from __future__ import annotations

import random
from typing import Any, Iterator

_rng = random.Random(0x5EED)
_rand = _rng.random


class Node:
    __slots__ = ("item", "pri", "left", "right", "n", "w", "nel", "nrec", "nblk", "lo")

    def __init__(self, item, pri, left, right):
        self.item = item
        self.pri = pri
        self.left = left
        self.right = right
        n, w, nel, nrec, nblk, lo = 1, item.w, item.nel, item.nrec, item.nblk, item.lo
        if left is not None:
            n += left.n
            w += left.w
            nel += left.nel
            nrec += left.nrec
            nblk += left.nblk
            if left.lo < lo:
                lo = left.lo
        if right is not None:
            n += right.n
            w += right.w
            nel += right.nel
            nrec += right.nrec
            nblk += right.nblk
            if right.lo < lo:
                lo = right.lo
        self.n = n
        self.w = w
        self.nel = nel
        self.nrec = nrec
        self.nblk = nblk
        self.lo = lo

    def __iter__(self) -> Iterator[Any]:
        return iter_items(self)

    def __len__(self) -> int:
        return self.n

    def __repr__(self) -> str:
        return f"PSeq(n={self.n})"


def single(item) -> Node:
    return Node(item, _rand(), None, None)


def size(t) -> int:
    return 0 if t is None else t.n


def concat(a, b):
    if a is None:
        return b
    if b is None:
        return a
    if a.pri > b.pri:
        return Node(a.item, a.pri, a.left, concat(a.right, b))
    return Node(b.item, b.pri, concat(a, b.left), b.right)


def split(t, i):
    """Split into the first ``i`` items and the rest."""
    if t is None:
        return None, None
    ln = t.left.n if t.left is not None else 0
    if i <= ln:
        a, b = split(t.left, i)
        return a, Node(t.item, t.pri, b, t.right)
    a, b = split(t.right, i - ln - 1)
    return Node(t.item, t.pri, t.left, a), b


def first(t):
    while t.left is not None:
        t = t.left
    return t.item


def last(t):
    while t.right is not None:
        t = t.right
    return t.item


def nth(t, i):
    while True:
        ln = t.left.n if t.left is not None else 0
        if i < ln:
            t = t.left
        elif i == ln:
            return t.item
        else:
            i -= ln + 1
            t = t.right


def push_front(t, item):
    return concat(single(item), t)


def push_back(t, item):
    return concat(t, single(item))


def _pop_front(t):
    if t.left is None:
        return t.item, t.right
    item, rest = _pop_front(t.left)
    return item, Node(t.item, t.pri, rest, t.right)


def _pop_back(t):
    if t.right is None:
        return t.left, t.item
    rest, item = _pop_back(t.right)
    return Node(t.item, t.pri, t.left, rest), item


def pop_front(t):
    """Return ``(first item, rest)``."""
    return _pop_front(t)


def pop_back(t):
    """Return ``(front, last item)``."""
    return _pop_back(t)


def replace_front(t, item):
    if t.left is None:
        return Node(item, t.pri, None, t.right)
    return Node(t.item, t.pri, replace_front(t.left, item), t.right)


def replace_back(t, item):
    if t.right is None:
        return Node(item, t.pri, t.left, None)
    return Node(t.item, t.pri, t.left, replace_back(t.right, item))


def argmin(t) -> int:
    """Index of the item with the smallest ``lo``."""
    idx = 0
    target = t.lo
    while True:
        ln = t.left.n if t.left is not None else 0
        if t.left is not None and t.left.lo == target:
            t = t.left
        elif t.item.lo == target:
            return idx + ln
        else:
            idx += ln + 1
            t = t.right


def iter_items(t) -> Iterator[Any]:
    stack = []
    while stack or t is not None:
        while t is not None:
            stack.append(t)
            t = t.left
        t = stack.pop()
        yield t.item
        t = t.right


def from_items(items) -> Node | None:
    t = None
    for it in items:
        t = push_back(t, it)
    return t
