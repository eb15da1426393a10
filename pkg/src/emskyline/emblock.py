"""Simulated external memory with exact I/O accounting.

A :class:`BlockStore` holds payloads keyed by block id.  Every unpinned access
to a payload of ``s`` elements costs ``ceil(s / B)`` I/Os.  A small pin set
models the blocks kept in main memory; touching a pinned block is free.

Structures that manage their own node objects (the CPQA records, for instance)
do not need to park payloads in the map: they take an id from :meth:`new_id`
and report accesses through :meth:`charge_read` / :meth:`charge_write`.
"""
from __future__ import annotations

import itertools
from contextlib import contextmanager
from typing import Any, Hashable, Iterable


class BlockStoreError(Exception):
    pass


class UnknownBlock(BlockStoreError, KeyError):
    pass


class PinBudgetExceeded(BlockStoreError):
    pass


class IoCounter:
    __slots__ = ("reads", "writes")

    def __init__(self) -> None:
        self.reads = 0
        self.writes = 0

    @property
    def total(self) -> int:
        return self.reads + self.writes

    def snapshot(self) -> tuple[int, int]:
        return self.reads, self.writes

    def reset(self) -> None:
        self.reads = 0
        self.writes = 0

    def __repr__(self) -> str:
        return f"IoCounter(reads={self.reads}, writes={self.writes})"


class BlockStore:
    """Fixed-capacity blocks, an I/O counter and a bounded pin set.

    ``block_capacity_elems`` is the model's B and ``memory_budget_blocks``
    bounds the number of blocks that may be pinned at once (M/B).
    """

    def __init__(self, block_capacity_elems: int, memory_budget_blocks: int = 64,
                 debug: bool = False) -> None:
        if block_capacity_elems < 1:
            raise ValueError("block_capacity_elems must be >= 1")
        if memory_budget_blocks < 1:
            raise ValueError("memory_budget_blocks must be >= 1")
        self.block_capacity_elems = block_capacity_elems
        self.memory_budget_blocks = memory_budget_blocks
        self.debug = debug
        self.blocks: dict[Hashable, tuple[Any, int]] = {}
        self.counter = IoCounter()
        # pinned id -> (refcount, cost in blocks, ids it makes resident)
        self._pins: dict[Hashable, list] = {}
        self._pinned_blocks = 0
        self._covered: dict[Hashable, int] = {}
        self._fresh: set[Hashable] = set()
        self._op_depth = 0
        self._counting = True
        self._ids = itertools.count(1)

    # -- sizes ---------------------------------------------------------------
    @property
    def B(self) -> int:
        return self.block_capacity_elems

    def cost(self, elems: int) -> int:
        """Blocks spanned by a payload of ``elems`` elements (at least 1)."""
        if elems <= 0:
            return 1
        return -(-elems // self.block_capacity_elems)

    def new_id(self) -> int:
        return next(self._ids)

    # -- payload map ---------------------------------------------------------
    def allocate(self, payload: Any, elems: int) -> int:
        """Store a fresh payload and charge its write."""
        bid = self.new_id()
        self.blocks[bid] = (payload, elems)
        self.charge_write(elems, bid)
        return bid

    def access(self, bid: Hashable, mode: str = "read", payload: Any = None,
               elems: int | None = None) -> Any:
        if mode == "read":
            try:
                data, size = self.blocks[bid]
            except KeyError:
                raise UnknownBlock(bid) from None
            self.charge_read(bid, size)
            return data
        if mode != "write":
            raise ValueError(f"mode must be 'read' or 'write', got {mode!r}")
        if elems is None:
            elems = self.blocks[bid][1] if bid in self.blocks else 1
        self.blocks[bid] = (payload, elems)
        self.charge_write(elems, bid)
        return payload

    def free(self, bid: Hashable) -> None:
        self.blocks.pop(bid, None)

    def size_of(self, bid: Hashable) -> int:
        return self.blocks[bid][1]

    def blocks_used(self) -> int:
        return sum(self.cost(size) for _, size in self.blocks.values())

    # -- accounting ----------------------------------------------------------
    def is_resident(self, bid: Hashable) -> bool:
        return bid in self._pins or bid in self._covered or bid in self._fresh

    def charge_read(self, bid: Hashable, elems: int) -> int:
        if not self._counting or self.is_resident(bid):
            return 0
        c = self.cost(elems)
        self.counter.reads += c
        return c

    def charge_write(self, elems: int, bid: Hashable | None = None) -> int:
        if bid is not None and self._op_depth:
            self._fresh.add(bid)
        if not self._counting:
            return 0
        c = self.cost(elems)
        self.counter.writes += c
        return c

    def scan(self, elems: int) -> int:
        """Charge a sequential read of ``elems`` elements."""
        if elems <= 0 or not self._counting:
            return 0
        c = self.cost(elems)
        self.counter.reads += c
        return c

    def emit(self, elems: int) -> int:
        """Charge a sequential write of ``elems`` elements."""
        if elems <= 0 or not self._counting:
            return 0
        c = self.cost(elems)
        self.counter.writes += c
        return c

    @contextmanager
    def operation(self):
        """Group accesses into one logical operation.

        Blocks written inside the operation stay resident until it ends, so
        re-reading something just built is free.  Nesting is allowed.
        """
        self._op_depth += 1
        try:
            yield self
        finally:
            self._op_depth -= 1
            if not self._op_depth:
                self._fresh.clear()

    @contextmanager
    def uncounted(self):
        """Suspend accounting (for oracles and inspection helpers)."""
        prev = self._counting
        self._counting = False
        try:
            yield self
        finally:
            self._counting = prev

    # -- pinning -------------------------------------------------------------
    def pin(self, bid: Hashable, elems: int | None = None,
            covers: Iterable[Hashable] = (), owner: str | None = None) -> None:
        """Pin a block; ``covers`` lists ids made resident by it.

        Pins are reference counted so that persistent versions sharing a
        record may each pin it.
        """
        entry = self._pins.get(bid)
        if entry is not None:
            entry[0] += 1
            return
        if elems is None:
            if bid not in self.blocks:
                raise UnknownBlock(bid)
            elems = self.blocks[bid][1]
        c = self.cost(elems)
        if self._pinned_blocks + c > self.memory_budget_blocks:
            who = f" by {owner}" if owner else ""
            raise PinBudgetExceeded(
                f"pinning block {bid!r}{who} needs {c} block(s); "
                f"{self._pinned_blocks}/{self.memory_budget_blocks} in use")
        covered = tuple(covers)
        self._pins[bid] = [1, c, covered]
        self._pinned_blocks += c
        for cid in covered:
            self._covered[cid] = self._covered.get(cid, 0) + 1

    def unpin(self, bid: Hashable) -> None:
        entry = self._pins.get(bid)
        if entry is None:
            return
        entry[0] -= 1
        if entry[0]:
            return
        del self._pins[bid]
        self._pinned_blocks -= entry[1]
        for cid in entry[2]:
            n = self._covered[cid] - 1
            if n:
                self._covered[cid] = n
            else:
                del self._covered[cid]

    def unpin_all(self) -> None:
        self._pins.clear()
        self._covered.clear()
        self._pinned_blocks = 0

    @property
    def pinned(self) -> frozenset:
        return frozenset(self._pins)

    @property
    def pinned_blocks(self) -> int:
        return self._pinned_blocks

    # -- counters ------------------------------------------------------------
    def snapshot_counters(self) -> tuple[int, int]:
        return self.counter.snapshot()

    def reset_counters(self) -> None:
        self.counter.reset()

    @property
    def total_ios(self) -> int:
        return self.counter.total


def snapshot_counters(store: BlockStore) -> tuple[int, int]:
    return store.snapshot_counters()


def reset_counters(store: BlockStore) -> None:
    store.reset_counters()
