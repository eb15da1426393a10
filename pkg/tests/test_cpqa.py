import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from emskyline import cpqa as C
from emskyline import pseq
from emskyline.emblock import BlockStore


def model_cat(a, b):
    if not b:
        return list(a)
    return [x for x in a if x < b[0]] + list(b)


def q_of(seq, b=2, store=None):
    store = store or BlockStore(16)
    return C.Cpqa.from_sequence(seq, b, store)


@pytest.fixture
def store():
    return BlockStore(16)


# -- worked examples --------------------------------------------------------

def test_find_min(store):
    assert C.find_min(q_of([3, 7, 9], store=store)) == 3
    assert C.find_min(C.Cpqa.singleton(5, 2, store)) == 5
    with pytest.raises(C.EmptyQueueError):
        C.find_min(C.Cpqa.empty(2, store))


def test_delete_min(store):
    e, q = C.delete_min(q_of([1, 4, 5, 9], store=store))
    assert e == 1 and C.drain(q) == [4, 5, 9]
    e, q = C.delete_min(C.Cpqa.singleton(5, 2, store))
    assert e == 5 and not q
    with pytest.raises(C.EmptyQueueError):
        C.delete_min(q)


def test_delete_min_fill_takes_b_from_first_clean(store):
    # b=2, |F|=2, first(C) = (3,4,5,6)
    q = C.Cpqa.from_sorted(range(1, 11), 2, store)
    q = C.Cpqa(2, store, F=(1, 2), C=pseq.from_items(
        [C.Record((3, 4, 5, 6), None, store), C.Record((7, 8, 9, 10), None, store)]))
    e, q2 = C.delete_min(q)
    assert e == 1
    assert q2.F == (2, 3, 4)
    assert C.check_invariants(q2)


@pytest.mark.parametrize("seq,e,expect", [
    ([2, 7, 8], 5, [2, 5]),
    ([], 9, [9]),
    ([1, 2, 3], 0, [0]),
])
def test_insert_and_attrite(store, seq, e, expect):
    assert C.drain(C.insert_and_attrite(q_of(seq, store=store), e)) == expect


def test_catenate_examples(store):
    a = q_of([1, 4, 6], store=store)
    assert C.drain(C.catenate_and_attrite(a, q_of([5, 9], store=store))) == [1, 4, 5, 9]
    assert C.drain(C.catenate_and_attrite(a, q_of([0, 2], store=store))) == [0, 2]


def test_catenate_empty_operands(store):
    a = q_of([1, 2, 3], store=store)
    e = C.Cpqa.empty(2, store)
    assert C.catenate_and_attrite(a, e) is a
    assert C.catenate_and_attrite(e, a) is a


def test_catenate_mismatch():
    s1, s2 = BlockStore(8), BlockStore(8)
    with pytest.raises(C.QueueMismatchError):
        C.catenate_and_attrite(q_of([1], b=2, store=s1), q_of([2], b=1, store=s1))
    with pytest.raises(C.QueueMismatchError):
        C.catenate_and_attrite(q_of([1], store=s1), q_of([2], store=s2))


def test_b_bounds(store):
    with pytest.raises(ValueError):
        C.Cpqa.empty(0, store)
    with pytest.raises(ValueError):
        C.Cpqa.empty(17, store)


def test_multi_catenate_examples(store):
    qs = [q_of(s, store=store) for s in ([3, 9], [5, 8], [2, 6])]
    assert C.drain(C.multi_catenate(qs)) == [2, 6]
    qs = [q_of(s, store=store) for s in ([1, 2], [3, 4], [5, 6])]
    assert C.drain(C.multi_catenate(qs)) == [1, 2, 3, 4, 5, 6]


def test_multi_catenate_rejects_unready(store):
    r = C.Record((10, 11), None, store)
    bad = C.Cpqa(1, store, F=(1,), D=pseq.single(pseq.single(r)))
    with pytest.raises(C.LemmaPreconditionError, match="queue 1"):
        C.multi_catenate([q_of([0], store=store), bad])


def test_multi_catenate_random_zero_reads():
    rng = random.Random(7)
    st_ = BlockStore(16, 10**6)
    uid = 0
    qs, models = [], []
    for _ in range(64):
        elems = []
        for _ in range(rng.randint(0, 40)):
            uid += 1
            elems.append((rng.randint(0, 50), uid))
        q = C.Cpqa.from_sequence(elems[:10], 2, st_)
        m = C.drain(q)
        for e in elems[10:]:
            q = C.insert_and_attrite(q, e)
            m = model_cat(m, [e])
        qs.append(C.prepare(q))
        models.append(m)
    for q in qs:
        C.pin_critical(q)
    st_.reset_counters()
    out = C.multi_catenate(qs)
    assert st_.counter.reads == 0
    expect = []
    for m in reversed(models):
        expect = model_cat(m, expect)
    assert C.drain(out) == expect


def test_delta_and_potential(store):
    recs = [C.Record((i,), None, store) for i in range(3)]
    d = C.Record((10,), None, store)
    q = C.Cpqa(1, store, F=(-1,), C=pseq.from_items(recs), D=pseq.single(pseq.single(d)))
    assert C.delta_state(q) == 1
    b = 4
    big = C.Cpqa.from_sorted(range(40), b, store)
    big = big._with(F=tuple(range(-2 * b, 0)))
    assert C.potential(big).phi_f == 1
    small = C.Cpqa.from_sorted([1, 2, 3], b, store)
    assert C.potential(small).phi_total == Fraction(9, 4)


def test_bias_moves_clean_dirty_record(store):
    # k=1, first(D1) simple with max < min(L): goes to C, state +2
    r = C.Record((10, 11), None, store)
    r2 = C.Record((14,), None, store)
    C3 = pseq.from_items([C.Record((i,), None, store) for i in (2, 3, 4)])
    q = C.Cpqa(1, store, F=(1,), C=C3,
               D=pseq.single(pseq.from_items([r, r2])), L=(20,))
    d0 = C.delta_state(q)
    q2 = C.bias(q)
    assert C.delta_state(q2) == d0 + 2
    assert pseq.last(q2.C) is r


def test_bias_discards_last_dirty_deque(store):
    r1 = C.Record((10,), None, store)
    r2 = C.Record((12,), None, store)
    D = pseq.from_items([pseq.single(r1), pseq.single(r2)])
    C3 = pseq.from_items([C.Record((i,), None, store) for i in (2, 3, 4)])
    q = C.Cpqa(1, store, F=(1,), C=C3, D=D, L=(11,))
    q2 = C.bias(q)
    assert C.delta_state(q2) >= C.delta_state(q) + 2
    assert C.drain(q2) == C.drain(q)


def test_fill_examples(store):
    b = 2
    # |F| = b-1 and a long first clean record: F grows by b
    q = C.Cpqa(b, store, F=(0,), C=pseq.single(C.Record(tuple(range(1, 6)), None, store)))
    assert C.fill(q).F == (0, 1, 2)
    # short first record: consumed whole
    q = C.Cpqa(b, store, F=(0,), C=pseq.single(C.Record((1, 2, 3), None, store)))
    q2 = C.fill(q)
    assert q2.F == (0, 1, 2, 3) and q2.C is None
    small = C.Cpqa(b, store, F=(0,))
    assert C.fill(small) is small


# -- model equivalence ----------------------------------------------------

def random_run(seed, b, steps, Bk=16):
    rng = random.Random(seed)
    st_ = BlockStore(Bk, 10**6)
    pool = []
    uid = 0
    for step in range(steps):
        op = rng.random()
        if op < 0.3 or len(pool) < 2:
            elems = []
            base = rng.randint(0, 200)
            for _ in range(rng.randint(0, 6 * b)):
                uid += 1
                elems.append((base + rng.randint(-10, 30), uid))
            m = []
            for e in elems:
                m = model_cat(m, [e])
            pool.append((C.Cpqa.from_sequence(elems, b, st_), m))
        elif op < 0.65:
            (q1, m1), (q2, m2) = rng.choice(pool), rng.choice(pool)
            pool.append((C.catenate_and_attrite(q1, q2), model_cat(m1, m2)))
        elif op < 0.85:
            q, m = rng.choice(pool)
            uid += 1
            e = (rng.randint(0, 300), uid)
            pool.append((C.insert_and_attrite(q, e), model_cat(m, [e])))
        else:
            q, m = rng.choice(pool)
            if not m:
                continue
            e, q2 = C.delete_min(q)
            assert e == m[0]
            pool.append((q2, m[1:]))
        q, m = pool[-1]
        rep = C.check_invariants(q)
        assert rep, (seed, step, rep.violation)
        assert C.logical_content(q) == m
        assert len(pool[-1][0]) >= len(m)
        if len(pool) > 24:
            pool.pop(rng.randrange(len(pool) - 1))
    return pool


@pytest.mark.parametrize("b", [1, 2, 4, 8])
def test_random_model_equivalence(b):
    for seed in range(8):
        pool = random_run(seed, b, 250)
        for q, m in pool:
            assert C.drain(q) == m


def test_persistence_old_versions_intact():
    st_ = BlockStore(8)
    q = C.Cpqa.from_sorted(range(50), 2, st_)
    before = C.drain(q)
    q2 = C.insert_and_attrite(q, 25)
    C.delete_min(q2)
    C.catenate_and_attrite(q2, C.Cpqa.from_sorted([3, 4], 2, st_))
    assert C.drain(q) == before
    assert C.drain(q2) == list(range(25)) + [25]


@given(st.lists(st.lists(st.integers(0, 60), max_size=30), min_size=1, max_size=6),
       st.sampled_from([1, 2, 3]))
def test_property_fold_matches_model(chunks, b):
    st_ = BlockStore(12)
    uid = 0
    acc_q, acc_m = C.Cpqa.empty(b, st_), []
    for ch in chunks:
        elems = []
        for v in ch:
            uid += 1
            elems.append((v, uid))
        m = []
        for e in elems:
            m = model_cat(m, [e])
        acc_q = C.catenate_and_attrite(acc_q, C.Cpqa.from_sequence(elems, b, st_))
        acc_m = model_cat(acc_m, m)
        assert C.check_invariants(acc_q)
    out = C.drain(acc_q)
    assert out == acc_m
    assert all(x < y for x, y in zip(out, out[1:]))


@given(st.lists(st.integers(-50, 50), max_size=80), st.sampled_from([1, 2, 4]))
def test_property_bias_preserves_content(vals, b):
    st_ = BlockStore(16)
    q = C.Cpqa.empty(b, st_)
    for i, v in enumerate(vals):
        q = C.insert_and_attrite(q, (v, i))
        if i % 7 == 3:
            q = C.catenate_and_attrite(q, C.Cpqa.from_sorted([(v + 1, -i)], b, st_))
    before = C.drain(q)
    d0 = C.delta_state(q)
    q2 = C.bias(q)
    assert C.drain(q2) == before
    assert C.check_invariants(q2)
    if q.top_records and q2 is not q and not (q.D is None and q.B is None):
        assert C.delta_state(q2) >= d0 + 1


def test_space_bound():
    b = 4
    st_ = BlockStore(16)
    q = C.Cpqa.empty(b, st_)
    for i in range(5000):
        q = C.insert_and_attrite(q, i)
    for _ in range(3000):
        _, q = C.delete_min(q)
    assert C.blocks_used(q) <= 2 * (q.total) / b + 4


def test_critical_records_bounded(store):
    q = C.Cpqa.empty(2, store)
    rng = random.Random(3)
    for i in range(500):
        q = C.insert_and_attrite(q, (rng.randint(0, 400), i))
        assert len(C.critical_records(q)) <= 11
