import random

import pytest
from hypothesis import given, strategies as st

from emskyline import static_topopen as S
from emskyline.emblock import BlockStore
from emskyline.geom import INF, Point, QueryRect, skyline_oracle, skyline_scan, with_ids, xkey

P3 = with_ids([(1, 2), (2, 1), (3, 3)])


def seg(x_lo, x_hi, y):
    return S.Segment(x_lo, x_hi, y, 0)


def random_points(rng, n, spread=None):
    spread = spread or 10 * n + 1
    return sorted((Point(rng.randrange(spread), rng.randrange(spread), i) for i in range(n)),
                  key=xkey)


def test_sigma_examples():
    got = [(s.x_lo, s.x_hi, s.y) for s in S.compute_sigma(P3)]
    assert got == [(2, 3, 1), (1, 3, 2), (3, INF, 3)]
    assert [(s.x_lo, s.x_hi, s.y) for s in S.compute_sigma(with_ids([(1, 1)]))] == [(1, INF, 1)]
    stair = S.compute_sigma(with_ids([(1, 3), (2, 2), (3, 1)]))
    assert all(s.x_hi == INF for s in stair)


def test_verify_sigma_properties_examples():
    assert not S.verify_sigma_properties([seg(1, 4, 1), seg(2, 6, 2)])
    assert S.verify_sigma_properties([seg(1, 4, 1)])
    rng = random.Random(3)
    sig = S.compute_sigma(random_points(rng, 1000))
    assert S.verify_sigma_properties(sig)


@given(st.lists(st.tuples(st.integers(0, 15), st.integers(0, 15)), max_size=30))
def test_sigma_checkers_agree(coords):
    pts = sorted(with_ids(coords), key=xkey)
    sig = list(S.compute_sigma(pts))
    assert S.verify_sigma_properties(sig)
    assert S.verify_sigma_brute(sig)
    # disturb one segment and the two checkers must still agree
    if len(sig) > 1:
        s = sig[0]
        sig[0] = s._replace(x_hi=s.x_hi + 2 if s.x_hi != INF else s.x_lo + 3)
        assert bool(S.verify_sigma_properties(sig)) == bool(S.verify_sigma_brute(sig))


def test_query_examples():
    T = S.StaticTopOpen(P3, block=4)
    assert T.query(1, 3, 1) == [Point(3, 3, 2)]
    assert T.query(-5, 0, -INF) == []
    assert T.range_max_y(1, 2) == 2
    assert T.range_max_y(1, 3) == 3
    assert T.range_max_y(10, 20) == -INF


def test_empty_structure():
    T = S.StaticTopOpen([], block=8)
    assert T.query(0, 10, 0) == []


def test_small_block_rejected():
    with pytest.raises(ValueError):
        S.StaticTopOpen(P3, block=2)


@pytest.mark.parametrize("B", [4, 8, 16])
def test_random_queries_and_snapshots(B):
    rng = random.Random(B)
    pts = random_points(rng, 1000)
    T = S.StaticTopOpen(pts, block=B)
    for _ in range(200):
        x = rng.randrange(10 * 1000)
        expect = sorted((s for s in T.sigma if s.x_lo <= x < s.x_hi),
                        key=lambda s: (s.y, s.x_lo, s.owner))
        assert T.snapshot(x) == expect
    for _ in range(300):
        a1 = rng.randrange(-10, 10010)
        a2 = rng.randint(a1, 10010)
        b = rng.randrange(-10, 10010)
        assert T.query(a1, a2, b) == skyline_scan(pts, QueryRect.top_open(a1, a2, b))


def test_anti_correlated_multi_level_tree():
    rng = random.Random(7)
    n = 2000
    pts = sorted((Point(3 * i + rng.randint(0, 5), 10 * n - 10 * i + rng.randint(-40, 40), i)
                  for i in range(n)), key=xkey)
    T = S.StaticTopOpen(pts, block=4)
    assert T.height > 1
    assert S.verify_sigma_properties(T.sigma1())
    for level in T.sigma_levels:
        assert S.verify_sigma_properties(level)
    for _ in range(200):
        a1 = rng.randrange(3 * n)
        a2 = rng.randint(a1, 3 * n)
        b = rng.randrange(10 * n)
        assert T.query(a1, a2, b) == skyline_scan(pts, QueryRect.top_open(a1, a2, b))


@given(st.lists(st.tuples(st.integers(0, 9), st.integers(0, 9)), max_size=40),
       st.integers(-1, 10), st.integers(-1, 10), st.integers(-1, 10))
def test_ties_match_oracle(coords, a, w, b):
    pts = sorted(with_ids(coords), key=xkey)
    T = S.StaticTopOpen(pts, block=4)
    q = QueryRect.top_open(a, a + abs(w), b)
    assert T.query(q.x_lo, q.x_hi, b) == skyline_oracle(pts, q)


def test_build_is_linear():
    ios = []
    for n in (1 << 12, 1 << 13):
        st_ = BlockStore(16)
        S.StaticTopOpen(random_points(random.Random(n), n), store=st_)
        ios.append(st_.total_ios)
    assert 1.6 <= ios[1] / ios[0] <= 2.4
