import pytest
from hypothesis import given, strategies as st

from emskyline.geom import (PLANE, Oracle, Point, QueryRect, dominates, is_staircase, mirror_y,
                            read_points_csv, read_queries_csv, rect, skyline_oracle,
                            skyline_scan, swap_axes, with_ids, write_points_csv,
                            write_queries_csv)

P4 = with_ids([(1, 5), (2, 3), (4, 4), (6, 2)])
points = st.lists(st.tuples(st.integers(0, 12), st.integers(0, 12)), max_size=25).map(with_ids)


def xy(ps):
    return [(p.x, p.y) for p in ps]


def test_dominates():
    assert dominates(Point(2, 2), Point(1, 1))
    assert not dominates(Point(1, 3), Point(3, 1))
    with pytest.raises(ValueError):
        dominates(Point(5, 0), Point(5, 0))


def test_oracle_examples():
    assert xy(skyline_oracle(P4, QueryRect.top_open(1, 6, 3))) == [(1, 5), (4, 4)]
    assert xy(skyline_oracle(with_ids([(1, 1), (2, 2)]))) == [(2, 2)]
    assert xy(skyline_oracle(P4, QueryRect.four_sided(2, 6, 2, 4))) == [(4, 4), (6, 2)]


def test_transforms():
    assert mirror_y([Point(3, 7)]) == [Point(3, -7)]
    assert swap_axes([Point(3, 7)]) == [Point(7, 3)]


def test_rect_infers_kind():
    assert rect(1, 2, 3).kind == "top-open"
    assert rect(x_hi=4, y_hi=5).kind == "anti-dominance"
    assert rect().kind == "free"
    with pytest.raises(ValueError):
        QueryRect(1, 2, 3, 4, "top-open")


@given(points)
def test_scan_matches_oracle(ps):
    q = QueryRect.four_sided(2, 10, 1, 11)
    assert skyline_scan(ps, q) == skyline_oracle(ps, q)
    assert skyline_scan(ps) == skyline_oracle(ps)


@given(points)
def test_oracle_idempotent_and_staircase(ps):
    a = skyline_oracle(ps, PLANE)
    assert skyline_oracle(a, PLANE) == a
    assert is_staircase(a)
    for i, p in enumerate(a):
        for q in a[i + 1:]:
            assert not dominates(p, q) and not dominates(q, p)


@given(points)
def test_swap_preserves_maxima(ps):
    assert set(skyline_oracle(swap_axes(ps))) == set(swap_axes(skyline_oracle(ps)))
    assert swap_axes(swap_axes(ps)) == ps


def test_csv_round_trip(tmp_path):
    write_points_csv(tmp_path / "p.csv", P4)
    assert read_points_csv(tmp_path / "p.csv") == P4
    qs = [QueryRect.top_open(1, 6, 3), QueryRect.four_sided(2, 6, 2, 4),
          QueryRect.right_open(0, 1, 9)]
    write_queries_csv(tmp_path / "q.csv", qs)
    assert read_queries_csv(tmp_path / "q.csv") == qs


@given(st.lists(st.tuples(st.integers(0, 30), st.integers(0, 30)), min_size=65, max_size=200))
def test_vectorised_oracle_matches_pairwise_loop(coords):
    ps = with_ids(coords)
    loop = [p for p in ps if not any(o != p and dominates(o, p) for o in ps)]
    assert skyline_oracle(ps) == sorted(loop, key=lambda p: (p.x, p.y, p.id))


@given(points, st.integers(-1, 13), st.integers(-1, 13), st.integers(-1, 13))
def test_oracle_class_matches_function(ps, a, b, c):
    q = QueryRect.top_open(min(a, b), max(a, b), c)
    O = Oracle(ps)
    assert O(q) == skyline_oracle(ps, q)
    assert O() == skyline_oracle(ps)
