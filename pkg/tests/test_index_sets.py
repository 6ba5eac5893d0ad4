"""Index-set checks against a brute-force sweep oracle."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from abset.index_sets import IndexSet, longest_complement_run


def sweep_members(s: IndexSet, h: int):
    return [j for j in range(1, h + 1) if s.contains(j)]


def sweep_longest_run(s: IndexSet, h: int):
    best = (1, 0)
    start, ln = 1, 0
    for j in range(1, h + 1):
        if s.contains(j):
            start, ln = j + 1, 0
        else:
            ln += 1
            if ln > best[1]:
                best = (start, ln)
    return best if best[1] else (1, 0)


# -- frozen examples ----------------------------------------------------------

def test_longest_run_examples():
    assert longest_complement_run(IndexSet.multiples_of(3), 10) == (1, 2)
    assert longest_complement_run(IndexSet.empty(), 10) == (1, 10)
    j = IndexSet.union(IndexSet.interval(4, 6), IndexSet.finite([9]))
    # runs [1,3], [7,8], [10,12]; tie between length-3 runs -> smallest start
    assert longest_complement_run(j, 12) == (1, 3)


def test_longest_run_guards():
    with pytest.raises(ValueError):
        longest_complement_run(IndexSet.empty(), 0)
    with pytest.raises(ValueError):
        longest_complement_run(IndexSet.empty(), 10 ** 6 + 1)


def test_interval_counts():
    s = IndexSet.interval(5, 9)
    assert s.count_up_to(4) == 0
    assert s.count_up_to(7) == 3
    assert s.count_up_to(100) == 5
    assert s.density_up_to(10) == Fraction(1, 2)


def test_strided_counts_match_sweep():
    s = IndexSet.strided(offset=3, period=5, block_len=2, reps=4)
    members = sweep_members(s, 40)
    assert members == [3, 4, 8, 9, 13, 14, 18, 19]
    for h in range(1, 41):
        assert s.count_up_to(h) == len([m for m in members if m <= h])


def test_multiples_infinite():
    s = IndexSet.multiples_of(3)
    assert s.count_up_to(10) == 3
    assert s.count_up_to(3 * 10 ** 17) == 10 ** 17


def test_nested_blocks_basic():
    # inner unit of period 10 holds positions 6..9; two layers:
    # outer period 100 x 3 units, inner period 10 x 7 units
    s = IndexSet.nested_blocks(origin=6, block_len=4, layers=[(100, 3), (10, 7)])
    members = sweep_members(s, 400)
    expect = [o * 100 + i * 10 + r + 1
              for o in range(3) for i in range(7) for r in range(6, 10)]
    assert members == [m for m in expect if m <= 400]
    for h in (1, 9, 10, 77, 99, 100, 250, 299, 300, 400):
        assert s.count_up_to(h) == len([m for m in members if m <= h])


def test_nested_blocks_rejects_overflowing_layers():
    with pytest.raises(ValueError):
        IndexSet.nested_blocks(origin=8, block_len=5, layers=[(10, 2)])


def test_union_counts_additive_when_disjoint():
    s = IndexSet.union(IndexSet.interval(1, 3), IndexSet.finite([10, 20]),
                       IndexSet.strided(offset=30, period=10, block_len=2, reps=3))
    assert s.count_up_to(100) == 3 + 2 + 6
    assert sorted(sweep_members(s, 100)) == [1, 2, 3, 10, 20, 30, 31, 40, 41, 50, 51]


def test_iter_members_capped():
    with pytest.raises(ValueError):
        list(IndexSet.empty().iter_members(10 ** 6 + 1))


# -- property tests -----------------------------------------------------------

@st.composite
def random_sets(draw):
    kinds = []
    n = draw(st.integers(1, 3))
    for _ in range(n):
        kind = draw(st.integers(0, 3))
        if kind == 0:
            a = draw(st.integers(1, 50))
            b = draw(st.integers(a, a + 30))
            kinds.append(IndexSet.interval(a, b))
        elif kind == 1:
            kinds.append(IndexSet.finite(draw(st.lists(st.integers(1, 80), max_size=6))))
        elif kind == 2:
            period = draw(st.integers(2, 12))
            blen = draw(st.integers(1, period))
            kinds.append(IndexSet.strided(draw(st.integers(1, 20)), period, blen,
                                          draw(st.one_of(st.none(), st.integers(0, 5)))))
        else:
            blen = draw(st.integers(1, 3))
            origin = draw(st.integers(0, 4))
            inner = origin + blen + draw(st.integers(0, 3))
            inner_count = draw(st.integers(1, 3))
            outer = inner * inner_count + draw(st.integers(0, 5))
            kinds.append(IndexSet.nested_blocks(origin, blen,
                                                [(outer, draw(st.integers(1, 3))),
                                                 (inner, inner_count)]))
    return IndexSet.union(*kinds)


@settings(max_examples=100)
@given(random_sets(), st.integers(1, 120))
def test_longest_run_matches_sweep(s, h):
    assert longest_complement_run(s, h) == sweep_longest_run(s, h)


@settings(max_examples=100)
@given(random_sets(), st.integers(1, 120))
def test_single_component_count_matches_sweep(s, h):
    # membership-based count is always exact; the additive fast path is
    # only claimed for disjoint unions, so compare per component
    for comp in s.components:
        single = IndexSet([comp])
        assert single.count_up_to(h) == len(sweep_members(single, h))
