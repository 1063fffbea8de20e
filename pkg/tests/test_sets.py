import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wcoj.sets import (
    AUTO_POLICY,
    BITSET,
    FORCE_BITSET_POLICY,
    FORCE_UINT_POLICY,
    UINT_ARRAY,
    BitsetSet,
    LayoutPolicy,
    ProbeCounter,
    UintArraySet,
    choose_layout,
    set_contains,
    set_intersect,
)


def _mk(values, layout=None):
    arr = np.asarray(sorted(set(values)), dtype=np.uint32)
    if layout is None:
        return choose_layout(arr)
    policy = FORCE_UINT_POLICY if layout == UINT_ARRAY else FORCE_BITSET_POLICY
    return choose_layout(arr, policy)


def _density_rule_oracle(values) -> str:
    """Independent restatement of the layout rule, exact arithmetic."""
    values = sorted(set(values))
    if len(values) <= 1:
        return UINT_ARRAY
    span = values[-1] - values[0] + 1
    return BITSET if Fraction(len(values), span) > Fraction(1, 256) else UINT_ARRAY


def test_dense_run_is_bitset():
    assert choose_layout(np.arange(256, dtype=np.uint32)).tag == BITSET


def test_sparse_pair_is_uint_array():
    assert _mk([0, 25600]).tag == UINT_ARRAY


def test_singleton_exception():
    # density 1 would demand a bitset; singletons stay arrays by design
    assert _mk([123456]).tag == UINT_ARRAY


def test_empty_is_uint_array():
    s = _mk([])
    assert s.tag == UINT_ARRAY and s.cardinality == 0


def test_layout_matches_density_rule_on_random_sets():
    rng = random.Random(11)
    for _ in range(10000):
        n = rng.randrange(2, 30)
        span = rng.randrange(1, 4000)
        base = rng.randrange(0, 100000)
        values = {base + rng.randrange(span + 1) for _ in range(n)}
        assert _mk(values).tag == _density_rule_oracle(values)


def test_contains_trivial():
    assert set_contains(_mk([2, 3]), 3)
    assert not set_contains(_mk([]), 7)


def test_contains_random_vs_linear_scan():
    rng = random.Random(5)
    for layout in (UINT_ARRAY, BITSET):
        values = sorted(rng.sample(range(5000), 400))
        s = _mk(values, layout)
        for _ in range(10000):
            v = rng.randrange(6000)
            assert set_contains(s, v) == any(x == v for x in values)


def test_uint_probe_is_logarithmic():
    values = list(range(0, 4096, 2))
    s = _mk(values, UINT_ARRAY)
    bound = math.ceil(math.log2(len(values))) + 2
    rng = random.Random(1)
    for _ in range(200):
        counter = ProbeCounter()
        s.contains(rng.randrange(5000), counter)
        assert counter.comparisons <= bound


def test_bitset_probe_touches_one_word():
    s = _mk(range(1000), BITSET)
    counter = ProbeCounter()
    s.contains(999, counter)
    assert counter.words_touched == 1
    counter = ProbeCounter()
    s.contains(10**6, counter)  # out of range: rejected without a word read
    assert counter.words_touched == 0


def test_intersect_trivial():
    assert set_intersect(_mk([1, 2, 3]), _mk([2, 3, 4])).tolist() == [2, 3]
    assert set_intersect(_mk([1, 2]), _mk([])).cardinality == 0


def _oracle_intersect(a_values, b_values):
    """Nested-membership oracle: probe each element of a into b."""
    b = list(b_values)
    return sorted(v for v in a_values if any(v == x for x in b))


@pytest.mark.parametrize("la", [UINT_ARRAY, BITSET])
@pytest.mark.parametrize("lb", [UINT_ARRAY, BITSET])
def test_intersect_all_pairings_vs_oracle(la, lb):
    rng = random.Random(hash((la, lb)) & 0xFFFF)
    for _ in range(500):
        span = rng.choice([40, 400, 40000])
        a = [rng.randrange(span) for _ in range(rng.randrange(1, 60))]
        b = [rng.randrange(span) for _ in range(rng.randrange(1, 60))]
        got = set_intersect(_mk(a, la), _mk(b, lb))
        assert got.tolist() == _oracle_intersect(set(a), set(b))


def test_result_layout_follows_policy():
    a = _mk(range(0, 512), BITSET)
    b = _mk(range(256, 768), BITSET)
    out = set_intersect(a, b)
    assert out.tolist() == list(range(256, 512))
    assert out.tag == BITSET  # dense result stays a bitset under auto
    forced = set_intersect(a, b, FORCE_UINT_POLICY)
    assert forced.tag == UINT_ARRAY and forced.tolist() == out.tolist()


small_sets = st.sets(st.integers(min_value=0, max_value=2000), max_size=50)


@given(small_sets, small_sets)
def test_layout_transparency(a, b):
    """Any layout combination represents the same set and intersects alike."""
    expect = sorted(a & b)
    for la in (UINT_ARRAY, BITSET):
        sa = _mk(a, la)
        assert sa.tolist() == sorted(a)
        for lb in (UINT_ARRAY, BITSET):
            assert set_intersect(sa, _mk(b, lb)).tolist() == expect


@given(small_sets, small_sets, small_sets)
def test_intersection_algebra(a, b, c):
    sa, sb, sc = _mk(a), _mk(b), _mk(c)
    ab = set_intersect(sa, sb)
    ba = set_intersect(sb, sa)
    assert ab.tolist() == ba.tolist()  # commutative
    left = set_intersect(ab, sc)
    right = set_intersect(sa, set_intersect(sb, sc))
    assert left.tolist() == right.tolist()  # associative
    assert set_intersect(sa, sa).tolist() == sa.tolist()  # idempotent
    assert ab.cardinality <= min(sa.cardinality, sb.cardinality)


def test_bitset_invariants():
    s = _mk(range(100, 400, 2), BITSET)
    assert isinstance(s, BitsetSet)
    assert s.offset % 64 == 0
    assert s.cardinality == int(np.bitwise_count(s.words).sum())
    assert s.min_value == 100 and s.max_value == 398


def test_uint_values_strictly_increasing():
    s = _mk([5, 3, 9, 3], UINT_ARRAY)
    assert isinstance(s, UintArraySet)
    assert np.all(np.diff(s.values.astype(np.int64)) > 0)


def test_equality_is_layout_independent():
    a = _mk(range(64), UINT_ARRAY)
    b = _mk(range(64), BITSET)
    assert a == b


def test_policy_threshold_is_rational():
    assert LayoutPolicy().density_threshold == Fraction(1, 256)
    assert AUTO_POLICY.force is None
