import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from wcoj.dictionary import Dictionary
from wcoj.errors import CapacityError, UnknownKeyError


def test_encode_idempotent():
    d = Dictionary()
    assert d.encode("a") == d.encode("a")


def test_first_key_is_zero():
    d = Dictionary()
    assert d.encode("anything") == 0


def test_dense_keys_for_random_terms():
    rng = random.Random(0)
    terms = {f"t{rng.randrange(10**9)}" for _ in range(2000)}
    terms = sorted(terms)[:1000]
    d = Dictionary()
    keys = {d.encode(t) for t in terms}
    assert len(keys) == 1000
    assert keys == set(range(1000))  # dense range [0, next_key)
    assert d.next_key == 1000


def test_roundtrip():
    d = Dictionary()
    assert d.decode(d.encode("http://x")) == "http://x"


def test_decode_out_of_range():
    d = Dictionary()
    d.encode("a")
    with pytest.raises(UnknownKeyError):
        d.decode(d.next_key)


def test_bulk_decode_matches_deduplicated_input():
    rng = random.Random(7)
    seq = [f"term{rng.randrange(300)}" for _ in range(5000)]
    d = Dictionary()
    for t in seq:
        d.encode(t)
    decoded = [d.decode(k) for k in range(d.next_key)]
    seen: list[str] = []
    for t in seq:  # first-seen order, deduplicated
        if t not in seen:
            seen.append(t)
    assert decoded == seen


def test_capacity_guard():
    class _Full:  # stands in for a maximally grown term list
        def __len__(self):
            return 2**32

    d = Dictionary()
    d._reverse = _Full()
    with pytest.raises(CapacityError):
        d.encode("one-too-many")


@given(st.lists(st.text(min_size=1, max_size=8), min_size=1, max_size=40))
def test_roundtrip_and_determinism(terms):
    d1, d2 = Dictionary(), Dictionary()
    for t in terms:
        k1, k2 = d1.encode(t), d2.encode(t)
        assert k1 == k2  # same sequence, same assignment
    for t in terms:
        assert d1.decode(d1.encode(t)) == t
    assert d1.next_key == len(set(terms))
