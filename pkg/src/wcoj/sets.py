"""Adaptive set layouts: sorted uint32 arrays and word-aligned bitsets.

Every trie level is one of these two layouts, picked per set by a density
rule: a set becomes a bitset when more than one value out of every 256 in its
own value span [min, max] is present. Both layouts represent the same
abstract sorted set of uint32 keys; every operation is layout-transparent.

Layout exceptions, deliberate and test-covered:
  * the empty set is always a (zero-length) uint array;
  * singletons are always a uint array — density 1 would force a bitset, and
    a one-element bitset wastes a word without changing any operation result.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

UINT_ARRAY = "UINT_ARRAY"
BITSET = "BITSET"

_WORD_BITS = 64
_EMPTY_U32 = np.empty(0, dtype=np.uint32)


@dataclass(frozen=True)
class LayoutPolicy:
    """Density rule for picking a layout, plus an optional global override."""

    density_threshold: Fraction = Fraction(1, 256)
    force: str | None = None  # None (auto) | UINT_ARRAY | BITSET

    def wants_bitset(self, cardinality: int, vmin: int, vmax: int) -> bool:
        if cardinality <= 1:
            return False  # empty/singleton exception
        span = vmax - vmin + 1
        t = self.density_threshold
        return cardinality * t.denominator > span * t.numerator


AUTO_POLICY = LayoutPolicy()
FORCE_UINT_POLICY = LayoutPolicy(force=UINT_ARRAY)
FORCE_BITSET_POLICY = LayoutPolicy(force=BITSET)


class ProbeCounter:
    """Counts work done by membership probes (for cost-shape assertions)."""

    __slots__ = ("comparisons", "words_touched")

    def __init__(self) -> None:
        self.comparisons = 0
        self.words_touched = 0


class UintArraySet:
    """Strictly increasing uint32 values; membership via binary search."""

    tag = UINT_ARRAY
    __slots__ = ("values",)

    def __init__(self, values: np.ndarray):
        self.values = values

    @property
    def cardinality(self) -> int:
        return len(self.values)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def min_value(self) -> int:
        return int(self.values[0])

    @property
    def max_value(self) -> int:
        return int(self.values[-1])

    def contains(self, v: int, counter: ProbeCounter | None = None) -> bool:
        values = self.values
        if counter is None:
            i = int(np.searchsorted(values, v))
            return i < len(values) and int(values[i]) == v
        lo, hi = 0, len(values)
        while lo < hi:
            mid = (lo + hi) // 2
            counter.comparisons += 1
            if int(values[mid]) < v:
                lo = mid + 1
            else:
                hi = mid
        if lo >= len(values):
            return False
        counter.comparisons += 1
        return int(values[lo]) == v

    def to_array(self) -> np.ndarray:
        return self.values

    def tolist(self) -> list[int]:
        return self.values.tolist()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, (UintArraySet, BitsetSet)):
            return NotImplemented
        return np.array_equal(self.to_array(), other.to_array())

    def __repr__(self) -> str:
        return f"UintArraySet({self.values.tolist()!r})"


class BitsetSet:
    """Word-aligned bitset: bit i of the word block is value offset + i."""

    tag = BITSET
    __slots__ = ("offset", "words", "cardinality")

    def __init__(self, offset: int, words: np.ndarray, cardinality: int):
        self.offset = offset
        self.words = words
        self.cardinality = cardinality

    def __len__(self) -> int:
        return self.cardinality

    @property
    def min_value(self) -> int:
        w = self.words
        i = int(np.flatnonzero(w)[0])
        word = int(w[i])
        return self.offset + i * _WORD_BITS + ((word & -word).bit_length() - 1)

    @property
    def max_value(self) -> int:
        w = self.words
        i = int(np.flatnonzero(w)[-1])
        return self.offset + i * _WORD_BITS + (int(w[i]).bit_length() - 1)

    def contains(self, v: int, counter: ProbeCounter | None = None) -> bool:
        bit = v - self.offset
        if bit < 0 or bit >= len(self.words) * _WORD_BITS:
            return False
        if counter is not None:
            counter.words_touched += 1
        word = int(self.words[bit >> 6])
        return (word >> (bit & 63)) & 1 == 1

    def to_array(self) -> np.ndarray:
        bits = np.unpackbits(self.words.view(np.uint8), bitorder="little")
        return (np.flatnonzero(bits) + self.offset).astype(np.uint32)

    def tolist(self) -> list[int]:
        return self.to_array().tolist()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, (UintArraySet, BitsetSet)):
            return NotImplemented
        return np.array_equal(self.to_array(), other.to_array())

    def __repr__(self) -> str:
        return f"BitsetSet(offset={self.offset}, values={self.tolist()!r})"


SetLayout = UintArraySet | BitsetSet

EMPTY_SET = UintArraySet(_EMPTY_U32)


def _build_bitset(values: np.ndarray) -> BitsetSet:
    vmin = int(values[0])
    vmax = int(values[-1])
    offset = (vmin >> 6) << 6
    n_words = ((vmax - offset) >> 6) + 1
    words = np.zeros(n_words, dtype=np.uint64)
    idx = values.astype(np.int64) - offset
    np.bitwise_or.at(words, idx >> 6, np.uint64(1) << (idx & 63).astype(np.uint64))
    return BitsetSet(offset, words, len(values))


def choose_layout(values: np.ndarray, policy: LayoutPolicy = AUTO_POLICY) -> SetLayout:
    """Wrap sorted distinct uint32 ``values`` in the layout the policy picks."""
    values = np.asarray(values, dtype=np.uint32)
    n = len(values)
    if n == 0:
        return EMPTY_SET
    if policy.force == UINT_ARRAY:
        return UintArraySet(values)
    if policy.force == BITSET:
        return _build_bitset(values)
    if policy.wants_bitset(n, int(values[0]), int(values[-1])):
        return _build_bitset(values)
    return UintArraySet(values)


def from_sorted(values: np.ndarray, policy: LayoutPolicy = AUTO_POLICY) -> SetLayout:
    """Alias of choose_layout for call sites that read better this way."""
    return choose_layout(values, policy)


def set_contains(s: SetLayout, v: int, counter: ProbeCounter | None = None) -> bool:
    return s.contains(v, counter)


def _wrap_words(offset: int, words: np.ndarray, policy: LayoutPolicy) -> SetLayout:
    """Re-layout an AND result; trims empty leading/trailing words."""
    nz = np.flatnonzero(words)
    if len(nz) == 0:
        return EMPTY_SET
    first, last = int(nz[0]), int(nz[-1])
    words = words[first : last + 1]
    offset += first * _WORD_BITS
    card = int(np.bitwise_count(words).sum())
    bs = BitsetSet(offset, words, card)
    if policy.force == BITSET:
        return bs
    if policy.force is None and policy.wants_bitset(card, bs.min_value, bs.max_value):
        return bs
    return UintArraySet(bs.to_array())


def _probe_array_into_bitset(arr: np.ndarray, b: BitsetSet) -> np.ndarray:
    idx = arr.astype(np.int64) - b.offset
    in_range = (idx >= 0) & (idx < len(b.words) * _WORD_BITS)
    idx = idx[in_range]
    hits = (b.words[idx >> 6] >> (idx & 63).astype(np.uint64)) & np.uint64(1)
    return arr[in_range][hits == 1]


def _probe_array_into_array(probe: np.ndarray, into: np.ndarray) -> np.ndarray:
    if len(into) == 0:
        return _EMPTY_U32
    pos = np.searchsorted(into, probe)
    valid = pos < len(into)
    hits = probe[valid]
    return hits[into[pos[valid]] == hits]


def set_intersect(a: SetLayout, b: SetLayout, policy: LayoutPolicy = AUTO_POLICY) -> SetLayout:
    """Exact intersection across any layout pairing; result re-laid-out."""
    if a.cardinality == 0 or b.cardinality == 0:
        return EMPTY_SET

    ta, tb = a.tag, b.tag
    if ta == BITSET and tb == BITSET:
        lo = max(a.offset, b.offset)
        hi = min(a.offset + len(a.words) * _WORD_BITS, b.offset + len(b.words) * _WORD_BITS)
        if lo >= hi:
            return EMPTY_SET
        wa = a.words[(lo - a.offset) >> 6 : (hi - a.offset) >> 6]
        wb = b.words[(lo - b.offset) >> 6 : (hi - b.offset) >> 6]
        return _wrap_words(lo, wa & wb, policy)

    if ta == UINT_ARRAY and tb == UINT_ARRAY:
        out = np.intersect1d(a.values, b.values, assume_unique=True)
        return choose_layout(out, policy)

    # Mixed: probe the smaller side into the other; ties probe array → bitset.
    if ta == UINT_ARRAY:
        array_side, bitset_side = a, b
    else:
        array_side, bitset_side = b, a
    if bitset_side.cardinality < array_side.cardinality:
        out = _probe_array_into_array(bitset_side.to_array(), array_side.values)
    else:
        out = _probe_array_into_bitset(array_side.values, bitset_side)
    return choose_layout(out, policy)
