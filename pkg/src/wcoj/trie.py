"""Attribute-ordered tries of adaptive-layout sets.

A trie of arity k stores a relation as nested levels: level i holds the
distinct values of the i-th attribute grouped by the prefix of earlier
attributes, so every root-to-leaf path is exactly one tuple. Tries are
immutable after build and safe to share across threads.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from .errors import ArityMismatchError
from .sets import AUTO_POLICY, LayoutPolicy, SetLayout, choose_layout


class Trie:
    __slots__ = ("attribute_order", "level0", "children", "cardinality")

    def __init__(
        self,
        attribute_order: tuple[str, ...],
        level0: SetLayout,
        children: dict[int, "Trie"] | None,
        cardinality: int,
    ):
        self.attribute_order = attribute_order
        self.level0 = level0
        self.children = children
        self.cardinality = cardinality

    @property
    def arity(self) -> int:
        return len(self.attribute_order)

    def __repr__(self) -> str:
        return f"Trie(order={self.attribute_order}, tuples={self.cardinality})"


def _build(rows: np.ndarray, col: int, order: tuple[str, ...], policy: LayoutPolicy) -> Trie:
    suborder = order[col:]
    if col == rows.shape[1] - 1:
        # rows are globally sorted+distinct, so a last-level slice already is too
        return Trie(suborder, choose_layout(rows[:, col], policy), None, len(rows))
    firsts = rows[:, col]
    vals, starts = np.unique(firsts, return_index=True)
    bounds = np.append(starts, len(rows))
    children: dict[int, Trie] = {}
    for i, v in enumerate(vals.tolist()):
        children[v] = _build(rows[starts[i] : bounds[i + 1]], col + 1, order, policy)
    return Trie(suborder, choose_layout(vals, policy), children, len(rows))


def build_trie(
    tuples: np.ndarray | Sequence[tuple[int, ...]],
    attribute_order: Sequence[str],
    policy: LayoutPolicy = AUTO_POLICY,
) -> Trie:
    """Build a trie whose level i is attribute_order[i].

    ``tuples`` components must already follow attribute_order. Duplicates are
    collapsed (relations are sets).
    """
    order = tuple(attribute_order)
    arr = np.asarray(tuples, dtype=np.uint32)
    if arr.size == 0:
        arr = arr.reshape(0, len(order))
    if arr.ndim != 2 or arr.shape[1] != len(order):
        raise ArityMismatchError(
            f"tuples of arity {arr.shape[1] if arr.ndim == 2 else '?'} "
            f"vs attribute order of length {len(order)}"
        )
    if len(arr) == 0:
        return Trie(order, choose_layout(arr[:, 0] if len(order) else arr, policy), None if len(order) <= 1 else {}, 0)
    arr = np.unique(arr, axis=0)  # lexicographic sort + dedup
    return _build(arr, 0, order, policy)


def enumerate_tuples(trie: Trie) -> np.ndarray:
    """All tuples of the trie, lexicographically sorted, as an (n, k) array."""
    k = trie.arity
    if trie.cardinality == 0:
        return np.empty((0, k), dtype=np.uint32)
    if k == 1:
        return trie.level0.to_array().reshape(-1, 1)
    out = np.empty((trie.cardinality, k), dtype=np.uint32)
    pos = 0
    for v in trie.level0.tolist():
        sub = enumerate_tuples(trie.children[v])
        out[pos : pos + len(sub), 0] = v
        out[pos : pos + len(sub), 1:] = sub
        pos += len(sub)
    return out
