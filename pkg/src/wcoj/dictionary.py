"""Dictionary encoding of string terms into dense 32-bit surrogate keys.

One global dictionary covers every column (subjects, predicates, objects share
a key space), so a term joining across positions gets a single key. Keys are
assigned in first-seen order starting at 0, which keeps loads deterministic
and the key range dense.
"""

from __future__ import annotations

from .errors import CapacityError, UnknownKeyError

KEY_LIMIT = 2**32


class Dictionary:
    """Bidirectional map between terms and dense uint32 keys."""

    __slots__ = ("_forward", "_reverse")

    def __init__(self) -> None:
        self._forward: dict[str, int] = {}
        self._reverse: list[str] = []

    def __len__(self) -> int:
        return len(self._reverse)

    @property
    def next_key(self) -> int:
        return len(self._reverse)

    def encode(self, term: str) -> int:
        """Return the key for ``term``, assigning the next dense key if new."""
        key = self._forward.get(term)
        if key is not None:
            return key
        key = len(self._reverse)
        if key >= KEY_LIMIT:
            raise CapacityError("dictionary is full: 2^32 distinct terms reached")
        self._forward[term] = key
        self._reverse.append(term)
        return key

    def lookup(self, term: str) -> int | None:
        """Return the key for ``term`` without assigning one; None if absent."""
        return self._forward.get(term)

    def decode(self, key: int) -> str:
        if 0 <= key < len(self._reverse):
            return self._reverse[key]
        raise UnknownKeyError(f"unknown key {key} (dictionary holds {len(self._reverse)} terms)")

    def __contains__(self, term: str) -> bool:
        return term in self._forward
