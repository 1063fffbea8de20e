"""Triple-file parsing and vertical partitioning.

Input is line-oriented: either N-Triples-like ``<s> <p> <o> .`` (the object
may be a quoted literal) or tab-separated ``s<TAB>p<TAB>o``. Terms are kept
verbatim apart from stripping angle brackets / surrounding quotes. The loaded
database holds one deduplicated binary relation per predicate, everything
dictionary-encoded; it is immutable after load.
"""

from __future__ import annotations

import pickle
import re
from collections.abc import Iterable
from typing import NamedTuple

import numpy as np

from .dictionary import Dictionary
from .errors import TripleParseError
from .sets import AUTO_POLICY, LayoutPolicy, SetLayout, choose_layout
from .trie import Trie, build_trie

_NT_RE = re.compile(
    r'^<([^<>]+)>\s+<([^<>]+)>\s+(?:<([^<>]+)>|"((?:[^"\\]|\\.)*)")\s*\.\s*$'
)

_SNAPSHOT_MAGIC = b"\x80"  # pickle protocol >= 2 leading byte


class RawTriple(NamedTuple):
    subject: str
    predicate: str
    object: str


def parse_triples(lines: Iterable[str]) -> list[RawTriple]:
    """Parse a triple stream in file order; '#' comment lines are skipped."""
    out: list[RawTriple] = []
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("<"):
            m = _NT_RE.match(line)
            if not m:
                raise TripleParseError(f"malformed triple line: {line[:80]!r}", line_no)
            s, p, o_iri, o_lit = m.groups()
            out.append(RawTriple(s, p, o_iri if o_iri is not None else o_lit))
        else:
            fields = line.split("\t")
            if len(fields) != 3 or not all(fields):
                raise TripleParseError(
                    f"expected 3 tab-separated fields, got {len(fields)}", line_no
                )
            out.append(RawTriple(*fields))
    return out


class Relation:
    """Deduplicated (subject-key, object-key) pairs, lexicographically sorted."""

    __slots__ = ("pairs", "raw_count")

    def __init__(self, pairs: np.ndarray, raw_count: int):
        self.pairs = pairs
        self.raw_count = raw_count

    @property
    def cardinality(self) -> int:
        return len(self.pairs)

    def column(self, pos: int) -> np.ndarray:
        return self.pairs[:, pos]


class PartitionedDatabase:
    """One relation per predicate plus the global dictionary.

    Tries are built lazily per (predicate, column order, layout override)
    and cached; a trie is the engine's only index structure.
    """

    def __init__(self, predicates: dict[int, Relation], dictionary: Dictionary, triple_count: int):
        self.predicates = predicates
        self.dictionary = dictionary
        self.triple_count = triple_count
        self._trie_cache: dict[tuple, Trie] = {}
        self._diag_cache: dict[tuple, SetLayout] = {}

    def relation_for(self, term: str) -> Relation | None:
        key = self.dictionary.lookup(term)
        return self.predicates.get(key) if key is not None else None

    def trie(self, pred_key: int, perm: tuple[int, ...], policy: LayoutPolicy = AUTO_POLICY) -> Trie:
        """Trie of the predicate's relation with columns permuted by ``perm``."""
        cache_key = (pred_key, perm, policy.force)
        cached = self._trie_cache.get(cache_key)
        if cached is not None:
            return cached
        rel = self.predicates[pred_key]
        names = tuple("so"[i] for i in perm)
        t = build_trie(rel.pairs[:, list(perm)], names, policy)
        self._trie_cache[cache_key] = t
        return t

    def diagonal(self, pred_key: int, policy: LayoutPolicy = AUTO_POLICY) -> SetLayout:
        """Values v with (v, v) in the relation — self-join patterns."""
        cache_key = (pred_key, policy.force)
        cached = self._diag_cache.get(cache_key)
        if cached is not None:
            return cached
        pairs = self.predicates[pred_key].pairs
        vals = pairs[pairs[:, 0] == pairs[:, 1], 0]
        s = choose_layout(vals, policy)
        self._diag_cache[cache_key] = s
        return s

    def stats_tsv(self) -> str:
        """predicate → cardinality dump, one TSV line per predicate."""
        rows = sorted(
            (self.dictionary.decode(k), rel.cardinality) for k, rel in self.predicates.items()
        )
        return "".join(f"{name}\t{card}\n" for name, card in rows)


def vertical_partition(triples: Iterable[RawTriple]) -> PartitionedDatabase:
    """Group triples by predicate into dictionary-encoded set relations."""
    dictionary = Dictionary()
    encode = dictionary.encode
    grouped: dict[int, list[tuple[int, int]]] = {}
    count = 0
    for s, p, o in triples:
        count += 1
        grouped.setdefault(encode(p), []).append((encode(s), encode(o)))
    predicates: dict[int, Relation] = {}
    for pk, pairs in grouped.items():
        arr = np.asarray(pairs, dtype=np.uint32).reshape(len(pairs), 2)
        predicates[pk] = Relation(np.unique(arr, axis=0), len(pairs))
    return PartitionedDatabase(predicates, dictionary, count)


def load_triple_file(path: str) -> PartitionedDatabase:
    with open(path, "rb") as fh:
        head = fh.read(1)
        fh.seek(0)
        if head == _SNAPSHOT_MAGIC:
            return _load_snapshot(fh)
        text = fh.read().decode("utf-8")
    return vertical_partition(parse_triples(text.splitlines()))


def save_snapshot(db: PartitionedDatabase, path: str) -> None:
    payload = {
        "version": 1,
        "terms": db.dictionary._reverse,
        "predicates": {k: rel.pairs for k, rel in db.predicates.items()},
        "raw_counts": {k: rel.raw_count for k, rel in db.predicates.items()},
        "triple_count": db.triple_count,
    }
    with open(path, "wb") as fh:
        pickle.dump(payload, fh, protocol=4)


def _load_snapshot(fh) -> PartitionedDatabase:
    payload = pickle.load(fh)
    dictionary = Dictionary()
    for term in payload["terms"]:
        dictionary.encode(term)
    predicates = {
        k: Relation(pairs, payload["raw_counts"][k])
        for k, pairs in payload["predicates"].items()
    }
    return PartitionedDatabase(predicates, dictionary, payload["triple_count"])
