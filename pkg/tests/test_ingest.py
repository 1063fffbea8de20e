import random
from collections import Counter

import numpy as np
import pytest

from wcoj.errors import TripleParseError
from wcoj.ingest import RawTriple, load_triple_file, parse_triples, save_snapshot, vertical_partition


def test_nt_line():
    assert parse_triples(["<a> <p> <b> ."]) == [RawTriple("a", "p", "b")]


def test_nt_literal_object():
    assert parse_triples(['<a> <p> "hello world" .']) == [RawTriple("a", "p", "hello world")]


def test_tsv_line():
    assert parse_triples(["x\tp\ty"]) == [RawTriple("x", "p", "y")]


def test_comments_and_blanks_skipped():
    lines = ["# comment", "", "<a> <p> <b> ."]
    assert len(parse_triples(lines)) == 1


def test_missing_field_reports_line_number():
    with pytest.raises(TripleParseError) as err:
        parse_triples(["<a> <p> <b> .", "<a> <p> ."])
    assert err.value.line_no == 2


def test_unterminated_quote_is_an_error():
    with pytest.raises(TripleParseError):
        parse_triples(['<a> <p> "oops .'])


def test_tsv_wrong_field_count():
    with pytest.raises(TripleParseError):
        parse_triples(["a\tb"])


def test_partition_counts():
    triples = [RawTriple(*t) for t in [("a", "p", "b"), ("c", "p", "d"), ("a", "q", "b")]]
    db = vertical_partition(triples)
    by_name = {db.dictionary.decode(k): rel for k, rel in db.predicates.items()}
    assert by_name["p"].cardinality == 2
    assert by_name["q"].cardinality == 1


def test_duplicate_triples_deduplicated():
    triples = [RawTriple("a", "p", "b")] * 2
    db = vertical_partition(triples)
    rel = next(iter(db.predicates.values()))
    assert rel.cardinality == 1
    assert rel.raw_count == 2
    assert db.triple_count == 2


def _random_lines(n, seed):
    rng = random.Random(seed)
    return [
        f"s{rng.randrange(40)}\tp{rng.randrange(6)}\to{rng.randrange(40)}"
        for _ in range(n)
    ]


def test_cardinalities_match_group_by_oracle():
    lines = _random_lines(10000, 3)
    db = vertical_partition(parse_triples(lines))
    # independent oracle: group the raw file by predicate, dedup pairs
    groups: dict[str, set] = {}
    for line in lines:
        s, p, o = line.split("\t")
        groups.setdefault(p, set()).add((s, o))
    for pred, pairs in groups.items():
        rel = db.predicates[db.dictionary.lookup(pred)]
        assert rel.cardinality == len(pairs)
    raw = Counter(line.split("\t")[1] for line in lines)
    for pred, count in raw.items():
        assert db.predicates[db.dictionary.lookup(pred)].raw_count == count
    assert sum(r.raw_count for r in db.predicates.values()) == db.triple_count


def test_partition_union_reproduces_input():
    lines = _random_lines(2000, 4)
    db = vertical_partition(parse_triples(lines))
    rebuilt = set()
    for pk, rel in db.predicates.items():
        p = db.dictionary.decode(pk)
        for s, o in rel.pairs.tolist():
            rebuilt.add((db.dictionary.decode(s), p, db.dictionary.decode(o)))
    assert rebuilt == {tuple(line.split("\t")) for line in lines}


def test_every_key_decodes():
    db = vertical_partition(parse_triples(_random_lines(500, 5)))
    for rel in db.predicates.values():
        for k in np.unique(rel.pairs):
            db.dictionary.decode(int(k))


def test_load_is_deterministic():
    lines = _random_lines(1000, 6)
    a = vertical_partition(parse_triples(lines))
    b = vertical_partition(parse_triples(lines))
    assert a.dictionary._reverse == b.dictionary._reverse
    assert a.predicates.keys() == b.predicates.keys()
    for k in a.predicates:
        assert np.array_equal(a.predicates[k].pairs, b.predicates[k].pairs)


def test_snapshot_roundtrip(tmp_path):
    lines = _random_lines(500, 8)
    src = tmp_path / "data.tsv"
    src.write_text("\n".join(lines) + "\n")
    db = load_triple_file(str(src))
    snap = tmp_path / "db.snap"
    save_snapshot(db, str(snap))
    db2 = load_triple_file(str(snap))
    assert db2.triple_count == db.triple_count
    assert db2.dictionary._reverse == db.dictionary._reverse
    for k in db.predicates:
        assert np.array_equal(db2.predicates[k].pairs, db.predicates[k].pairs)


def test_stats_tsv(lubm_small):
    lines = lubm_small.stats_tsv().splitlines()
    assert len(lines) == len(lubm_small.predicates)
    for line in lines:
        name, card = line.split("\t")
        assert lubm_small.predicates[lubm_small.dictionary.lookup(name)].cardinality == int(card)
