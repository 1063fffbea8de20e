import pytest

from wcoj.errors import QuerySyntaxError, UnresolvedPrefixError, UnsupportedFeatureError
from wcoj.ingest import parse_triples, vertical_partition
from wcoj.sparql import Constant, Variable, parse_query, render_query, to_conjunctive

from conftest import CORPUS, corpus_query

RDF = "http://www.w3.org/1999/02/22-rdf-syntax-ns#"
UB = "http://www.lehigh.edu/~zhp2/2004/0401/univ-bench.owl#"


def test_parse_corpus_q1():
    q = parse_query(corpus_query("q1"))
    assert q.output_vars == ["x"]
    assert q.patterns[0] == (Variable("x"), Constant(RDF + "type"), Constant(UB + "GraduateStudent"))
    assert q.patterns[1][1] == Constant(UB + "takesCourse")
    assert q.patterns[1][2] == Constant(
        "http://www.Department0.University0.edu/GraduateCourse0"
    )


def test_whitespace_insignificant():
    a = parse_query("SELECT ?x WHERE{ ?x <p> ?y . ?y <q> ?x }")
    b = parse_query("SELECT ?x\nWHERE {\n  ?x <p> ?y.\n  ?y <q> ?x\n}\n")
    assert a.patterns == b.patterns and a.output_vars == b.output_vars


def test_self_join_variable_identity():
    q = parse_query("SELECT ?x WHERE{ ?x <p> ?x }")
    s, _, o = q.patterns[0]
    assert s == o == Variable("x")


def test_variable_predicate_rejected():
    with pytest.raises(UnsupportedFeatureError):
        parse_query("SELECT ?x WHERE{ ?x ?p ?y }")


def test_unresolved_prefix():
    with pytest.raises(UnresolvedPrefixError):
        parse_query("SELECT ?x WHERE{ ?x nope:thing ?y }")


def test_syntax_error_carries_position():
    with pytest.raises(QuerySyntaxError) as err:
        parse_query("SELECT ?x WHERE{ ?x <p> }")
    assert err.value.position > 0


def test_output_variable_must_occur():
    with pytest.raises(QuerySyntaxError):
        parse_query("SELECT ?z WHERE{ ?x <p> ?y }")


def test_literal_objects():
    q = parse_query('SELECT ?x WHERE{ ?x <name> "Alice Smith" }')
    assert q.patterns[0][2] == Constant("Alice Smith")


def test_prefix_expansion():
    q = parse_query("PREFIX ex: <http://e.org/>\nSELECT ?x WHERE{ ?x ex:knows ?y }")
    assert q.patterns[0][1] == Constant("http://e.org/knows")


def test_parse_render_parse_fixpoint_on_corpus():
    for name in CORPUS:
        q1 = parse_query(corpus_query(name))
        q2 = parse_query(render_query(q1))
        assert q1.patterns == q2.patterns
        assert q1.output_vars == q2.output_vars
        assert q1.prefixes == q2.prefixes


def test_all_corpus_queries_parse():
    for name in CORPUS:
        q = parse_query(corpus_query(name))
        assert q.patterns and q.output_vars


def _db(lines):
    return vertical_partition(parse_triples(lines))


def test_to_conjunctive_resolves_constants():
    db = _db(["s\tp\to"])
    conj = to_conjunctive(parse_query("SELECT ?x WHERE{ ?x <p> <o> }"), db)
    pat = conj.patterns[0]
    assert pat.pred_key == db.dictionary.lookup("p")
    assert pat.object_key == db.dictionary.lookup("o")
    assert pat.subject_var == "x" and pat.object_var is None
    assert not conj.guaranteed_empty


def test_missing_predicate_short_circuits_not_errors():
    db = _db(["s\tp\to"])
    conj = to_conjunctive(parse_query("SELECT ?x WHERE{ ?x <nope> ?y }"), db)
    assert conj.guaranteed_empty


def test_missing_constant_short_circuits():
    db = _db(["s\tp\to"])
    conj = to_conjunctive(parse_query("SELECT ?x WHERE{ ?x <p> <ghost> }"), db)
    assert conj.guaranteed_empty


def test_constant_subject_is_a_selection(lubm_small):
    from wcoj.hypergraph import query_to_hypergraph

    conj = to_conjunctive(parse_query(corpus_query("q7")), lubm_small)
    h = query_to_hypergraph(conj, lubm_small)
    teacher = next(e for e in h.edges if "teacherOf" in e.name)
    (sel_attr,) = teacher.selections
    assert teacher.attrs.index(sel_attr) == 0  # subject position selected
