import itertools
import math
import random
from fractions import Fraction

import numpy as np
import pytest

from wcoj import lp
from wcoj.engine import compile_query
from wcoj.errors import InfeasibleCoverError, UnknownPredicateError
from wcoj.hypergraph import fhw_width, fractional_cover, query_to_hypergraph
from wcoj.ingest import parse_triples, vertical_partition

from conftest import corpus_query


def lp_vertex_oracle(edge_attrs, costs, restrict):
    """Brute-force optimum: enumerate basic solutions of the cover LP."""
    n = len(edge_attrs)
    rows = []
    for v in sorted(restrict):
        rows.append(([1.0 if v in a else 0.0 for a in edge_attrs], 1.0))
    for j in range(n):
        rows.append(([1.0 if i == j else 0.0 for i in range(n)], 0.0))
    best = None
    for combo in itertools.combinations(range(len(rows)), n):
        a = np.array([rows[i][0] for i in combo])
        b = np.array([rows[i][1] for i in combo])
        try:
            x = np.linalg.solve(a, b)
        except np.linalg.LinAlgError:
            continue
        if np.any(x < -1e-9):
            continue
        ok = all(
            sum(c * xi for c, xi in zip(coeffs, x)) >= rhs - 1e-9 for coeffs, rhs in rows
        )
        if ok:
            val = float(sum(c * xi for c, xi in zip(costs, x)))
            if best is None or val < best:
                best = val
    return best


def _triangle_edges():
    return [frozenset("xy"), frozenset("yz"), frozenset("zx")]


def test_triangle_cover_weights_and_bound():
    costs = [math.log(1000)] * 3
    value, x = lp.minimize_cover(_triangle_edges(), costs, frozenset("xyz"))
    assert x == pytest.approx([0.5, 0.5, 0.5], abs=1e-9)
    assert math.exp(value) == pytest.approx(1000**1.5, rel=1e-9)


def test_single_edge_cover():
    value, x = lp.minimize_cover([frozenset("xy")], [math.log(42)], frozenset("xy"))
    assert x == pytest.approx([1.0], abs=1e-9)
    assert math.exp(value) == pytest.approx(42.0, rel=1e-12)


def test_cover_infeasible_when_vertex_uncovered():
    with pytest.raises(InfeasibleCoverError):
        lp.minimize_cover([frozenset("xy")], [0.0], frozenset("xyz"))


def _random_program(rng):
    n_v = rng.randrange(1, 5)
    vertices = [f"v{i}" for i in range(n_v)]
    n_e = rng.randrange(1, 5)
    attrs = [frozenset(rng.sample(vertices, rng.randrange(1, n_v + 1))) for _ in range(n_e)]
    # patch coverage so the program is feasible
    for v in vertices:
        if not any(v in a for a in attrs):
            i = rng.randrange(n_e)
            attrs[i] = attrs[i] | {v}
    cards = [rng.randrange(1, 10**6 + 1) for _ in range(n_e)]
    return attrs, [math.log(c) for c in cards], frozenset(vertices)


def test_simplex_matches_vertex_enumeration_oracle():
    rng = random.Random(42)
    for _ in range(200):
        attrs, costs, restrict = _random_program(rng)
        value, x = lp.minimize_cover(attrs, costs, restrict)
        oracle = lp_vertex_oracle(attrs, costs, restrict)
        assert oracle is not None
        assert value == pytest.approx(oracle, abs=1e-6)
        # returned weights are a feasible cover
        for v in restrict:
            assert sum(xi for xi, a in zip(x, attrs) if v in a) >= 1 - 1e-9
        assert all(xi >= -1e-9 for xi in x)


def test_objective_monotone_under_extra_edges():
    rng = random.Random(7)
    for _ in range(50):
        attrs, costs, restrict = _random_program(rng)
        before, _ = lp.minimize_cover(attrs, costs, restrict)
        extra = frozenset(restrict)
        after, _ = lp.minimize_cover(attrs + [extra], costs + [math.log(2)], restrict)
        assert after <= before + 1e-9


def test_exact_cover_number_values():
    assert lp.exact_cover_number(_triangle_edges(), frozenset("xyz")) == Fraction(3, 2)
    assert lp.exact_cover_number([frozenset("xy")], frozenset("xy")) == Fraction(1)
    two = lp.exact_cover_number([frozenset("xy"), frozenset("yz")], frozenset("xyz"))
    assert two == Fraction(2)
    assert lp.exact_cover_number(_triangle_edges(), frozenset()) == Fraction(0)


def test_exact_matches_simplex_on_unit_costs():
    rng = random.Random(3)
    for _ in range(100):
        attrs, _, restrict = _random_program(rng)
        value, _ = lp.minimize_cover(attrs, [1.0] * len(attrs), restrict)
        exact = lp.exact_cover_number(attrs, restrict)
        assert value == pytest.approx(float(exact), abs=1e-6)


# -- hypergraph construction -------------------------------------------------


def _tiny_db(lines):
    return vertical_partition(parse_triples(lines))


def test_query_to_hypergraph_q2(lubm_small):
    conj = compile_query(lubm_small, corpus_query("q2"))
    h = query_to_hypergraph(conj, lubm_small)
    assert len(h.edges) == 6
    assert h.vertices == frozenset({"x", "y", "z", "a", "b", "c"})
    assert set(h.selected) == {"a", "b", "c"}
    for attr, edge_idx in h.selected.items():
        assert attr in h.edges[edge_idx].selections


def test_single_pattern_hypergraph():
    db = _tiny_db(["s\tp\to"])
    h = query_to_hypergraph(compile_query(db, "SELECT ?x ?y WHERE{ ?x <p> ?y }"), db)
    assert h.vertices == frozenset({"x", "y"})
    assert len(h.edges) == 1
    assert h.edges[0].cardinality == 1


def test_fully_constant_pattern_contributes_no_edge():
    db = _tiny_db(["s\tp\to", "a\tq\tb"])
    q = "SELECT ?x ?y WHERE{ ?x <p> ?y . <a> <q> <b> }"
    h = query_to_hypergraph(compile_query(db, q), db)
    assert len(h.edges) == 1  # the constant pattern became a prefilter


def test_diagonal_pattern():
    db = _tiny_db(["a\tp\ta", "a\tp\tb", "c\tp\tc"])
    h = query_to_hypergraph(compile_query(db, "SELECT ?x WHERE{ ?x <p> ?x }"), db)
    assert len(h.edges) == 1
    assert h.edges[0].diagonal
    assert h.edges[0].attrs == ("x",)
    assert h.edges[0].cardinality == 2


def test_unknown_predicate_raises():
    db = _tiny_db(["s\tp\to"])
    conj = compile_query(db, "SELECT ?x WHERE{ ?x <p> ?y }")
    conj.patterns[0].pred_key = 999
    with pytest.raises(UnknownPredicateError):
        query_to_hypergraph(conj, db)


def test_fractional_cover_of_query(lubm_small):
    conj = compile_query(lubm_small, corpus_query("q2"))
    h = query_to_hypergraph(conj, lubm_small)
    cover = fractional_cover(h)
    assert cover.bound > 0
    for v in h.vertices:
        incident = sum(w for w, e in zip(cover.weights, h.edges) if v in e.attr_set)
        assert incident >= 1 - 1e-9


def test_fhw_width_on_edges(lubm_small):
    conj = compile_query(lubm_small, corpus_query("q2"))
    h = query_to_hypergraph(conj, lubm_small)
    tri = [e for e in h.edges if not e.selections]
    assert fhw_width(tri, frozenset({"x", "y", "z"})) == Fraction(3, 2)


def test_agm_bound_is_sound_empirically():
    rng = random.Random(13)
    for trial in range(10):
        lines = [
            f"e{rng.randrange(8)}\t{p}\te{rng.randrange(8)}"
            for p in ("p", "q", "r")
            for _ in range(30)
        ]
        db = _tiny_db(lines)
        q = "SELECT ?x ?y ?z WHERE{ ?x <p> ?y . ?y <q> ?z . ?z <r> ?x }"
        h = query_to_hypergraph(compile_query(db, q), db)
        bound = fractional_cover(h).bound
        from wcoj.engine import RunConfig, run_query

        out = run_query(db, q, RunConfig(engine="pairwise")).stats.output_count
        assert out <= bound + 1e-6
