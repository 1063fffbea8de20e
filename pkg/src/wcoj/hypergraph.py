"""Query hypergraphs and fractional edge covers.

A conjunctive query becomes a hypergraph with a vertex per attribute and a
hyperedge per triple pattern. Constant positions stay in the edge as fresh
"selected" attributes bound to a key (so a pattern like type(x, 'Dept')
yields an edge over (x, a) with selection a -> key), which is what lets the
planner reorder and push selections. Patterns with no free position are
handled as boolean prefilters and contribute no edge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import lp
from .errors import UnknownPredicateError
from .ingest import PartitionedDatabase
from .sparql import ConjunctivePattern, ConjunctiveQuery

_SELECTION_NAMES = "abcdefghijklmnopqrstuvwxyz"


@dataclass(frozen=True)
class Edge:
    """One triple pattern over its free + selected attributes."""

    name: str                      # display name, predicate local part + index
    pred_key: int
    attrs: tuple[str, ...]         # attribute per kept position, subject first
    positions: tuple[int, ...]     # relation column of each attr (0=subject)
    selections: dict[str, int | None]  # selected attr -> constant key (None if absent term)
    cardinality: int
    diagonal: bool = False         # pattern ?x p ?x (unary over the diagonal)

    @property
    def free_attrs(self) -> tuple[str, ...]:
        return tuple(a for a in self.attrs if a not in self.selections)

    @property
    def attr_set(self) -> frozenset:
        return frozenset(self.attrs)


@dataclass
class Hypergraph:
    vertices: frozenset
    edges: list[Edge]
    first_seen: dict[str, int]         # attr -> first appearance rank (tie-breaks)
    selected: dict[str, int]           # selected attr -> owning edge index
    output_vars: tuple[str, ...]

    def selection_relation_cardinality(self, attr: str) -> int:
        return self.edges[self.selected[attr]].cardinality

    def min_incident_cardinality(self, attr: str) -> int:
        return min(e.cardinality for e in self.edges if attr in e.attr_set)


@dataclass(frozen=True)
class FractionalCover:
    weights: tuple[float, ...]
    bound: float                   # prod |R_e| ** x_e


def _local_name(term: str) -> str:
    for sep in ("#", "/"):
        if sep in term:
            return term.rsplit(sep, 1)[1] or term
    return term


def query_to_hypergraph(query: ConjunctiveQuery, db: PartitionedDatabase) -> Hypergraph:
    """Build the hypergraph; selected attributes get fresh single-letter names."""
    used = {p.subject_var for p in query.patterns if p.subject_var} | {
        p.object_var for p in query.patterns if p.object_var
    }
    fresh = iter(
        [c for c in _SELECTION_NAMES if c not in used]
        + [f"sel{i}" for i in range(2 * len(query.patterns))]
    )

    edges: list[Edge] = []
    first_seen: dict[str, int] = {}
    selected: dict[str, int] = {}
    rank = 0

    def note(attr: str) -> None:
        nonlocal rank
        if attr not in first_seen:
            first_seen[attr] = rank
            rank += 1

    name_counts: dict[str, int] = {}
    for pat in query.patterns:
        if pat.pred_key is None or pat.pred_key not in db.predicates:
            raise UnknownPredicateError(f"predicate {pat.predicate!r} not loaded")
        if pat.subject_var is None and pat.object_var is None:
            continue  # fully constant: boolean prefilter, no edge
        rel = db.predicates[pat.pred_key]
        base = _local_name(pat.predicate)
        name_counts[base] = name_counts.get(base, 0) + 1
        name = f"{base}#{name_counts[base]}"
        idx = len(edges)

        if pat.subject_var is not None and pat.subject_var == pat.object_var:
            note(pat.subject_var)
            edges.append(
                Edge(name, pat.pred_key, (pat.subject_var,), (0,), {},
                     int(db.diagonal(pat.pred_key).cardinality), diagonal=True)
            )
            continue

        attrs: list[str] = []
        positions: list[int] = []
        selections: dict[str, int | None] = {}
        for pos, (var, const_key) in enumerate(
            ((pat.subject_var, pat.subject_key), (pat.object_var, pat.object_key))
        ):
            if var is not None:
                attrs.append(var)
                note(var)
            else:
                sel = next(fresh)
                attrs.append(sel)
                note(sel)
                selections[sel] = const_key
                selected[sel] = idx
            positions.append(pos)
        edges.append(Edge(name, pat.pred_key, tuple(attrs), tuple(positions),
                          selections, rel.cardinality))

    vertices = frozenset(first_seen)
    return Hypergraph(vertices, edges, first_seen, selected, tuple(query.output_vars))


def fractional_cover(h: Hypergraph, restrict: frozenset | None = None) -> FractionalCover:
    """Minimum of prod |R_e|^{x_e} over fractional covers of ``restrict``.

    restrict defaults to all vertices, in which case the bound is the AGM
    bound of the query. Solved as min sum x_e * log|R_e| by the simplex.
    """
    if restrict is None:
        restrict = h.vertices
    attrs = [e.attr_set for e in h.edges]
    costs = [math.log(max(e.cardinality, 1)) for e in h.edges]
    value, weights = lp.minimize_cover(attrs, costs, frozenset(restrict))
    return FractionalCover(tuple(weights), math.exp(value))


def fhw_width(edges: list[Edge], restrict: frozenset) -> Fraction:
    """Exact fractional cover number (all cardinalities treated as equal)."""
    return lp.exact_cover_number([e.attr_set for e in edges], restrict)
