"""Query pipeline: parse, compile, plan, execute on either engine."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .baseline import pairwise_execute
from .executor import ExecResult, ExecStats, run_pipelined, run_plan
from .hypergraph import Hypergraph, fractional_cover, query_to_hypergraph
from .ingest import PartitionedDatabase
from .planner import GhdPlan, choose_plan, explain_text
from .sets import BITSET, UINT_ARRAY, AUTO_POLICY, LayoutPolicy
from .sparql import ConjunctiveQuery, parse_query, to_conjunctive

FORCE = {"auto": AUTO_POLICY, "uint": LayoutPolicy(force=UINT_ARRAY), "bitset": LayoutPolicy(force=BITSET)}


@dataclass
class RunConfig:
    engine: str = "wcoj"          # wcoj | pairwise
    layout: str = "auto"          # auto | uint | bitset
    attr_reorder: bool = True
    ghd_pushdown: bool = True
    pipeline: bool = True
    threads: int = 1


@dataclass
class QueryRun:
    result: ExecResult
    plan: GhdPlan | None = None
    hypergraph: Hypergraph | None = None

    @property
    def stats(self) -> ExecStats:
        return self.result.stats


def _empty_run(conj: ConjunctiveQuery) -> QueryRun:
    out = np.empty((0, len(conj.output_vars)), dtype=np.uint32)
    return QueryRun(ExecResult(conj.output_vars, out, ExecStats()))


def _prefilters_pass(conj: ConjunctiveQuery, db: PartitionedDatabase) -> bool:
    for pat in conj.prefilters:
        pairs = db.predicates[pat.pred_key].pairs
        if not np.any((pairs[:, 0] == pat.subject_key) & (pairs[:, 1] == pat.object_key)):
            return False
    return True


def compile_query(db: PartitionedDatabase, text: str) -> ConjunctiveQuery:
    return to_conjunctive(parse_query(text), db)


def run_query(db: PartitionedDatabase, text: str, config: RunConfig | None = None) -> QueryRun:
    config = config or RunConfig()
    conj = compile_query(db, text)
    if conj.guaranteed_empty:
        return _empty_run(conj)
    if config.engine == "pairwise":
        return QueryRun(pairwise_execute(conj, db))
    if not _prefilters_pass(conj, db):
        return _empty_run(conj)
    h = query_to_hypergraph(conj, db)
    plan = choose_plan(h, pushdown=config.ghd_pushdown, reorder=config.attr_reorder)
    policy = FORCE[config.layout]
    runner = run_pipelined if config.pipeline else run_plan
    result = runner(plan, h, db, policy, config.threads)
    return QueryRun(result, plan, h)


def format_tsv(db: PartitionedDatabase, result: ExecResult) -> str:
    """Decoded result rows, tab-separated, canonically sorted by key."""
    decode = db.dictionary.decode
    lines = []
    for row in result.rows.tolist():
        lines.append("\t".join(decode(k) for k in row) + "\n")
    return "".join(lines)


def explain(db: PartitionedDatabase, text: str, config: RunConfig | None = None) -> str:
    config = config or RunConfig()
    conj = compile_query(db, text)
    if conj.guaranteed_empty:
        return "plan: guaranteed empty (a predicate or constant is absent from the data)\n"
    h = query_to_hypergraph(conj, db)
    plan = choose_plan(h, pushdown=config.ghd_pushdown, reorder=config.attr_reorder)
    return explain_text(plan, h, fractional_cover(h))
