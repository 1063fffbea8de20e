"""Plan execution: per-node generic join, two tree passes, pipelining.

Bottom-up, each node runs the multiway join over its own relations plus its
children's messages, recursing attribute by attribute: intersect the sets of
every participating edge for the current attribute, loop over the elements,
descend. A selected attribute replaces its loop with a single constant
probe; the final attribute level returns the intersection wholesale instead
of looping.

Children pass messages up. A leaf holding one selection edge whose only free
attribute the parent shares is a pure filter: it passes a set and adds no
output attributes, so it does not count as a materialized intermediate.
Every other node's result counts at its semantic cardinality (however the
buffers are shared underneath). The top-down pass assembles output tuples by
joining node results downward.

Pipelining consumes the marked child's result one shared-prefix value at a
time, so that child's full intermediate never exists at once; results are
identical, only the peak counter drops.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .hypergraph import Hypergraph
from .ingest import PartitionedDatabase
from .planner import GhdNode, GhdPlan
from .sets import AUTO_POLICY, EMPTY_SET, LayoutPolicy, SetLayout, choose_layout, set_intersect
from .trie import Trie, build_trie


@dataclass
class ExecStats:
    visited_prefix_count: int = 0
    intersection_count: int = 0
    intermediate_tuple_count: int = 0
    peak_intermediate_tuples: int = 0
    output_count: int = 0
    _live: int = 0

    def _materialized(self, n: int) -> None:
        self.intermediate_tuple_count += n
        self._live += n
        if self._live > self.peak_intermediate_tuples:
            self.peak_intermediate_tuples = self._live

    def _released(self, n: int) -> None:
        self._live -= n

    def as_dict(self) -> dict[str, int]:
        return {
            "visited_prefix_count": self.visited_prefix_count,
            "intersection_count": self.intersection_count,
            "intermediate_tuple_count": self.intermediate_tuple_count,
            "peak_intermediate_tuples": self.peak_intermediate_tuples,
            "output_count": self.output_count,
        }


@dataclass
class ExecResult:
    attrs: tuple[str, ...]
    rows: np.ndarray              # (n, len(attrs)) uint32, sorted, distinct
    stats: ExecStats
    node_cards: dict[int, int] = field(default_factory=dict)


def _wrap_unary(attr: str, s: SetLayout) -> Trie:
    return Trie((attr,), s, None, s.cardinality)


def _intersect_all(sets: list[SetLayout], policy: LayoutPolicy, stats: ExecStats) -> SetLayout:
    if len(sets) == 1:
        return sets[0]
    ordered = sorted(sets, key=lambda s: s.cardinality)
    acc = ordered[0]
    for s in ordered[1:]:
        stats.intersection_count += 1
        acc = set_intersect(acc, s, policy)
        if acc.cardinality == 0:
            break
    return acc


def generic_join(
    edges: list[tuple[tuple[str, ...], Trie]],
    order: tuple[str, ...],
    selections: dict[str, int],
    stats: ExecStats,
    policy: LayoutPolicy = AUTO_POLICY,
    extra_sets: dict[str, list[SetLayout]] | None = None,
    bound_prefix: dict[str, int] | None = None,
    loop_subset: SetLayout | None = None,
) -> tuple[tuple[str, ...], np.ndarray]:
    """Join the edge tries following ``order``; returns (output attrs, rows).

    ``edges`` pairs each trie with its attribute names, which must follow
    ``order``. ``bound_prefix`` pre-binds leading attributes (pipelining);
    ``loop_subset`` restricts the first looped level (thread partitioning).
    """
    extra = extra_sets or {}
    bound = bound_prefix or {}
    out_attrs = tuple(a for a in order if a not in selections and a not in bound)
    n_levels = len(order)

    # Per level: (slot, needs_descend) of each participating edge.
    cursors: list[Trie] = [t for _, t in edges]
    participants: list[list[int]] = []
    for attr in order:
        participants.append([i for i, (attrs, _) in enumerate(edges) if attr in attrs])

    prefix: list[int] = []
    plain_rows: list[tuple[int, ...]] = []
    bulk_prefixes: list[tuple[int, ...]] = []
    bulk_values: list[np.ndarray] = []
    last_is_loop = n_levels > 0 and order[-1] not in selections and order[-1] not in bound
    first_loop_level = next(
        (i for i, a in enumerate(order) if a not in selections and a not in bound), None
    )

    def descend(level: int, v: int) -> list[tuple[int, Trie]]:
        saved = []
        for slot in participants[level]:
            cur = cursors[slot]
            if cur.children is not None:
                saved.append((slot, cur))
                cursors[slot] = cur.children[v]
        return saved

    def restore(saved: list[tuple[int, Trie]]) -> None:
        for slot, cur in saved:
            cursors[slot] = cur

    def recurse(level: int) -> None:
        if level == n_levels:
            plain_rows.append(tuple(prefix))
            return
        attr = order[level]
        const = selections.get(attr)
        if const is None and attr in bound:
            const = bound[attr]
        if const is not None:
            for slot in participants[level]:
                if not cursors[slot].level0.contains(const):
                    return
            saved = descend(level, const)
            recurse(level + 1)
            restore(saved)
            return
        sets = [cursors[slot].level0 for slot in participants[level]]
        sets.extend(extra.get(attr, ()))
        if level == first_loop_level and loop_subset is not None:
            sets.append(loop_subset)
        isect = _intersect_all(sets, policy, stats)
        if isect.cardinality == 0:
            return
        if level == n_levels - 1 and last_is_loop:
            bulk_prefixes.append(tuple(prefix))
            bulk_values.append(isect.to_array())
            return
        for v in isect.tolist():
            stats.visited_prefix_count += 1
            saved = descend(level, v)
            prefix.append(v)
            recurse(level + 1)
            prefix.pop()
            restore(saved)

    recurse(0)

    k = len(out_attrs)
    if last_is_loop:
        if not bulk_values:
            return out_attrs, np.empty((0, k), dtype=np.uint32)
        lasts = np.concatenate(bulk_values)
        if k == 1:
            return out_attrs, lasts.reshape(-1, 1)
        counts = [len(v) for v in bulk_values]
        pref = np.asarray(bulk_prefixes, dtype=np.uint32).repeat(counts, axis=0)
        return out_attrs, np.hstack([pref, lasts.reshape(-1, 1)])
    if not plain_rows:
        return out_attrs, np.empty((0, k), dtype=np.uint32)
    return out_attrs, np.asarray(plain_rows, dtype=np.uint32)


@dataclass
class _NodeRun:
    node: GhdNode
    out_attrs: tuple[str, ...]
    rows: np.ndarray | None
    filter_attr: str | None = None
    filter_set: SetLayout | None = None
    child_runs: list["_NodeRun"] = field(default_factory=list)

    @property
    def is_filter(self) -> bool:
        return self.filter_set is not None


class _Runner:
    def __init__(
        self,
        plan: GhdPlan,
        h: Hypergraph,
        db: PartitionedDatabase,
        policy: LayoutPolicy,
        threads: int = 1,
    ):
        self.plan = plan
        self.h = h
        self.db = db
        self.policy = policy
        self.threads = max(1, threads)
        self.stats = ExecStats()
        self.node_cards: dict[int, int] = {}
        self.rank = {a: i for i, a in enumerate(plan.global_order)}

    # -- node machinery -----------------------------------------------------

    def edge_cursor(self, edge_idx: int) -> tuple[tuple[str, ...], Trie]:
        e = self.h.edges[edge_idx]
        if e.diagonal:
            return e.attrs, _wrap_unary(e.attrs[0], self.db.diagonal(e.pred_key, self.policy))
        attrs = tuple(sorted(e.attrs, key=self.rank.__getitem__))
        perm = tuple(e.positions[e.attrs.index(a)] for a in attrs)
        return attrs, self.db.trie(e.pred_key, perm, self.policy)

    def node_selections(self, node: GhdNode) -> dict[str, int]:
        out: dict[str, int] = {}
        for i in node.lam:
            for attr, key in self.h.edges[i].selections.items():
                out[attr] = key  # keys resolved; absent constants short-circuit upstream
        return out

    def _is_filter_leaf(self, node: GhdNode) -> bool:
        if node.children or node.parent_id is None or len(node.lam) != 1:
            return False
        e = self.h.edges[node.lam[0]]
        if not e.selections:
            return False
        free = e.free_attrs
        parent_chi = self.plan.nodes[node.parent_id].chi
        return len(free) == 1 and free[0] in parent_chi

    def gather_inputs(
        self, node: GhdNode, child_runs: list[_NodeRun]
    ) -> tuple[list, dict[str, list[SetLayout]]]:
        edges = [self.edge_cursor(i) for i in node.lam]
        extra: dict[str, list[SetLayout]] = {}
        for run in child_runs:
            if run.is_filter:
                extra.setdefault(run.filter_attr, []).append(run.filter_set)
            else:
                shared = sorted(node.chi & set(run.out_attrs), key=self.rank.__getitem__)
                proj = self.project(run.out_attrs, run.rows, shared)
                if len(shared) == 1:
                    extra.setdefault(shared[0], []).append(
                        build_trie(proj, shared, self.policy).level0
                    )
                else:
                    edges.append((tuple(shared), build_trie(proj, shared, self.policy)))
        return edges, extra

    @staticmethod
    def project(attrs: tuple[str, ...], rows: np.ndarray, keep: list[str]) -> np.ndarray:
        idx = [attrs.index(a) for a in keep]
        return rows[:, idx]

    def exec_node(self, node: GhdNode) -> _NodeRun:
        child_runs = [self.exec_node(c) for c in node.children]
        selections = self.node_selections(node)
        edges, extra = self.gather_inputs(node, child_runs)

        if self._is_filter_leaf(node):
            attr = self.h.edges[node.lam[0]].free_attrs[0]
            s = self.filter_leaf_set(node, edges[0], selections, attr)
            self.node_cards[node.id] = s.cardinality
            return _NodeRun(node, (attr,), None, attr, s, child_runs)

        threads = self.threads if node.parent_id is None else 1
        if threads > 1:
            attrs, rows = self.parallel_join(node, edges, selections, extra, threads)
        else:
            attrs, rows = generic_join(
                edges, node.local_order, selections, self.stats, self.policy, extra
            )
        self.node_cards[node.id] = len(rows)
        if node.parent_id is not None or len(self.plan.nodes) > 1:
            self.stats._materialized(len(rows))
        return _NodeRun(node, attrs, rows, child_runs=child_runs)

    def filter_leaf_set(
        self,
        node: GhdNode,
        edge: tuple[tuple[str, ...], Trie],
        selections: dict[str, int],
        attr: str,
    ) -> SetLayout:
        """Selection probe: descend the constant, borrow the remaining level.

        Falls back to the looped join when the selected attribute is not the
        first trie level (attribute reordering off).
        """
        attrs, trie = edge
        if attrs[0] in selections:
            const = selections[attrs[0]]
            if not trie.level0.contains(const):
                return EMPTY_SET
            return trie.children[const].level0
        _, rows = generic_join(
            [(attrs, trie)], node.local_order, selections, self.stats, self.policy
        )
        return choose_layout(rows[:, 0], self.policy)

    def parallel_join(
        self,
        node: GhdNode,
        edges: list,
        selections: dict[str, int],
        extra: dict[str, list[SetLayout]],
        threads: int,
    ) -> tuple[tuple[str, ...], np.ndarray]:
        """Split the root's first loop level across a thread pool.

        Chunks execute independently over fresh cursors and merge in chunk
        order; counters aggregate by summation, so totals are independent of
        the split while outputs are bit-identical to the serial run.
        """
        first = next((a for a in node.local_order if a not in selections), None)
        if first is None:
            return generic_join(edges, node.local_order, selections, self.stats, self.policy, extra)
        level_sets = [t.level0 for attrs, t in edges if attrs and attrs[0] == first]
        level_sets.extend(extra.get(first, ()))
        probe = ExecStats()
        candidates = _intersect_all(level_sets, self.policy, probe).to_array()
        chunks = np.array_split(candidates, threads)

        def run_chunk(chunk: np.ndarray):
            local = ExecStats()
            attrs, rows = generic_join(
                edges, node.local_order, selections, local, self.policy, extra,
                loop_subset=choose_layout(chunk, self.policy),
            )
            return attrs, rows, local

        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run_chunk, [c for c in chunks if len(c)]))
        if not results:
            out_attrs = tuple(a for a in node.local_order if a not in selections)
            return out_attrs, np.empty((0, len(out_attrs)), dtype=np.uint32)
        for _, _, local in results:
            self.stats.visited_prefix_count += local.visited_prefix_count
            self.stats.intersection_count += local.intersection_count
        attrs = results[0][0]
        return attrs, np.vstack([r for _, r, _ in results])

    # -- top-down assembly ----------------------------------------------------

    def assemble(self, run: _NodeRun) -> tuple[tuple[str, ...], np.ndarray]:
        attrs, rows = run.out_attrs, run.rows
        for child in run.child_runs:
            if child.is_filter:
                continue
            c_attrs, c_rows = self.assemble(child)
            attrs, rows = _dict_join(attrs, rows, c_attrs, c_rows)
            if len(rows) == 0:
                break
        return attrs, rows


def _dict_join(
    l_attrs: tuple[str, ...],
    l_rows: np.ndarray,
    r_attrs: tuple[str, ...],
    r_rows: np.ndarray,
) -> tuple[tuple[str, ...], np.ndarray]:
    """Small deliberately-plain hash join used only for output assembly."""
    shared = [a for a in r_attrs if a in l_attrs]
    li = [l_attrs.index(a) for a in shared]
    ri = [r_attrs.index(a) for a in shared]
    r_extra = [i for i, a in enumerate(r_attrs) if a not in l_attrs]
    out_attrs = l_attrs + tuple(r_attrs[i] for i in r_extra)
    if len(l_rows) == 0 or len(r_rows) == 0:
        return out_attrs, np.empty((0, len(out_attrs)), dtype=np.uint32)
    index: dict[tuple, list] = {}
    for row in r_rows.tolist():
        index.setdefault(tuple(row[i] for i in ri), []).append([row[i] for i in r_extra])
    out: list[list[int]] = []
    for row in l_rows.tolist():
        suffixes = index.get(tuple(row[i] for i in li))
        if suffixes:
            for suf in suffixes:
                out.append(row + suf)
    if not out:
        return out_attrs, np.empty((0, len(out_attrs)), dtype=np.uint32)
    return out_attrs, np.asarray(out, dtype=np.uint32)


def _project_output(
    attrs: tuple[str, ...], rows: np.ndarray, out_vars: tuple[str, ...]
) -> np.ndarray:
    if len(rows) == 0:
        return np.empty((0, len(out_vars)), dtype=np.uint32)
    idx = [attrs.index(v) for v in out_vars]
    return np.unique(rows[:, idx], axis=0)


def run_plan(
    plan: GhdPlan,
    h: Hypergraph,
    db: PartitionedDatabase,
    policy: LayoutPolicy = AUTO_POLICY,
    threads: int = 1,
) -> ExecResult:
    """Two-pass execution: bottom-up joins, then top-down materialization."""
    runner = _Runner(plan, h, db, policy, threads)
    root_run = runner.exec_node(plan.root)
    attrs, rows = runner.assemble(root_run)
    out = _project_output(attrs, rows, h.output_vars)
    runner.stats.output_count = len(out)
    return ExecResult(h.output_vars, out, runner.stats, runner.node_cards)


def run_pipelined(
    plan: GhdPlan,
    h: Hypergraph,
    db: PartitionedDatabase,
    policy: LayoutPolicy = AUTO_POLICY,
    threads: int = 1,
) -> ExecResult:
    """Consume the marked child per shared-prefix value; falls back to
    run_plan when the plan has no pipeline edge."""
    if plan.pipeline_edge is None:
        return run_plan(plan, h, db, policy, threads)

    runner = _Runner(plan, h, db, policy, threads=1)
    stats = runner.stats
    root = plan.root
    child = next(c for c in root.children if c.id == plan.pipeline_edge[1])

    root_children = [runner.exec_node(c) for c in root.children if c.id != child.id]
    child_children = [runner.exec_node(c) for c in child.children]

    root_sels = runner.node_selections(root)
    child_sels = runner.node_selections(child)
    root_edges, root_extra = runner.gather_inputs(root, root_children)
    child_edges, child_extra = runner.gather_inputs(child, child_children)

    # Deeper subtrees assemble once; only the marked child's own result is
    # produced and consumed one shared-prefix value at a time.
    child_assemblies = [runner.assemble(r) for r in child_children if not r.is_filter]
    root_assemblies = [runner.assemble(r) for r in root_children if not r.is_filter]

    shared = sorted(root.chi & child.chi, key=runner.rank.__getitem__)
    p0 = shared[0]
    rest_shared = shared[1:]

    # Outer candidates: both sides' first-level availability.
    sets = [t.level0 for attrs, t in root_edges if attrs and attrs[0] == p0]
    sets += [t.level0 for attrs, t in child_edges if attrs and attrs[0] == p0]
    sets += root_extra.get(p0, [])
    sets += child_extra.get(p0, [])
    candidates = _intersect_all(sets, policy, stats)

    out_chunks: list[np.ndarray] = []
    out_attrs: tuple[str, ...] | None = None

    def with_prefix(v: int, attrs: tuple[str, ...], rows: np.ndarray):
        col = np.full((len(rows), 1), v, dtype=np.uint32)
        return (p0,) + attrs, np.hstack([col, rows])

    for v in candidates.tolist():
        stats.visited_prefix_count += 1
        c_attrs, c_rows = generic_join(
            child_edges, child.local_order, child_sels, stats, policy, child_extra,
            bound_prefix={p0: v},
        )
        chunk_n = len(c_rows)
        if chunk_n == 0:
            continue
        stats._materialized(chunk_n)
        c_attrs, c_rows = with_prefix(v, c_attrs, c_rows)
        for a_attrs, a_rows in child_assemblies:
            c_attrs, c_rows = _dict_join(c_attrs, c_rows, a_attrs, a_rows)
        if len(c_rows):
            extra = {a: list(v_) for a, v_ in root_extra.items()}
            for a in rest_shared:
                col = np.unique(c_rows[:, c_attrs.index(a)])
                extra.setdefault(a, []).append(choose_layout(col, policy))
            r_attrs, r_rows = generic_join(
                root_edges, root.local_order, root_sels, stats, policy, extra,
                bound_prefix={p0: v},
            )
            if len(r_rows) > 0:
                r_attrs, r_rows = with_prefix(v, r_attrs, r_rows)
                j_attrs, j_rows = _dict_join(r_attrs, r_rows, c_attrs, c_rows)
                for a_attrs, a_rows in root_assemblies:
                    j_attrs, j_rows = _dict_join(j_attrs, j_rows, a_attrs, a_rows)
                if len(j_rows):
                    out_attrs = j_attrs
                    out_chunks.append(j_rows)
        stats._released(chunk_n)

    if out_attrs is None or not out_chunks:
        out = np.empty((0, len(h.output_vars)), dtype=np.uint32)
    else:
        out = _project_output(out_attrs, np.vstack(out_chunks), h.output_vars)
    stats.output_count = len(out)
    return ExecResult(h.output_vars, out, stats, runner.node_cards)
