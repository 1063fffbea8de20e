"""Left-deep pairwise hash-join engine: the correctness oracle.

No optimizer: patterns join in textual order, nudged only far enough to keep
each step connected to the accumulated variables when possible. Selections
are plain scans-with-filter at the leaves. Every join materializes its
output and records its cardinality, which is exactly what makes this engine
the asymptotic foil on cyclic queries.
"""

from __future__ import annotations

import numpy as np

from .executor import ExecResult, ExecStats
from .ingest import PartitionedDatabase
from .sparql import ConjunctivePattern, ConjunctiveQuery


def _leaf(pat: ConjunctivePattern, db: PartitionedDatabase) -> tuple[tuple[str, ...], np.ndarray]:
    pairs = db.predicates[pat.pred_key].pairs
    if pat.subject_var is not None and pat.subject_var == pat.object_var:
        vals = np.unique(pairs[pairs[:, 0] == pairs[:, 1], 0])
        return (pat.subject_var,), vals.reshape(-1, 1)
    if pat.subject_var is None:
        rows = pairs[pairs[:, 0] == pat.subject_key][:, 1:2]
        return (pat.object_var,), rows
    if pat.object_var is None:
        rows = pairs[pairs[:, 1] == pat.object_key][:, 0:1]
        return (pat.subject_var,), rows
    return (pat.subject_var, pat.object_var), pairs


def _pack(rows: np.ndarray, cols: list[int]) -> np.ndarray:
    if len(cols) == 1:
        return rows[:, cols[0]]
    key = rows[:, cols[0]].astype(np.uint64) << np.uint64(32)
    return key | rows[:, cols[1]].astype(np.uint64)


def _hash_join(
    l_vars: tuple[str, ...],
    left: np.ndarray,
    r_vars: tuple[str, ...],
    right: np.ndarray,
) -> tuple[tuple[str, ...], np.ndarray]:
    shared = [v for v in r_vars if v in l_vars]
    r_extra = [i for i, v in enumerate(r_vars) if v not in l_vars]
    out_vars = l_vars + tuple(r_vars[i] for i in r_extra)
    k = len(out_vars)
    if len(left) == 0 or len(right) == 0:
        return out_vars, np.empty((0, k), dtype=np.uint32)

    if not shared:  # disconnected remainder: cross product
        l_rep = np.repeat(left, len(right), axis=0)
        r_til = np.tile(right[:, r_extra], (len(left), 1))
        return out_vars, np.hstack([l_rep, r_til])

    l_cols = [l_vars.index(v) for v in shared]
    r_cols = [r_vars.index(v) for v in shared]
    # Build on the smaller input, probe with the larger.
    if len(right) <= len(left):
        b_rows, b_key_cols, b_extra = right, r_cols, r_extra
        p_rows, p_key_cols = left, l_cols
        probe_is_left = True
    else:
        b_rows, b_key_cols, b_extra = left, l_cols, list(range(left.shape[1]))
        p_rows, p_key_cols = right, r_cols
        probe_is_left = False

    b_keys = _pack(b_rows, b_key_cols)
    order = np.argsort(b_keys, kind="stable").astype(np.int32)
    b_sorted = b_keys[order]
    p_keys = _pack(p_rows, p_key_cols)
    lo = np.searchsorted(b_sorted, p_keys, side="left").astype(np.int32)
    hi = np.searchsorted(b_sorted, p_keys, side="right").astype(np.int32)
    counts = hi - lo
    total = int(counts.sum())
    if total == 0:
        return out_vars, np.empty((0, k), dtype=np.uint32)

    # Index arrays stay int32 and are updated in place: the expansion can
    # reach tens of millions of rows on adversarial inputs.
    probe_idx = np.repeat(np.arange(len(p_rows), dtype=np.int32), counts)
    build_idx = np.arange(total, dtype=np.int32)
    run_starts = np.cumsum(counts, dtype=np.int64).astype(np.int32)
    run_starts -= counts
    build_idx -= np.repeat(run_starts, counts)
    build_idx += np.repeat(lo, counts)
    build_idx = order[build_idx]

    out = np.empty((total, k), dtype=np.uint32)
    if probe_is_left:
        l_src, l_idx = p_rows, probe_idx
        r_src, r_idx, r_cols = b_rows, build_idx, b_extra
    else:
        l_src, l_idx = b_rows, build_idx
        r_src, r_idx, r_cols = p_rows, probe_idx, r_extra
    for j in range(l_src.shape[1]):
        out[:, j] = l_src[l_idx, j]
    for dst, j in enumerate(r_cols, start=l_src.shape[1]):
        out[:, dst] = r_src[r_idx, j]
    return out_vars, out


def _connected_order(patterns: list[ConjunctivePattern]) -> list[ConjunctivePattern]:
    remaining = [p for p in patterns if not p.fully_constant]
    ordered: list[ConjunctivePattern] = []
    bound: set[str] = set()
    while remaining:
        pick = None
        for p in remaining:
            pvars = {v for v in (p.subject_var, p.object_var) if v is not None}
            if not ordered or pvars & bound:
                pick = p
                break
        if pick is None:
            pick = remaining[0]
        ordered.append(pick)
        remaining.remove(pick)
        bound |= {v for v in (pick.subject_var, pick.object_var) if v is not None}
    return ordered


def pairwise_execute(query: ConjunctiveQuery, db: PartitionedDatabase) -> ExecResult:
    stats = ExecStats()
    out_vars = query.output_vars
    empty = ExecResult(out_vars, np.empty((0, len(out_vars)), dtype=np.uint32), stats)
    if query.guaranteed_empty:
        return empty
    for pat in query.prefilters:
        pairs = db.predicates[pat.pred_key].pairs
        hit = np.any((pairs[:, 0] == pat.subject_key) & (pairs[:, 1] == pat.object_key))
        if not hit:
            return empty

    ordered = _connected_order(query.patterns)
    acc_vars: tuple[str, ...] = ()
    acc: np.ndarray | None = None
    for i, pat in enumerate(ordered):
        vars_i, rows_i = _leaf(pat, db)
        if acc is None:
            acc_vars, acc = vars_i, rows_i
        else:
            acc_vars, acc = _hash_join(acc_vars, acc, vars_i, rows_i)
            if i < len(ordered) - 1:  # the last join's output is the result
                n = len(acc)
                stats.intermediate_tuple_count += n
                if n > stats.peak_intermediate_tuples:
                    stats.peak_intermediate_tuples = n
        if len(acc) == 0:
            break

    assert acc is not None
    if len(acc) == 0:
        return ExecResult(out_vars, np.empty((0, len(out_vars)), dtype=np.uint32), stats)
    idx = [acc_vars.index(v) for v in out_vars]
    rows = np.unique(acc[:, idx], axis=0)
    stats.output_count = len(rows)
    return ExecResult(out_vars, rows, stats)
