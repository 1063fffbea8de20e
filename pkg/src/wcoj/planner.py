"""GHD planning: enumeration, plan choice, attribute orders, pipeline marks.

Plans are rooted trees of nodes, each holding a set of hyperedges (lambda)
and the attributes they span (chi = union of lambda's attributes). Two
construction routes feed enumeration:

* partition family: set partitions of all edges arranged as rooted labeled
  trees, filtered by the running-intersection property;
* pushdown family: a backbone built the same way from the selection-free
  edges only, with each selection edge attached as a single-edge leaf under
  a backbone node that covers its free attributes.

With selection pushdown enabled, plan choice follows a three-step rule:
restrict to plans minimizing the width computed over non-selected attributes
only, then maximize selection depth (sum of selected attributes' node
depths), then minimize height, then break ties on a canonical form. With
pushdown disabled the classic criteria apply: width over all attributes,
then height, then canonical form.

Widths are exact rationals under the equal-cardinality convention, so a
triangle node is exactly 3/2.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from heapq import heappop, heappush

from .errors import PlanError
from .hypergraph import Edge, FractionalCover, Hypergraph, fhw_width

MAX_EDGES = 8

# A shape is the structure-only form of a plan: (sorted lambda indices,
# tuple of child shapes sorted canonically). Shapes are hashable, ordered,
# and independent of cardinalities, which makes them cacheable per query.
Shape = tuple


@dataclass
class GhdNode:
    id: int
    lam: tuple[int, ...]
    chi: frozenset
    depth: int
    parent_id: int | None
    children: list["GhdNode"] = field(default_factory=list)
    width: Fraction = Fraction(0)
    local_order: tuple[str, ...] = ()


@dataclass
class GhdPlan:
    root: GhdNode
    nodes: list[GhdNode]  # BFS order
    fhw: Fraction
    height: int
    selection_depth: int
    global_order: tuple[str, ...] = ()
    pipeline_edge: tuple[int, int] | None = None


def _set_partitions(items: list[int]):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        yield [[first]] + part


def _labeled_trees(k: int):
    """All labeled unrooted trees on k nodes as edge lists (Prüfer decode)."""
    if k == 1:
        yield []
        return
    if k == 2:
        yield [(0, 1)]
        return
    for seq in itertools.product(range(k), repeat=k - 2):
        degree = [1] * k
        for v in seq:
            degree[v] += 1
        heap = [i for i in range(k) if degree[i] == 1]
        heap.sort()
        edges = []
        for v in seq:
            leaf = heappop(heap)
            edges.append((leaf, v))
            degree[v] -= 1
            if degree[v] == 1:
                heappush(heap, v)
        edges.append((heappop(heap), heappop(heap)))
        yield edges


def _rooted_trees(k: int):
    """(root, parent array) for every rooted labeled tree on k nodes."""
    for edges in _labeled_trees(k):
        adj: list[list[int]] = [[] for _ in range(k)]
        for u, v in edges:
            adj[u].append(v)
            adj[v].append(u)
        for root in range(k):
            parent = [-1] * k
            stack = [root]
            seen = {root}
            while stack:
                u = stack.pop()
                for v in adj[u]:
                    if v not in seen:
                        seen.add(v)
                        parent[v] = u
                        stack.append(v)
            yield root, parent


def _running_intersection_ok(chis: list[frozenset], parent: list[int], root: int) -> bool:
    all_attrs = set().union(*chis) if chis else set()
    for attr in all_attrs:
        holders = {i for i, chi in enumerate(chis) if attr in chi}
        tops = sum(1 for i in holders if i == root or parent[i] not in holders)
        if tops != 1:
            return False
    return True


def _shape(parts: list[list[int]], parent: list[int], root: int) -> Shape:
    children: list[list[int]] = [[] for _ in parts]
    for i, p in enumerate(parent):
        if p >= 0:
            children[p].append(i)

    def build(i: int) -> Shape:
        return (tuple(sorted(parts[i])), tuple(sorted(build(c) for c in children[i])))

    return build(root)


def _partition_family(edges: list[Edge]):
    """All-edge partitions as rooted trees, running intersection enforced."""
    idx = list(range(len(edges)))
    for parts in _set_partitions(idx):
        chis = [frozenset(a for ei in part for a in edges[ei].attrs) for part in parts]
        for root, parent in _rooted_trees(len(parts)):
            if _running_intersection_ok(chis, parent, root):
                yield _shape(parts, parent, root)


def _pushdown_family(edges: list[Edge]):
    """Backbone over selection-free edges + one leaf per selection edge."""
    plain = [i for i, e in enumerate(edges) if not e.selections]
    sels = [i for i, e in enumerate(edges) if e.selections]
    if not plain or not sels:
        return
    for parts in _set_partitions(plain):
        chis = [frozenset(a for ei in part for a in edges[ei].attrs) for part in parts]
        k = len(parts)
        # Attachment candidates: backbone nodes holding an edge that covers
        # the selection edge's free (unselected) attributes.
        candidates: list[list[int]] = []
        for s in sels:
            free = set(edges[s].free_attrs)
            cand = [
                j
                for j in range(k)
                if any(free <= set(edges[e].attrs) for e in parts[j])
            ]
            candidates.append(cand)
        if any(not c for c in candidates):
            continue
        for root, parent in _rooted_trees(k):
            if not _running_intersection_ok(chis, parent, root):
                continue
            for choice in itertools.product(*candidates):
                full_parts = parts + [[s] for s in sels]
                full_parent = list(parent) + list(choice)
                full_chis = chis + [frozenset(edges[s].attrs) for s in sels]
                if _running_intersection_ok(full_chis, full_parent, root):
                    yield _shape(full_parts, full_parent, root)


def _shapes(h: Hypergraph) -> list[Shape]:
    """The canonical family: selection edges hang beneath covering backbone
    nodes whenever the query has both kinds of edges; otherwise plain
    partitions of whatever edges exist."""
    if len(h.edges) > MAX_EDGES:
        raise PlanError(f"too many edges to enumerate GHDs ({len(h.edges)} > {MAX_EDGES})")
    if not h.edges:
        raise PlanError("query has no join edges")
    has_sel = any(e.selections for e in h.edges)
    has_plain = any(not e.selections for e in h.edges)
    if has_sel and has_plain:
        out = set(_pushdown_family(h.edges))
        if out:
            return sorted(out)
    return sorted(set(_partition_family(h.edges)))


def _shape_nodes(shape: Shape):
    """Yield (shape-node, depth, parent-shape) preorder; children sorted."""
    stack = [(shape, 0, None)]
    while stack:
        node, depth, parent = stack.pop()
        yield node, depth, parent
        for child in node[1]:
            stack.append((child, depth + 1, node))


def _shape_metrics(shape: Shape, h: Hypergraph) -> tuple[Fraction, Fraction, int, int]:
    """(fhw over non-selected attrs, fhw over all attrs, selection depth, height)."""
    selected = set(h.selected)
    fhw_nonsel = Fraction(0)
    fhw_all = Fraction(0)
    seldepth = 0
    height = 0
    for node, depth, _ in _shape_nodes(shape):
        lam = [h.edges[i] for i in node[0]]
        chi = frozenset(a for e in lam for a in e.attrs)
        fhw_all = max(fhw_all, fhw_width(lam, chi))
        fhw_nonsel = max(fhw_nonsel, fhw_width(lam, chi - selected))
        height = max(height, depth)
        for e in lam:
            seldepth += depth * len(e.selections)
    return fhw_nonsel, fhw_all, seldepth, height


def _materialize(shape: Shape, h: Hypergraph, pushdown: bool) -> GhdPlan:
    fhw_nonsel, fhw_all, seldepth, height = _shape_metrics(shape, h)
    selected = set(h.selected)
    nodes: list[GhdNode] = []
    root = None
    queue: list[tuple[Shape, int | None, int]] = [(shape, None, 0)]
    while queue:
        snode, parent_id, depth = queue.pop(0)
        lam = snode[0]
        chi = frozenset(a for i in lam for a in h.edges[i].attrs)
        restrict = (chi - selected) if pushdown else chi
        node = GhdNode(
            id=len(nodes),
            lam=lam,
            chi=chi,
            depth=depth,
            parent_id=parent_id,
            width=fhw_width([h.edges[i] for i in lam], restrict),
        )
        nodes.append(node)
        if parent_id is None:
            root = node
        else:
            nodes[parent_id].children.append(node)
        for child in snode[1]:
            queue.append((child, node.id, depth + 1))
    assert root is not None
    return GhdPlan(
        root=root,
        nodes=nodes,
        fhw=fhw_nonsel if pushdown else fhw_all,
        height=height,
        selection_depth=seldepth,
    )


def enumerate_ghds(h: Hypergraph) -> list[GhdPlan]:
    """All structurally distinct GHDs of the canonical family."""
    return [_materialize(s, h, pushdown=True) for s in _shapes(h)]


def _structure_key(h: Hypergraph) -> tuple:
    return tuple(
        (e.name, e.attrs, tuple(sorted(e.selections)), e.diagonal) for e in h.edges
    )


_shape_cache: dict[tuple, Shape] = {}


def _choose_shape(h: Hypergraph, pushdown: bool) -> Shape:
    key = (_structure_key(h), pushdown)
    hit = _shape_cache.get(key)
    if hit is not None:
        return hit
    candidates = _shapes(h)
    metrics = {s: _shape_metrics(s, h) for s in candidates}
    if pushdown:
        # step 1: min fhw over non-selected attrs; step 3: max selection
        # depth; then min height, then canonical form.
        ranked = min(candidates, key=lambda s: (metrics[s][0], -metrics[s][2], metrics[s][3], s))
    else:
        # the pre-optimization criteria: fhw over all attributes, then height
        ranked = min(candidates, key=lambda s: (metrics[s][1], metrics[s][3], s))
    _shape_cache[key] = ranked
    return ranked


def global_attribute_order(plan: GhdPlan, h: Hypergraph, reorder: bool = True) -> tuple[str, ...]:
    """BFS order over nodes with the selection-first heuristic.

    With reordering on, all selected attributes come first (ascending by the
    cardinality of their selection's relation), then per BFS node the unseen
    attributes ascending by minimum incident-edge cardinality; ties always
    break on first appearance in the query text. With reordering off the
    order is plain BFS + first-appearance.
    """
    order: list[str] = []
    seen: set[str] = set()
    if reorder:
        sels = sorted(
            h.selected,
            key=lambda a: (h.selection_relation_cardinality(a), h.first_seen[a]),
        )
        order.extend(sels)
        seen.update(sels)
    for node in plan.nodes:  # BFS order
        fresh = [a for a in node.chi if a not in seen]
        if reorder:
            fresh.sort(key=lambda a: (h.min_incident_cardinality(a), h.first_seen[a]))
        else:
            fresh.sort(key=lambda a: h.first_seen[a])
        order.extend(fresh)
        seen.update(fresh)
    return tuple(order)


def mark_pipeline_edges(plan: GhdPlan) -> GhdPlan:
    """Mark at most one (root, child) pair whose shared attributes form a
    common prefix of both trie orders; first BFS child wins."""
    plan.pipeline_edge = None
    root = plan.root
    for child in root.children:
        shared = root.chi & child.chi
        n = len(shared)
        if n == 0:
            continue
        if set(root.local_order[:n]) == shared and set(child.local_order[:n]) == shared:
            plan.pipeline_edge = (root.id, child.id)
            break
    return plan


def choose_plan(
    h: Hypergraph, *, pushdown: bool = True, reorder: bool = True
) -> GhdPlan:
    """Pick the plan, fix the attribute order, and mark pipelining."""
    shape = _choose_shape(h, pushdown)
    plan = _materialize(shape, h, pushdown)
    plan.global_order = global_attribute_order(plan, h, reorder)
    rank = {a: i for i, a in enumerate(plan.global_order)}
    for node in plan.nodes:
        node.local_order = tuple(sorted(node.chi, key=rank.__getitem__))
    return mark_pipeline_edges(plan)


def validate_ghd(plan: GhdPlan, h: Hypergraph) -> list[str]:
    """Check definition properties 1-4; empty list means valid."""
    problems = []
    chis = {n.id: n.chi for n in plan.nodes}
    for e in h.edges:
        if not any(set(e.attrs) <= chi for chi in chis.values()):
            problems.append(f"edge {e.name} covered by no node (property 1)")
    parent = {n.id: n.parent_id for n in plan.nodes}
    for attr in h.vertices:
        holders = {n.id for n in plan.nodes if attr in n.chi}
        if not holders:
            continue
        tops = sum(1 for i in holders if parent[i] is None or parent[i] not in holders)
        if tops != 1:
            problems.append(f"attribute {attr} nodes are disconnected (property 2)")
    for n in plan.nodes:
        lam_attrs = set(a for i in n.lam for a in h.edges[i].attrs)
        if not n.chi <= lam_attrs:
            problems.append(f"node {n.id} has chi outside lambda (properties 3-4)")
    return problems


def explain_text(plan: GhdPlan, h: Hypergraph, cover: FractionalCover | None = None) -> str:
    """Human-readable plan dump; stable across runs for golden tests."""
    lines = []
    lines.append("attribute order: " + " ".join(plan.global_order))
    lines.append(f"fhw: {plan.fhw}")
    lines.append(f"height: {plan.height}")
    lines.append(f"selection depth: {plan.selection_depth}")
    if cover is not None:
        lines.append(f"AGM bound: {cover.bound:.6e}")
        weights = " ".join(
            f"{e.name}={w:.4f}" for e, w in zip(h.edges, cover.weights)
        )
        lines.append(f"edge weights: {weights}")

    def render(node: GhdNode, indent: int) -> None:
        lam = ",".join(h.edges[i].name for i in node.lam)
        chi = ",".join(sorted(node.chi))
        mark = ""
        if plan.pipeline_edge and node.id == plan.pipeline_edge[1]:
            mark = " [pipelined]"
        sels = [
            f"{a}={h.edges[h.selected[a]].selections[a]}"
            for a in sorted(node.chi & set(h.selected))
            if h.selected[a] in node.lam
        ]
        sel_txt = f" sel({','.join(sels)})" if sels else ""
        lines.append(
            "  " * indent
            + f"node {node.id}: lambda=[{lam}] chi=[{chi}] width={node.width}"
            + f" order=[{' '.join(node.local_order)}]{sel_txt}{mark}"
        )
        for c in node.children:
            render(c, indent + 1)

    render(plan.root, 0)
    return "\n".join(lines) + "\n"
