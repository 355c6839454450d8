"""Min-cut query planning over colored hierarchy trees.

The colored tree becomes a flow network: a source feeds every grey node
through an infinite edge, every white node plus a synthetic root drains into
a sink through infinite edges, and each containment edge (child to parent)
carries unit capacity in both directions. Every unit edge stands for one data
point, the child cell's stored summary. A finite s-t cut assigns the partial
nodes to the source or sink side; each crossing unit edge contributes the
child's value, positive when the child sits on the source side and negative
otherwise, and every finite cut evaluates to the exact region aggregate. The
minimum cut therefore selects the fewest data points that answer the query.

For several queries at once the individual graphs are merged: a cell colored
the same way in every query keeps a single node, while a cell appearing in
different color groups gets one replica per group. When a grey or white
replica coexists with a partial replica of the same cell, a small gadget node
funnels both through a single unit edge so that no two edges of one data
point can ever cross the same cut; the one min cut then yields all per-query
plans and the shared retrieval set.

Infinity is a sentinel capacity one above the total unit capacity, so an
infeasible instance (possible only after failures) is detected by the flow
value exceeding that budget.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InfeasibleError, ValidationError
from .hierarchy import Cell, Color, CubeHierarchy, HierarchyTree

SOURCE = 0
SINK = 1
ROOT = 2


@dataclass(frozen=True)
class DataArc:
    """A unit arc standing for one retrievable data point."""

    arc: int          # forward arc index
    u: int            # tail node
    v: int            # head node
    cell: Cell
    sign: int
    base: frozenset[int]   # queries that always use the point when the arc crosses
    cond: frozenset[int]   # queries that use it iff the cell's partial replica
                           # sits on the matching side (S for +, T for -)


@dataclass(frozen=True)
class QueryPlan:
    terms: tuple[tuple[object, int], ...]  # (data point, sign)
    value: object

    @property
    def size(self) -> int:
        return len(self.terms)

    def points(self) -> set:
        return {p for p, _ in self.terms}


class FlowGraph:
    """Immutable flow network; solving copies capacities into scratch arrays."""

    def __init__(self, num_queries, node_kind, adj, arc_to, arc_cap,
                 data_arcs, u_node, unit_count, failed=frozenset()):
        self.num_queries = num_queries
        self.node_kind = node_kind      # per node: "s"/"t"/"root" or (cell, role)
        self.adj = adj
        self.arc_to = arc_to
        self.arc_cap = arc_cap
        self.data_arcs = data_arcs
        self.u_node = u_node            # cell -> partial replica node id
        self.unit_count = unit_count
        self.inf = unit_count + 1
        self.failed = failed

    @property
    def node_count(self) -> int:
        return len(self.node_kind)

    def free_nodes(self) -> list[int]:
        """Partial replicas, the only nodes a finite cut may place freely."""
        return sorted(self.u_node.values())

    def forced_side(self, node: int) -> str | None:
        kind = self.node_kind[node]
        if kind == "s":
            return "S"
        if kind in ("t", "root"):
            return "T"
        role = kind[1]
        if role in ("G", "M+"):
            return "S"
        if role in ("W", "M-"):
            return "T"
        return None


def _record_colors(trees: Sequence[HierarchyTree]) -> dict[Cell, dict[int, Color]]:
    colors: dict[Cell, dict[int, Color]] = {}
    for qi, tree in enumerate(trees):
        if tree.root.color is Color.GREY:
            # Region covers the whole grid: the usable data points are the
            # top-level cells, all grey.
            for top in tree.hierarchy.top_cells:
                colors.setdefault(top, {})[qi] = Color.GREY
            continue
        stack = list(tree.root.children)
        while stack:
            node = stack.pop()
            colors.setdefault(node.cell, {})[qi] = node.color
            stack.extend(node.children)
    return colors


def _build_graph(trees: Sequence[HierarchyTree]) -> FlowGraph:
    h = trees[0].hierarchy
    if any(t.hierarchy is not h for t in trees[1:]):
        raise ValidationError("all trees must be colored over the same hierarchy")

    colors = _record_colors(trees)
    cells = sorted(colors, key=lambda c: (-c.level, c.bounds.y0, c.bounds.x0))

    node_kind: list = ["s", "t", "root"]
    adj: list[list[int]] = [[], [], []]

    def new_node(kind) -> int:
        node_kind.append(kind)
        adj.append([])
        return len(node_kind) - 1

    arc_to: list[int] = []
    arc_cap: list[int] = []

    def add_arc(u, v, cap) -> int:
        i = len(arc_to)
        arc_to.extend((v, u))
        arc_cap.extend((cap, 0))
        adj[u].append(i)
        adj[v].append(i + 1)
        return i

    g_node: dict[Cell, int] = {}
    w_node: dict[Cell, int] = {}
    u_node: dict[Cell, int] = {}
    for cell in cells:
        qcolors = colors[cell]
        if any(c is Color.PARTIAL for c in qcolors.values()):
            u_node[cell] = new_node((cell, "U"))
        if any(c is Color.GREY for c in qcolors.values()):
            g_node[cell] = new_node((cell, "G"))
        if any(c is Color.WHITE for c in qcolors.values()):
            w_node[cell] = new_node((cell, "W"))

    # Unit capacities are assigned first as placeholders and patched once the
    # total unit count (and so the infinity sentinel) is known.
    pending_inf: list[int] = []
    raw: list[tuple] = []  # (u, v, cell, sign, base, cond)

    def data_arc(u, v, cell, sign, base, cond):
        raw.append((u, v, cell, sign, frozenset(base), frozenset(cond)))

    pending_inf.append(add_arc(ROOT, SINK, 0))
    for node in g_node.values():
        pending_inf.append(add_arc(SOURCE, node, 0))
    for node in w_node.values():
        pending_inf.append(add_arc(node, SINK, 0))

    for cell in cells:
        qcolors = colors[cell]
        greys = {q for q, c in qcolors.items() if c is Color.GREY}
        whites = {q for q, c in qcolors.items() if c is Color.WHITE}
        parts = {q for q, c in qcolors.items() if c is Color.PARTIAL}
        if cell.level == h.height:
            parent = ROOT
        else:
            parent = u_node[h.cell_at(cell.level + 1, (cell.bounds.x0, cell.bounds.y0))]

        if parts:
            # The gadgets below merge a forced-side replica's parent edge
            # with the partial replica's, so one crossing serves both and no
            # cut can ever charge the same data point twice.
            xu = u_node[cell]
            if greys:
                m = new_node((cell, "M+"))
                pending_inf.append(add_arc(g_node[cell], m, 0))
                pending_inf.append(add_arc(xu, m, 0))
                data_arc(m, parent, cell, +1, greys, parts)
            if whites:
                m = new_node((cell, "M-"))
                pending_inf.append(add_arc(m, w_node[cell], 0))
                pending_inf.append(add_arc(m, xu, 0))
                data_arc(parent, m, cell, -1, whites, parts)
            if not greys:
                data_arc(xu, parent, cell, +1, set(), parts)
            if not whites:
                data_arc(parent, xu, cell, -1, set(), parts)
        else:
            if greys:
                data_arc(g_node[cell], parent, cell, +1, greys, set())
            if whites:
                data_arc(parent, w_node[cell], cell, -1, whites, set())

    data_arcs = []
    for u, v, cell, sign, base, cond in raw:
        i = add_arc(u, v, 1)
        data_arcs.append(DataArc(i, u, v, cell, sign, base, cond))
    unit_count = len(data_arcs)
    inf = unit_count + 1
    for i in pending_inf:
        arc_cap[i] = inf

    return FlowGraph(len(trees), node_kind, adj, arc_to, arc_cap,
                     data_arcs, u_node, unit_count)


def build_flow_graph(tree: HierarchyTree) -> FlowGraph:
    return _build_graph([tree])


def mark_failed(g: FlowGraph, failed_cells: Iterable[Cell]) -> FlowGraph:
    """Raise the capacity of each failed cell's data-point edges to infinity.

    An infinite edge can never be part of a finite cut, so the planner is
    forced around the failed summaries or reports infeasibility.
    """
    failed = g.failed | frozenset(failed_cells)
    cap = list(g.arc_cap)
    for da in g.data_arcs:
        if da.cell in failed:
            cap[da.arc] = g.inf
    return FlowGraph(g.num_queries, g.node_kind, g.adj, g.arc_to, cap,
                     g.data_arcs, g.u_node, g.unit_count, failed)


def _max_flow(g: FlowGraph) -> tuple[int, list[int]]:
    """Edmonds-Karp; returns (flow value, residual capacities)."""
    cap = list(g.arc_cap)
    adj = g.adj
    to = g.arc_to
    total = 0
    n = g.node_count
    while True:
        parent_arc = [-1] * n
        parent_arc[SOURCE] = -2
        queue = deque([SOURCE])
        while queue:
            u = queue.popleft()
            if u == SINK:
                break
            for i in adj[u]:
                v = to[i]
                if cap[i] > 0 and parent_arc[v] == -1:
                    parent_arc[v] = i
                    queue.append(v)
        if parent_arc[SINK] == -1:
            return total, cap
        bottleneck = None
        v = SINK
        while v != SOURCE:
            i = parent_arc[v]
            bottleneck = cap[i] if bottleneck is None else min(bottleneck, cap[i])
            v = to[i ^ 1]
        v = SINK
        while v != SOURCE:
            i = parent_arc[v]
            cap[i] -= bottleneck
            cap[i ^ 1] += bottleneck
            v = to[i ^ 1]
        total += bottleneck


def _reachable(g: FlowGraph, residual: list[int]) -> set[int]:
    seen = {SOURCE}
    queue = deque([SOURCE])
    while queue:
        u = queue.popleft()
        for i in g.adj[u]:
            v = g.arc_to[i]
            if residual[i] > 0 and v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


def _solve(g: FlowGraph):
    flow, residual = _max_flow(g)
    reach = _reachable(g, residual)
    crossing = tuple(da for da in g.data_arcs if da.u in reach and da.v not in reach)
    return flow, reach, crossing, residual


def _extract_plans(g: FlowGraph, h: CubeHierarchy, reach: set[int],
                   crossing: Sequence[DataArc]) -> tuple[list[QueryPlan], set[Cell]]:
    per_query: list[list[tuple[Cell, int]]] = [[] for _ in range(g.num_queries)]
    retrieval: set[Cell] = set()
    for da in crossing:
        retrieval.add(da.cell)
        users = set(da.base)
        if da.cond:
            xu = g.u_node[da.cell]
            side = "S" if xu in reach else "T"
            wanted = "S" if da.sign > 0 else "T"
            if side == wanted:
                users.update(da.cond)
        for q in users:
            per_query[q].append((da.cell, da.sign))
    plans = []
    for terms in per_query:
        terms.sort(key=lambda t: (-t[1], -t[0].level, t[0].bounds.y0, t[0].bounds.x0))
        value = sum(s * h.value(c) for c, s in terms)
        plans.append(QueryPlan(tuple(terms), value))
    return plans, retrieval


def _check_feasible(g: FlowGraph, flow: int, residual: list[int]):
    if flow > g.unit_count:
        # The failed data points actually carrying flow are the ones whose
        # unreadable summaries block every finite cut.
        blocking = {da.cell for da in g.data_arcs
                    if da.cell in g.failed and residual[da.arc] < g.arc_cap[da.arc]}
        raise InfeasibleError(
            f"no finite cut: min cut {flow} exceeds unit budget {g.unit_count}",
            blocking=blocking)


def min_cut_plan(g: FlowGraph, h: CubeHierarchy) -> QueryPlan:
    """The provably smallest signed data-point set answering the query.

    Raises InfeasibleError (with the blocking cells) when failures leave no
    finite cut. Ties between minimum cuts resolve to the canonical cut whose
    source side is the residual-reachability set, the unique minimal one.
    """
    flow, reach, crossing, residual = _solve(g)
    _check_feasible(g, flow, residual)
    plans, _ = _extract_plans(g, h, reach, crossing)
    return plans[0]


@dataclass(frozen=True)
class CombinedResult:
    plans: tuple[QueryPlan, ...]
    retrieval: frozenset[Cell]
    cut_size: int
    from_combined: bool  # False when independent per-query optima were smaller


def combined_plan(trees: Sequence[HierarchyTree], h: CubeHierarchy,
                  failed_cells: Iterable[Cell] = ()) -> CombinedResult:
    """Jointly plan several queries, sharing data points across them.

    Solves one min cut over the merged graph and reads each query's plan off
    its own subgraph. Sharing a partial node across queries couples their cut
    decisions, which on rare inputs costs more than planning each query alone,
    so the independently-optimized union is kept as a fallback and the smaller
    retrieval set wins.
    """
    failed = frozenset(failed_cells)
    g = _build_graph(list(trees))
    if failed:
        g = mark_failed(g, failed)
    flow, reach, crossing, residual = _solve(g)
    _check_feasible(g, flow, residual)
    plans, retrieval = _extract_plans(g, h, reach, crossing)

    individual_plans = []
    individual_points: set[Cell] = set()
    for tree in trees:
        gi = build_flow_graph(tree)
        if failed:
            gi = mark_failed(gi, failed)
        plan = min_cut_plan(gi, h)
        individual_plans.append(plan)
        individual_points.update(plan.points())

    if len(individual_points) < len(retrieval):
        return CombinedResult(tuple(individual_plans), frozenset(individual_points),
                              len(individual_points), from_combined=False)
    return CombinedResult(tuple(plans), frozenset(retrieval), flow, from_combined=True)
