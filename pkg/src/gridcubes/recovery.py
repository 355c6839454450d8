"""Reconstruction of lost values and query answers after node/area failures.

Node values: every stored prefix satisfies the local combination identity, so
a failed node's entry is solvable from a neighbouring 2x2 square, reading the
square's other three nodes (plus the solver's own lower-level value). Junction
values: a failed junction's cell sum is rebuilt from the next-level prefixes
stored at its south-east peer junctions, from one extra stored slot at the
three immediate neighbours in redundant mode, or by complementing the parent
sum against alive siblings.

Query recovery walks failed areas bottom-up: the requested failed portion is
grown level by level until it is enclosed by readable cells; if the enclosure
ends up larger than requested, the answer falls back to a uniformity estimate
that scales the recovered sum by the requested/recovered area ratio, taken
over the smallest recoverable enclosure. Queries untouched by failures plan
exactly as usual.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .errors import InfeasibleError, RecoveryError
from .flow import build_flow_graph, mark_failed, min_cut_plan
from .grid import Coord, RectilinearRegion
from .hierarchy import Cell, CubeHierarchy, HierarchyConfig, cell_of, color_tree
from .protocol import NodeState, junction_level, node_slot


@dataclass(frozen=True)
class FailureSet:
    nodes: frozenset[Coord] = frozenset()
    cells: frozenset[Cell] = frozenset()

    @classmethod
    def of(cls, nodes=(), cells=()) -> "FailureSet":
        return cls(frozenset(nodes), frozenset(cells))

    def area(self) -> frozenset[Coord]:
        out = set(self.nodes)
        for c in self.cells:
            out.update(c.bounds.coords())
        return frozenset(out)


class RecoveryKind(Enum):
    EXACT = "exact"
    ESTIMATE = "estimate"
    UNRECOVERABLE = "unrecoverable"


@dataclass(frozen=True)
class RecoveryResult:
    kind: RecoveryKind
    value: object  # int, Fraction or None when unrecoverable
    recovered_area: frozenset[Coord]
    requested_area: frozenset[Coord]
    points_read: int


@dataclass(frozen=True)
class Reconstruction:
    value: object
    donors: tuple[Coord, ...]
    reads: int
    distance: int = 0


def _chebyshev(a: Coord, b: Coord) -> int:
    return max(abs(a[0] - b[0]), abs(a[1] - b[1]))


def recover_node(states: dict[Coord, NodeState], failed: Coord, level: int,
                 config: HierarchyConfig) -> Reconstruction:
    """Rebuild a failed node's stored level value from one neighbour square.

    Tries the squares where the failed node plays the c, b and a role, in
    that order; a square is usable when the failed term survives the cell
    boundary resets and the remaining terms are held by alive nodes.
    """
    fx, fy = failed
    side = config.side(level)
    w, h = config.dims.width, config.dims.height
    for role, m in (("c", (fx + 1, fy + 1)), ("b", (fx + 1, fy)), ("a", (fx, fy + 1))):
        mx, my = m
        if mx >= w or my >= h:
            continue
        reset_x = mx % side == 0
        reset_y = my % side == 0
        terms = {}  # position -> coefficient in T(m) = A + B - C + D
        if not reset_y:
            terms[(mx, my - 1)] = +1
        if not reset_x:
            terms[(mx - 1, my)] = +1
        if not (reset_x or reset_y):
            terms[(mx - 1, my - 1)] = -1
        if failed not in terms:
            continue
        lhs = node_slot(states, m, level)
        if lhs is None:
            continue
        reads = 1
        donors = {m}
        if junction_level(m, config) >= level - 1:
            d = node_slot(states, m, level - 1)
            if d is None:
                continue
            lhs -= d
            reads += 1
        ok = True
        acc = lhs
        for pos, coef in terms.items():
            if pos == failed:
                continue
            v = node_slot(states, pos, level)
            if v is None:
                ok = False
                break
            acc -= coef * v
            donors.add(pos)
            reads += 1
        if not ok:
            continue
        value = acc if terms[failed] == 1 else -acc
        return Reconstruction(value, tuple(sorted(donors)), reads)
    raise RecoveryError(f"no usable neighbour square for {failed} at level {level}")


def _child_layout(config: HierarchyConfig, parent: Cell, level: int):
    """(junction coordinate function, columns, rows) of parent's child grid."""
    side = config.side(level)
    b = parent.bounds
    cols = (b.width + side - 1) // side
    rows = (b.height + side - 1) // side

    def junction(i: int, j: int) -> Coord:
        return (min(b.x0 + (i + 1) * side, b.x1 + 1) - 1,
                min(b.y0 + (j + 1) * side, b.y1 + 1) - 1)

    return junction, cols, rows


def _linear_block_solve(b_of, child_of, cols, rows, target):
    """Solve the block-prefix identities of one parent cell for a child sum.

    b_of(i, j) and child_of(i, j) return the stored next-level prefix and the
    child cell sum at child (i, j), or None when that junction is dead. Every
    alive junction contributes the identity B(i,j) = B(i-1,j) + B(i,j-1) -
    B(i-1,j-1) + childV(i,j); dead prefixes become variables and the system
    is eliminated exactly. Returns (value or None, positions read).
    """
    known: dict = {}
    variables: dict = {}
    used: set = set()
    for j in range(rows):
        for i in range(cols):
            v = b_of(i, j)
            if v is None:
                variables[(i, j)] = len(variables)
            else:
                known[(i, j)] = Fraction(v)

    def expr(i, j):
        if i < 0 or j < 0:
            return {}, Fraction(0)
        if (i, j) in known:
            used.add((i, j))
            return {}, known[(i, j)]
        return {variables[(i, j)]: Fraction(1)}, Fraction(0)

    def identity_expr(i, j):
        coeffs: dict = {}
        const = Fraction(0)
        for di, dj, sign in ((i, j, 1), (i - 1, j, -1), (i, j - 1, -1), (i - 1, j - 1, 1)):
            c, k = expr(di, dj)
            for var, co in c.items():
                coeffs[var] = coeffs.get(var, Fraction(0)) + sign * co
            const += sign * k
        return {v: c for v, c in coeffs.items() if c}, const

    pivots: dict = {}  # var -> (coeffs, rhs) in echelon form

    def reduce(coeffs, rhs):
        coeffs = dict(coeffs)
        while True:
            var = next((v for v in coeffs if v in pivots), None)
            if var is None:
                return coeffs, rhs
            factor = coeffs.pop(var)
            pc, pr = pivots[var]
            for v, c in pc.items():
                coeffs[v] = coeffs.get(v, Fraction(0)) - factor * c
                if not coeffs[v]:
                    del coeffs[v]
            rhs -= factor * pr

    for j in range(rows):
        for i in range(cols):
            cv = child_of(i, j)
            if cv is None:
                continue
            used.add((i, j))
            coeffs, const = identity_expr(i, j)
            coeffs, rhs = reduce(coeffs, Fraction(cv) - const)
            if coeffs:
                var = next(iter(coeffs))
                factor = coeffs.pop(var)
                pivots[var] = ({v: c / factor for v, c in coeffs.items()}, rhs / factor)

    coeffs, const = identity_expr(*target)
    coeffs, rhs = reduce(coeffs, -const)
    if coeffs:
        return None, sorted(used)
    return -rhs, sorted(used)


def recover_junction(states: dict[Coord, NodeState], failed: Coord, level: int,
                     config: HierarchyConfig, redundant: bool = False) -> Reconstruction:
    """Rebuild V(cell) for the level-`level` cell whose junction failed.

    The fast path reads the south-east peer junctions of the parent cell
    (plus the north-west peers for interior children); redundant mode solves
    the next-level identity from the 3 immediate neighbours when the failed
    junction opens its parent cell. When donors are dead too, all available
    block-prefix identities of the parent cell are solved jointly, recovering
    the parent total from the next level up if its junction is the failed
    node itself.
    """
    if junction_level(failed, config) < level:
        raise RecoveryError(f"{failed} is not a junction for level {level}")
    fx, fy = failed
    w, h = config.dims.width, config.dims.height
    cell = cell_of(config, level, failed)
    if level >= config.height:
        raise RecoveryError(f"junction {failed} at top level has no recovery donors")
    parent = cell_of(config, level + 1, failed)
    junction, cols, rows = _child_layout(config, parent, level)
    p = (cell.bounds.x0 - parent.bounds.x0) // config.side(level)
    q = (cell.bounds.y0 - parent.bounds.y0) // config.side(level)

    if redundant:
        first_child = (p, q) == (0, 0)
        slot = level + 1
        side = config.side(slot)
        m = (fx + 1, fy + 1)
        if (first_child and m[0] < w and m[1] < h
                and m[0] % side != 0 and m[1] % side != 0):
            a, b = (fx + 1, fy), (fx, fy + 1)
            va = node_slot(states, a, slot)
            vb = node_slot(states, b, slot)
            vm = node_slot(states, m, slot)
            if None not in (va, vb, vm):
                value = va + vb - vm
                reads = 3
                if junction_level(m, config) >= slot - 1:
                    d = node_slot(states, m, slot - 1)
                    if d is not None:
                        value += d
                        reads += 1
                return Reconstruction(value, (a, b, m), reads, distance=3)

    if p + 1 < cols and q + 1 < rows:
        south, east, se = junction(p, q + 1), junction(p + 1, q), junction(p + 1, q + 1)
        b_s = node_slot(states, south, level + 1)
        b_e = node_slot(states, east, level + 1)
        b_se = node_slot(states, se, level + 1)
        v_se = node_slot(states, se, level)
        if None not in (b_s, b_e, b_se, v_se):
            b_pq = b_s + b_e - b_se + v_se
            donors = [south, east, se]
            reads = 4
            value = b_pq
            ok = True
            for di, dj, sign in ((p - 1, q, -1), (p, q - 1, -1), (p - 1, q - 1, +1)):
                if di < 0 or dj < 0:
                    continue
                peer = junction(di, dj)
                bv = node_slot(states, peer, level + 1)
                if bv is None:
                    ok = False
                    break
                value += sign * bv
                donors.append(peer)
                reads += 1
            if ok:
                distance = sum(_chebyshev(failed, d) for d in donors)
                return Reconstruction(value, tuple(donors), reads, distance)

    def b_of(i, j):
        return node_slot(states, junction(i, j), level + 1)

    def child_of(i, j):
        return node_slot(states, junction(i, j), level)

    value, used = _linear_block_solve(b_of, child_of, cols, rows, (p, q))
    extra_donors: tuple[Coord, ...] = ()
    extra_reads = 0
    if value is None and node_slot(states, parent.junction, level + 1) is None:
        upper = recover_junction(states, parent.junction, level + 1, config, redundant)
        extra_donors, extra_reads = upper.donors, upper.reads

        def b_patched(i, j, total=upper.value):
            if (i, j) == (cols - 1, rows - 1):
                return total
            return b_of(i, j)

        value, used = _linear_block_solve(b_patched, child_of, cols, rows, (p, q))
    if value is None:
        raise RecoveryError(f"block identities underdetermined for {failed} at level {level}")
    if value.denominator == 1:
        value = int(value)
    donors = tuple(dict.fromkeys([junction(i, j) for i, j in used] + list(extra_donors)))
    reads = 2 * len(used) + extra_reads
    distance = sum(_chebyshev(failed, d) for d in donors)
    return Reconstruction(value, donors, reads, distance)


def failed_datapoints(h: CubeHierarchy, failures: FailureSet) -> set[Cell]:
    """Cells whose stored summary is lost: junction inside the failed area,
    plus the readings of the failed nodes themselves."""
    area = failures.area()
    out: set[Cell] = set()
    for p in area:
        out.add(Cell(0, cell_of(h.config, 0, p).bounds))
        for cell in h.cells_at(p):
            out.add(cell)
    return out


def _cell_readable(h: CubeHierarchy, cell: Cell, area: frozenset[Coord]) -> int | None:
    """Reads needed to obtain V(cell) under the failure area, or None.

    Mirrors recover_junction's donor algebra on the hierarchy: a cell whose
    junction died is solvable from the surviving block-prefix identities of
    its parent cell, recovering the parent total from the next level up when
    that junction died too.
    """
    if cell.level == 0:
        p = (cell.bounds.x0, cell.bounds.y0)
        return 1 if p not in area else None
    if cell.junction not in area:
        return 1
    config = h.config
    if cell.level >= config.height:
        return None
    parent = cell_of(config, cell.level + 1, cell.junction)
    junction, cols, rows = _child_layout(config, parent, cell.level)
    p = (cell.bounds.x0 - parent.bounds.x0) // config.side(cell.level)
    q = (cell.bounds.y0 - parent.bounds.y0) // config.side(cell.level)

    def child_value(i, j):
        return h.value(h.cell_at(cell.level, junction(i, j)))

    def b_of(i, j):
        if junction(i, j) in area:
            return None
        return sum(child_value(a, b) for a in range(i + 1) for b in range(j + 1))

    def child_of(i, j):
        return None if junction(i, j) in area else child_value(i, j)

    value, used = _linear_block_solve(b_of, child_of, cols, rows, (p, q))
    extra = 0
    if value is None and parent.junction in area:
        upper = _cell_readable(h, parent, area)
        if upper is None:
            return None
        extra = upper

        def b_patched(i, j):
            if (i, j) == (cols - 1, rows - 1):
                return h.value(parent)
            return b_of(i, j)

        value, used = _linear_block_solve(b_patched, child_of, cols, rows, (p, q))
    if value is None:
        return None
    return 2 * len(used) + extra


def _components(area: frozenset[Coord]) -> list[frozenset[Coord]]:
    remaining = set(area)
    out = []
    while remaining:
        seed = min(remaining, key=lambda p: (p[1], p[0]))
        comp = {seed}
        stack = [seed]
        remaining.discard(seed)
        while stack:
            x, y = stack.pop()
            for n in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
                if n in remaining:
                    remaining.discard(n)
                    comp.add(n)
                    stack.append(n)
        out.append(frozenset(comp))
    return out


def _exact_over(h: CubeHierarchy, region: RectilinearRegion, failed: set[Cell]) -> tuple[object, int]:
    """Exact sum over an all-alive region, preferring the min-cut plan."""
    if not region:
        return 0, 0
    g = mark_failed(build_flow_graph(color_tree(h, region)), failed)
    try:
        plan = min_cut_plan(g, h)
        return plan.value, plan.size
    except InfeasibleError:
        total = sum(h.values.at(p) for p in region.cells)
        return total, len(region)


def recover_region(h: CubeHierarchy, failures: FailureSet,
                   query: RectilinearRegion) -> RecoveryResult:
    """Answer a query across failures, exactly when possible.

    Each failed component intersecting the query is grown level by level
    until a readable enclosure is found; its sum is the enclosing cells'
    values minus the alive remainder. An enclosure larger than the requested
    part yields a uniformity estimate scaled by the area ratio.
    """
    area = failures.area()
    failed_dps = failed_datapoints(h, failures)
    q_failed = frozenset(query.cells & area)
    q_alive = RectilinearRegion(query.cells - area)
    exact_value, reads = _exact_over(h, q_alive, failed_dps)

    if not q_failed:
        return RecoveryResult(RecoveryKind.EXACT, exact_value,
                              frozenset(), frozenset(), reads)

    total = exact_value
    recovered: set[Coord] = set()
    any_estimate = False
    pending = set(q_failed)
    while pending:
        seed = min(pending, key=lambda p: (p[1], p[0]))
        comp = next(c for c in _components(area) if seed in c)
        requested = frozenset(q_failed & comp)
        grown = requested
        portion = None
        for level in range(1, h.height + 1):
            cells = {h.cell_at(level, p) for p in grown}
            covered = set()
            for c in cells:
                covered.update(c.bounds.coords())
            grown = frozenset(area & covered)
            cell_reads = [_cell_readable(h, c, area) for c in sorted(
                cells, key=lambda c: (c.bounds.y0, c.bounds.x0))]
            if any(r is None for r in cell_reads):
                continue
            value = sum(h.value(c) for c in cells)
            alive_inside = covered - set(grown)
            value -= sum(h.values.at(p) for p in alive_inside)
            reads += sum(cell_reads) + len(alive_inside)
            portion = (value, grown)
            break
        if portion is None:
            return RecoveryResult(RecoveryKind.UNRECOVERABLE, None,
                                  frozenset(recovered), q_failed, reads)
        value, grown = portion
        wanted = frozenset(query.cells & grown)
        if wanted == grown:
            total += value
        else:
            any_estimate = True
            total += Fraction(value) * Fraction(len(wanted), len(grown))
        recovered.update(grown)
        pending -= grown

    if isinstance(total, Fraction) and total.denominator == 1:
        total = int(total)
    kind = RecoveryKind.ESTIMATE if any_estimate else RecoveryKind.EXACT
    return RecoveryResult(kind, total, frozenset(recovered), q_failed, reads)


def plan_with_failures(h: CubeHierarchy, failures: FailureSet,
                       query: RectilinearRegion):
    """Exact min-cut plan avoiding failed data points, else region recovery.

    Returns a QueryPlan when a finite cut exists and a RecoveryResult (exact,
    estimated or unrecoverable) otherwise.
    """
    failed_dps = failed_datapoints(h, failures)
    g = mark_failed(build_flow_graph(color_tree(h, query)), failed_dps)
    try:
        return min_cut_plan(g, h)
    except InfeasibleError:
        return recover_region(h, failures, query)
