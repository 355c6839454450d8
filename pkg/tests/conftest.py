"""Shared oracles and generators for the test suite.

Oracles here are deliberately independent of the implementation paths they
check: corner classification is re-derived by scanning every lattice point,
cover minimality by branch-and-bound exact cover, cut properties by
enumerating all partial-node assignments, and prefix-sum answers by direct
summation.
"""

from __future__ import annotations

import random

import pytest

from gridcubes.grid import GridValues, RectilinearRegion
from gridcubes.hierarchy import CubeHierarchy, cell_of


@pytest.fixture
def rng():
    return random.Random(20240817)


def random_region(rng: random.Random, width: int, height: int,
                  max_rects: int = 3, span: int | None = None) -> RectilinearRegion:
    """Union of 1..max_rects random rectangles, guaranteed non-empty."""
    span = span or max(width, height)
    cells: set = set()
    for _ in range(rng.randint(1, max_rects)):
        x0 = rng.randrange(width)
        y0 = rng.randrange(height)
        x1 = min(width - 1, x0 + rng.randrange(span))
        y1 = min(height - 1, y0 + rng.randrange(span))
        cells.update((x, y) for x in range(x0, x1 + 1) for y in range(y0, y1 + 1))
    return RectilinearRegion(frozenset(cells))


def scan_corners(region: RectilinearRegion, width: int, height: int):
    """Classify every lattice point by direct 4-cell neighbourhood scan."""
    convex, concave = [], []
    for ly in range(height + 1):
        for lx in range(width + 1):
            n = sum(((cx, cy) in region.cells)
                    for cx, cy in ((lx - 1, ly - 1), (lx, ly - 1), (lx - 1, ly), (lx, ly)))
            if n == 1:
                convex.append((lx, ly))
            elif n == 3:
                concave.append((lx, ly))
    return convex, concave


def component_count(region: RectilinearRegion) -> int:
    remaining = set(region.cells)
    count = 0
    while remaining:
        count += 1
        stack = [remaining.pop()]
        while stack:
            x, y = stack.pop()
            for n in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
                if n in remaining:
                    remaining.discard(n)
                    stack.append(n)
    return count


def has_hole(region: RectilinearRegion, width: int, height: int) -> bool:
    """True when the complement has a component not touching the border."""
    outside = {(x, y) for x in range(width) for y in range(height)} - region.cells
    border = {p for p in outside if p[0] in (0, width - 1) or p[1] in (0, height - 1)}
    seen = set(border)
    stack = list(border)
    while stack:
        x, y = stack.pop()
        for n in ((x + 1, y), (x - 1, y), (x, y + 1), (x, y - 1)):
            if n in outside and n not in seen:
                seen.add(n)
                stack.append(n)
    return seen != outside


def has_pinch(region: RectilinearRegion) -> bool:
    """True at any lattice point whose two inside cells meet only diagonally."""
    lattice = set()
    for x, y in region.cells:
        lattice.update(((x, y), (x + 1, y), (x, y + 1), (x + 1, y + 1)))
    for lx, ly in lattice:
        nw = (lx - 1, ly - 1) in region.cells
        ne = (lx, ly - 1) in region.cells
        sw = (lx - 1, ly) in region.cells
        se = (lx, ly) in region.cells
        if nw + ne + sw + se == 2 and ((nw and se) or (ne and sw)):
            return True
    return False


def naive_region_sum(values: GridValues, region: RectilinearRegion) -> int:
    return sum(values.at(p) for p in region.cells)


def min_cover_oracle(h: CubeHierarchy, region: RectilinearRegion, greedy_bound: int) -> int:
    """Branch-and-bound exact cover over all hierarchy cells (incl. level 0).

    Branches on the first uncovered grid location; candidate cells are the
    nested chain of cells containing it that fit inside the residual.
    """
    best = [greedy_bound]

    def candidates(residual: frozenset, p):
        out = []
        for level in range(h.height, -1, -1):
            cell = cell_of(h.config, level, p)
            cover = frozenset(cell.bounds.coords())
            if cover <= residual:
                out.append(cover)
        return out

    def rec(residual: frozenset, count: int):
        if not residual:
            best[0] = min(best[0], count)
            return
        if count + 1 > best[0]:
            return
        p = min(residual, key=lambda c: (c[1], c[0]))
        for cover in candidates(residual, p):
            rec(residual - cover, count + 1)

    rec(frozenset(region.cells), 0)
    return best[0]


def enumerate_cut_assignments(g):
    """Yield (side lookup, crossing data arcs) for every assignment of the
    free (partial replica) nodes; skips nothing, so keep instances small."""
    free = g.free_nodes()
    assert len(free) <= 18, f"instance too large to enumerate: {len(free)} free nodes"
    for bits in range(2 ** len(free)):
        side = {}
        for idx, node in enumerate(free):
            side[node] = "S" if (bits >> idx) & 1 else "T"

        def node_side(n, side=side):
            return g.forced_side(n) or side[n]

        crossing = [da for da in g.data_arcs
                    if node_side(da.u) == "S" and node_side(da.v) == "T"]
        yield node_side, crossing


def plan_terms_for_query(g, node_side, crossing, q: int):
    """Replicate the per-query inclusion rule from graph metadata."""
    terms = []
    for da in crossing:
        if q in da.base:
            terms.append((da.cell, da.sign))
        elif q in da.cond:
            wanted = "S" if da.sign > 0 else "T"
            if node_side(g.u_node[da.cell]) == wanted:
                terms.append((da.cell, da.sign))
    return terms


def ps_min_cost_oracle(candidates, target: frozenset) -> int | None:
    """Independent exhaustive search over disjoint candidate combinations."""
    best = [None]

    def rec(residual: frozenset, cost: int):
        if best[0] is not None and cost >= best[0]:
            return
        if not residual:
            best[0] = cost
            return
        p = min(residual, key=lambda c: (c[1], c[0]))
        for cand in candidates:
            if p in cand.effective and cand.effective <= residual:
                rec(residual - cand.effective, cost + cand.cost)

    rec(target, 0)
    return best[0]
