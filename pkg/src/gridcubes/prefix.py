"""Prefix-sum cube variant: per-cell 2-D prefix tables at every level.

Within each cell, the entry at in-cell position (i, j) holds the sum of all
base values dominated by that position, anchored at the cell's upper-left
corner. Level-1 tables run at grid granularity; a level-k table's base values
are the totals of its level-(k-1) child cells, so its entries live at the
child junction positions. The bottom-right entry of every table equals the
plain cube summary of that cell.

A rectangle inside one cell costs at most four entries. Arbitrary rectilinear
regions expand into one signed entry per region corner (corners falling on
the cell's top or left boundary hit the implicit zero row/column and are
elided). Regions spanning several cells split along cell boundaries and each
fragment is handled inside its own cell, since entries never cross cells.

Beyond the corner expansion, a dynamic program over grey and re-colored
points searches for the cheapest signed point set answering a query: a
straddling point can be "re-colored" by subtracting white points whose union
exactly cancels its out-of-region part, at a cost of one plus the number of
white points involved.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

from .errors import BoundsError, InfeasibleError, ValidationError
from .flow import QueryPlan
from .grid import Coord, GridValues, Rect, RectilinearRegion
from .hierarchy import Cell, CubeHierarchy, HierarchyConfig, build_hierarchy


@dataclass(frozen=True)
class PSDataPoint:
    cell: Cell
    location: Coord   # grid coordinate of the node storing this entry
    covered: Rect     # grid rectangle this entry sums, anchored at the cell's UL

    def label(self) -> str:
        return f"PS{self.cell.level}@({self.location[0]},{self.location[1]})"


class PrefixSumCube:
    def __init__(self, hierarchy: CubeHierarchy, tables: dict[Cell, np.ndarray]):
        self.hierarchy = hierarchy
        self.tables = tables

    @property
    def config(self) -> HierarchyConfig:
        return self.hierarchy.config

    @property
    def values(self) -> GridValues:
        return self.hierarchy.values

    def _child_grid(self, cell: Cell) -> tuple[int, int, int]:
        """(child side length, columns, rows) of a cell's child-block grid."""
        side = self.config.side(cell.level - 1)
        cols = (cell.bounds.width + side - 1) // side
        rows = (cell.bounds.height + side - 1) // side
        return side, cols, rows

    def point(self, cell: Cell, child: tuple[int, int]) -> PSDataPoint:
        side, cols, rows = self._child_grid(cell)
        ci, cj = child
        if not (0 <= ci < cols and 0 <= cj < rows):
            raise BoundsError(f"child index {child} outside {cell}")
        b = cell.bounds
        x1 = min(b.x0 + (ci + 1) * side, b.x1 + 1) - 1
        y1 = min(b.y0 + (cj + 1) * side, b.y1 + 1) - 1
        return PSDataPoint(cell, (x1, y1), Rect(b.x0, b.y0, x1, y1))

    def entry(self, point: PSDataPoint):
        table = self.tables[point.cell]
        side, _, _ = self._child_grid(point.cell)
        ci = (point.location[0] - point.cell.bounds.x0) // side
        cj = (point.location[1] - point.cell.bounds.y0) // side
        return table[cj, ci].item()

    def points(self) -> Iterator[PSDataPoint]:
        for level_cells in self.hierarchy.levels:
            for cell in level_cells:
                _, cols, rows = self._child_grid(cell)
                for cj in range(rows):
                    for ci in range(cols):
                        yield self.point(cell, (ci, cj))


def build_ps_cube(values: GridValues, config: HierarchyConfig) -> PrefixSumCube:
    h = build_hierarchy(values, config)
    tables: dict[Cell, np.ndarray] = {}
    for level in range(1, config.height + 1):
        for cell in h.cells_of(level):
            b = cell.bounds
            if level == 1:
                base = values.array[b.y0:b.y1 + 1, b.x0:b.x1 + 1]
            else:
                side = config.side(level - 1)
                cols = (b.width + side - 1) // side
                rows = (b.height + side - 1) // side
                base = np.empty((rows, cols), dtype=values.array.dtype)
                for cj in range(rows):
                    for ci in range(cols):
                        child = h.cell_at(level - 1, (b.x0 + ci * side, b.y0 + cj * side))
                        base[cj, ci] = h.value(child)
            tables[cell] = base.cumsum(axis=0).cumsum(axis=1)
    return PrefixSumCube(h, tables)


def rectangle_sum(ps: PrefixSumCube, cell: Cell, rect: Rect):
    """Sum of a rectangle inside one cell from at most four corner entries.

    Returns (value, [(point, sign), ...]) ordered bottom-right, upper-left,
    upper-right, lower-left. For cells above level 1 the rectangle must align
    to child blocks. Entries that would fall on the implicit zero row or
    column are omitted.
    """
    if not cell.bounds.contains_rect(rect):
        raise BoundsError(f"rectangle {rect} outside cell {cell}")
    side, _, _ = ps._child_grid(cell)
    b = cell.bounds
    if ((rect.x0 - b.x0) % side or (rect.y0 - b.y0) % side
            or (rect.x1 - b.x0 + 1) % side or (rect.y1 - b.y0 + 1) % side):
        raise ValidationError(f"rectangle {rect} not aligned to level-{cell.level - 1} blocks")
    c0 = (rect.x0 - b.x0) // side
    r0 = (rect.y0 - b.y0) // side
    c1 = (rect.x1 - b.x0 + 1) // side - 1
    r1 = (rect.y1 - b.y0 + 1) // side - 1
    corners = [((c1, r1), +1), ((c0 - 1, r0 - 1), +1), ((c1, r0 - 1), -1), ((c0 - 1, r1), -1)]
    total = 0
    used = []
    for (ci, cj), sign in corners:
        if ci < 0 or cj < 0:
            continue
        p = ps.point(cell, (ci, cj))
        total += sign * ps.entry(p)
        used.append((p, sign))
    return total, used


def corner_weights(cells: frozenset[Coord]) -> dict[Coord, int]:
    """Signed corner-expansion weights of a cell set, keyed by lattice point.

    The weight at lattice (lx, ly) is the mixed difference of the region's
    indicator over the four incident cells; it is nonzero exactly at corners
    (+-1, or +-2 at degenerate diagonal crossings) and the region sum equals
    the weighted sum of dominated-rectangle prefixes.
    """
    weights: dict[Coord, int] = {}
    lattice: set[Coord] = set()
    for x, y in cells:
        lattice.update(((x, y), (x + 1, y), (x, y + 1), (x + 1, y + 1)))
    for lx, ly in lattice:
        w = ((((lx - 1, ly - 1) in cells) - ((lx, ly - 1) in cells))
             - (((lx - 1, ly) in cells) - ((lx, ly) in cells)))
        if w:
            weights[(lx, ly)] = w
    return weights


def _fits_in_cell(ps: PrefixSumCube, region_cells: frozenset[Coord], level: int) -> Cell | None:
    seed = next(iter(region_cells))
    cell = ps.hierarchy.cell_at(level, seed)
    if all(cell.bounds.contains_point(p) for p in region_cells):
        return cell
    return None


def _block_region(ps: PrefixSumCube, cell: Cell, region_cells: frozenset[Coord]):
    """Region re-expressed in child-block units, or None if not aligned."""
    side, cols, rows = ps._child_grid(cell)
    b = cell.bounds
    blocks: set[Coord] = set()
    for x, y in region_cells:
        blocks.add(((x - b.x0) // side, (y - b.y0) // side))
    covered = set()
    for ci, cj in blocks:
        x0 = b.x0 + ci * side
        y0 = b.y0 + cj * side
        covered.update((x, y) for x in range(x0, min(x0 + side, b.x1 + 1))
                       for y in range(y0, min(y0 + side, b.y1 + 1)))
    if covered != set(region_cells):
        return None
    return frozenset(blocks)


def _emit_scope(ps: PrefixSumCube, cell: Cell, units: frozenset[Coord]):
    out = []
    for (lx, ly), w in sorted(corner_weights(units).items(), key=lambda kv: (kv[0][1], kv[0][0])):
        ci, cj = lx - 1, ly - 1
        if ci < 0 or cj < 0:
            continue  # implicit zero row/column
        out.append((ps.point(cell, (ci, cj)), w))
    return out


def _fragment_pieces(ps: PrefixSumCube, region_cells: frozenset[Coord]):
    """Split a region into single-scope pieces: [(scope cell, cells, points)]."""
    if not region_cells:
        return []
    split_level = None
    for level in range(1, ps.config.height + 1):
        cell = _fits_in_cell(ps, region_cells, level)
        if cell is None:
            continue
        if level == 1:
            b = cell.bounds
            units = frozenset((x - b.x0, y - b.y0) for x, y in region_cells)
            return [(cell, region_cells, _emit_scope(ps, cell, units))]
        units = _block_region(ps, cell, region_cells)
        if units is None:
            split_level = level - 1  # fits but misaligned: refine granularity
            break
        return [(cell, region_cells, _emit_scope(ps, cell, units))]
    if split_level is None:
        split_level = ps.config.height  # spans several top-level cells
    pieces: dict[Cell, set[Coord]] = {}
    for p in region_cells:
        pieces.setdefault(ps.hierarchy.cell_at(split_level, p), set()).add(p)
    out = []
    for piece_cell in sorted(pieces, key=lambda c: (c.bounds.y0, c.bounds.x0)):
        out.extend(_fragment_pieces(ps, frozenset(pieces[piece_cell])))
    return out


def _expand_fragment(ps: PrefixSumCube, region_cells: frozenset[Coord]):
    """Signed points for one region, recursing into cell-boundary fragments."""
    out = []
    for _, _, points in _fragment_pieces(ps, region_cells):
        out.extend(points)
    return out


def rectilinear_sum(ps: PrefixSumCube, region: RectilinearRegion):
    """Region sum by corner expansion; returns (value, [(point, weight), ...]).

    Within a single scope the number of points equals the number of region
    corners, minus any corners whose entry falls on the implicit zero
    boundary. Regions spanning several cells are split along cell boundaries
    first, which may add fragment corners.
    """
    if not region.within(ps.hierarchy.dims):
        raise BoundsError("region extends outside the grid")
    points = _expand_fragment(ps, region.cells)
    value = sum(w * ps.entry(p) for p, w in points)
    return value, points


@dataclass(frozen=True)
class PlanCandidate:
    """One usable retrieval unit for the query DP.

    Either a grey point (cost 1) or a re-colored straddling point bundled
    with the white points that cancel its out-of-region part.
    """

    terms: tuple[tuple[PSDataPoint, int], ...]
    cost: int
    effective: frozenset[Coord]


def _point_cells(point: PSDataPoint) -> frozenset[Coord]:
    return frozenset(point.covered.coords())


def _rect_candidates(ps: PrefixSumCube, region: RectilinearRegion):
    """In-cell rectangles fully inside the region, via their corner entries.

    The grey/re-colored sets alone cannot cover every region (a straddling
    point is unusable when its out-of-region part has no all-white
    expansion), so the corner method's rectangle primitive is admitted as a
    candidate too; an anchored rectangle degenerates to a single grey point.
    """
    out = []
    for level_cells in ps.hierarchy.levels:
        for cell in level_cells:
            side, cols, rows = ps._child_grid(cell)
            b = cell.bounds
            blocks = []
            for cj in range(rows):
                for ci in range(cols):
                    p = ps.point(cell, (ci, cj))
                    blocks.append(((ci, cj), frozenset(
                        (x, y) for x in range(b.x0 + ci * side, p.location[0] + 1)
                        for y in range(b.y0 + cj * side, p.location[1] + 1))))
            inside = {idx for idx, area in blocks if area <= region.cells}
            area_of = dict(blocks)
            for (c0, r0) in inside:
                for (c1, r1) in inside:
                    if c1 < c0 or r1 < r0:
                        continue
                    span = {(ci, cj) for ci in range(c0, c1 + 1) for cj in range(r0, r1 + 1)}
                    if not span <= inside:
                        continue
                    rect = Rect(b.x0 + c0 * side, b.y0 + r0 * side,
                                ps.point(cell, (c1, r1)).location[0],
                                ps.point(cell, (c1, r1)).location[1])
                    value_terms = rectangle_sum(ps, cell, rect)[1]
                    effective = frozenset().union(*(area_of[idx] for idx in span))
                    out.append(PlanCandidate(tuple(value_terms), len(value_terms), effective))
    return out


@dataclass(frozen=True)
class RecoloredSets:
    """Classification of all entries against one query region.

    grey entries lie fully inside, white ones are disjoint, straddling ones
    overlap both sides. Each re-colored candidate pairs a straddling entry
    with the white entries whose subtraction confines it to the region; its
    cost is one plus the number of whites involved.
    """

    grey: tuple[PSDataPoint, ...]
    white: tuple[PSDataPoint, ...]
    straddling: tuple[PSDataPoint, ...]
    recolored: tuple[PlanCandidate, ...]


def recolor_sets(ps: PrefixSumCube, region: RectilinearRegion) -> RecoloredSets:
    grey: list[PSDataPoint] = []
    white: list[PSDataPoint] = []
    straddling: list[PSDataPoint] = []
    for p in ps.points():
        cells = _point_cells(p)
        if cells <= region.cells:
            grey.append(p)
        elif not (cells & region.cells):
            white.append(p)
        else:
            straddling.append(p)
    white_set = set(white)
    recolored: list[PlanCandidate] = []
    for p in straddling:
        cells = _point_cells(p)
        out = cells - region.cells
        expansion = _expand_fragment(ps, frozenset(out))
        usable = all(abs(w) == 1 and wp in white_set and wp.cell == p.cell
                     for wp, w in expansion)
        if not usable or not expansion:
            continue
        terms = ((p, +1),) + tuple((wp, -w) for wp, w in expansion)
        recolored.append(PlanCandidate(terms, len(terms), cells & region.cells))
    return RecoloredSets(tuple(grey), tuple(white), tuple(straddling), tuple(recolored))


def recolor_candidates(ps: PrefixSumCube, region: RectilinearRegion):
    """Build the usable retrieval units for a query region.

    Grey points cost 1, re-colored straddling points cost one plus their
    white companions, and rectangle expansions complete the space. Candidates
    with the same effective area keep only the cheapest variant. Returns
    (candidates, white_points).
    """
    sets = recolor_sets(ps, region)
    white = set(sets.white)
    candidates: list[PlanCandidate] = [
        PlanCandidate(((p, +1),), 1, _point_cells(p)) for p in sets.grey]
    candidates.extend(sets.recolored)
    candidates.extend(_rect_candidates(ps, region))
    # The corner expansion of each single-scope piece is itself a feasible
    # retrieval unit, so the corner method is always within the search space.
    for _, piece_cells, points in _fragment_pieces(ps, region.cells):
        if points and all(abs(w) == 1 for _, w in points):
            candidates.append(PlanCandidate(tuple(points), len(points),
                                            frozenset(piece_cells)))
    best: dict[frozenset, PlanCandidate] = {}
    for cand in candidates:
        kept = best.get(cand.effective)
        if kept is None or cand.cost < kept.cost:
            best[cand.effective] = cand
    ordered = sorted(best.values(),
                     key=lambda c: (c.cost, -len(c.effective),
                                    c.terms[0][0].location[1], c.terms[0][0].location[0]))
    return ordered, white


def ps_query_plan(ps: PrefixSumCube, region: RectilinearRegion) -> QueryPlan:
    """Minimum-cost signed point set answering the query, by exact-cover DP.

    Candidates are grey points and re-colored straddling points; a plan is a
    set of candidates whose effective areas partition the region, and its
    cost is the number of entries retrieved. Memoized on the residual region;
    candidates must fit entirely inside the residual so the signed sum stays
    exact.
    """
    if not region:
        raise ValidationError("cannot plan an empty region")
    if not region.within(ps.hierarchy.dims):
        raise BoundsError("region extends outside the grid")
    candidates, _ = recolor_candidates(ps, region)

    @lru_cache(maxsize=None)
    def best(residual: frozenset) -> tuple[int, tuple]:
        if not residual:
            return 0, ()
        target = min(residual, key=lambda c: (c[1], c[0]))
        best_cost, best_pick = None, None
        for cand in candidates:
            if target not in cand.effective or not cand.effective <= residual:
                continue
            sub_cost, sub_pick = best(residual - cand.effective)
            if sub_pick is None:
                continue
            total = cand.cost + sub_cost
            if best_cost is None or total < best_cost:
                best_cost, best_pick = total, (cand,) + sub_pick
        if best_cost is None:
            return 10 ** 9, None
        return best_cost, best_pick

    cost, picks = best(region.cells)
    best.cache_clear()
    if picks is None:
        raise InfeasibleError("region not coverable by available prefix-sum points")
    terms: list[tuple[PSDataPoint, int]] = []
    for cand in picks:
        terms.extend(cand.terms)
    value = sum(s * ps.entry(p) for p, s in terms)
    assert cost == len(terms)
    return QueryPlan(tuple(terms), value)
