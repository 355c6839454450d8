"""Greedy decomposition of a query region into hierarchy cells.

Repeatedly picks a convex corner of the residual region (scanning lattice
points top-to-bottom, left-to-right) and extracts the highest-level hierarchy
cell that touches the corner and fits entirely inside the residual. Single
grid locations count as level-0 cells, so any region is coverable. The
resulting cover has the minimum possible number of cells; the cell multiset
may depend on the corner order but the size does not.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import BoundsError, ValidationError
from .grid import Coord, RectilinearRegion
from .hierarchy import Cell, CubeHierarchy


@dataclass(frozen=True)
class CellCover:
    cells: tuple[Cell, ...]
    region: RectilinearRegion

    @property
    def size(self) -> int:
        return len(self.cells)


def _first_convex_corner(region: RectilinearRegion) -> tuple[Coord, Coord]:
    """Return (lattice corner, the single inside cell at that corner)."""
    candidates: set[Coord] = set()
    for x, y in region.cells:
        candidates.update(((x, y), (x + 1, y), (x, y + 1), (x + 1, y + 1)))
    for p in sorted(candidates, key=lambda c: (c[1], c[0])):
        lx, ly = p
        inside = [c for c in ((lx - 1, ly - 1), (lx, ly - 1), (lx - 1, ly), (lx, ly))
                  if c in region.cells]
        if len(inside) == 1:
            return p, inside[0]
    raise ValidationError("non-empty region without a convex corner")


def _max_cell_at(h: CubeHierarchy, residual: set[Coord], corner: Coord, seed: Coord) -> Cell:
    """Highest-level cell with `corner` on its boundary lattice, inside residual."""
    for level in range(h.height, 0, -1):
        cell = h.cell_at(level, seed)
        b = cell.bounds
        if corner[0] not in (b.x0, b.x1 + 1) or corner[1] not in (b.y0, b.y1 + 1):
            continue
        if all(p in residual for p in b.coords()):
            return cell
    return h.cell_at(0, seed)


def greedy_divide(h: CubeHierarchy, region: RectilinearRegion) -> CellCover:
    if not region:
        raise ValidationError("cannot divide an empty region")
    if not region.within(h.dims):
        raise BoundsError("region extends outside the grid")
    residual = set(region.cells)
    picked: list[Cell] = []
    while residual:
        corner, seed = _first_convex_corner(RectilinearRegion(frozenset(residual)))
        cell = _max_cell_at(h, residual, corner, seed)
        picked.append(cell)
        residual.difference_update(cell.bounds.coords())
    return CellCover(tuple(picked), region)
