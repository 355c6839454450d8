"""Multi-level cube cell structure with per-cell SUM summaries.

Level-1 cells tile the grid in blocks of F1 x F1 nodes; a level-k cell groups
Fk x Fk level-(k-1) cells. Cells at the right/bottom edge are clipped when the
fanouts do not divide the grid dimensions, which keeps every level an exact
tiling. Each cell's summary is stored at its junction, the lower-right corner
of its bounds. Individual grid locations act as degenerate level-0 cells.

Everything here is immutable after construction and safe to share across
threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterator

from .errors import BoundsError, ConfigError
from .grid import Coord, GridDims, GridValues, Rect, RectilinearRegion


@dataclass(frozen=True)
class HierarchyConfig:
    dims: GridDims
    fanouts: tuple[int, ...]

    def __post_init__(self):
        if not self.fanouts:
            raise ConfigError("fanout list must not be empty")
        if self.fanouts[0] < 1 or any(f < 2 for f in self.fanouts[1:]):
            raise ConfigError(f"fanouts must satisfy F1>=1 and Fk>=2 for k>1: {self.fanouts}")
        object.__setattr__(self, "fanouts", tuple(int(f) for f in self.fanouts))

    @property
    def height(self) -> int:
        return len(self.fanouts)

    def side(self, level: int) -> int:
        """Side length of a level-k cell in grid units (level 0 -> 1)."""
        return math.prod(self.fanouts[:level])


@dataclass(frozen=True)
class Cell:
    level: int
    bounds: Rect

    @property
    def junction(self) -> Coord:
        return (self.bounds.x1, self.bounds.y1)

    @property
    def area(self) -> int:
        return self.bounds.area

    def label(self) -> str:
        return f"L{self.level}({self.bounds.x0},{self.bounds.y0})"


def _cells_for_level(config: HierarchyConfig, level: int) -> list[Cell]:
    side = config.side(level)
    w, h = config.dims.width, config.dims.height
    cells = []
    for y0 in range(0, h, side):
        for x0 in range(0, w, side):
            cells.append(Cell(level, Rect(x0, y0, min(x0 + side, w) - 1, min(y0 + side, h) - 1)))
    return cells


def cell_of(config: HierarchyConfig, level: int, p: Coord) -> Cell:
    """The level-k cell containing grid location p (level 0 is p itself)."""
    if not config.dims.contains(p):
        raise BoundsError(f"{p} outside grid {config.dims}")
    if level == 0:
        return Cell(0, Rect(p[0], p[1], p[0], p[1]))
    side = config.side(level)
    x0 = (p[0] // side) * side
    y0 = (p[1] // side) * side
    return Cell(level, Rect(x0, y0,
                            min(x0 + side, config.dims.width) - 1,
                            min(y0 + side, config.dims.height) - 1))


class CubeHierarchy:
    """Built cube: per-level cells plus the summary value of each cell."""

    def __init__(self, values: GridValues, config: HierarchyConfig,
                 levels: tuple[tuple[Cell, ...], ...], summaries: dict[Cell, int]):
        self.values = values
        self.config = config
        self.levels = levels  # levels[k-1] holds level-k cells
        self.summaries = summaries

    @property
    def height(self) -> int:
        return self.config.height

    @property
    def dims(self) -> GridDims:
        return self.config.dims

    def cells_of(self, level: int) -> tuple[Cell, ...]:
        return self.levels[level - 1]

    @property
    def top_cells(self) -> tuple[Cell, ...]:
        return self.levels[-1]

    def cell_at(self, level: int, p: Coord) -> Cell:
        """The level-k cell containing grid location p."""
        return cell_of(self.config, level, p)

    def children(self, cell: Cell) -> list[Cell]:
        """The level-(k-1) cells tiling a level-k cell (grid points for k=1)."""
        if cell.level == 0:
            return []
        if cell.level == 1:
            return [Cell(0, Rect(x, y, x, y)) for (x, y) in cell.bounds.coords()]
        side = self.config.side(cell.level - 1)
        b = cell.bounds
        out = []
        for y0 in range(b.y0, b.y1 + 1, side):
            for x0 in range(b.x0, b.x1 + 1, side):
                out.append(Cell(cell.level - 1,
                                Rect(x0, y0, min(x0 + side - 1, b.x1), min(y0 + side - 1, b.y1))))
        return out

    def value(self, cell: Cell) -> int:
        if cell.level == 0:
            return self.values.at((cell.bounds.x0, cell.bounds.y0))
        return self.summaries[cell]

    def cells_at(self, p: Coord) -> list[Cell]:
        """All cells whose junction is p, ordered by level ascending."""
        if not self.dims.contains(p):
            raise BoundsError(f"{p} outside grid {self.dims}")
        out = []
        for level in range(1, self.height + 1):
            cell = self.cell_at(level, p)
            if cell.junction == p:
                out.append(cell)
        return out

    def dump(self) -> list[str]:
        """One line per cell: level x0 y0 x1 y1 junction_x junction_y value."""
        lines = []
        for level_cells in self.levels:
            for c in level_cells:
                jx, jy = c.junction
                b = c.bounds
                lines.append(f"{c.level} {b.x0} {b.y0} {b.x1} {b.y1} {jx} {jy} {self.value(c)}")
        return lines


def build_hierarchy(values: GridValues, config: HierarchyConfig) -> CubeHierarchy:
    if config.dims != values.dims:
        raise ConfigError(f"config dims {config.dims} do not match values dims {values.dims}")
    levels = tuple(tuple(_cells_for_level(config, k)) for k in range(1, config.height + 1))
    summaries = {}
    for level_cells in levels:
        for c in level_cells:
            summaries[c] = values.rect_sum(c.bounds)
    return CubeHierarchy(values, config, levels, summaries)


def cells_at(h: CubeHierarchy, p: Coord) -> list[Cell]:
    return h.cells_at(p)


class Color(Enum):
    GREY = "grey"      # cell fully inside the query region
    WHITE = "white"    # cell disjoint from the query region
    PARTIAL = "partial"


@dataclass(frozen=True)
class TreeNode:
    cell: Cell | None  # None for the synthetic root
    color: Color
    children: tuple["TreeNode", ...]

    @property
    def is_root(self) -> bool:
        return self.cell is None


class HierarchyTree:
    """The cube as a containment tree, colored against one query region.

    Subtrees under grey and white nodes are pruned: a fully-inside or
    fully-outside cell always dominates its descendants. The synthetic root
    covers the whole grid and is the parent of the top-level cells.
    """

    def __init__(self, root: TreeNode, hierarchy: CubeHierarchy, region: RectilinearRegion):
        self.root = root
        self.hierarchy = hierarchy
        self.region = region

    def nodes(self) -> Iterator[TreeNode]:
        stack = [self.root]
        while stack:
            n = stack.pop()
            yield n
            stack.extend(n.children)

    def cells_by_color(self, color: Color) -> set[Cell]:
        return {n.cell for n in self.nodes() if not n.is_root and n.color is color}


def _cell_color(cell: Cell, region: RectilinearRegion) -> Color:
    inside = sum(1 for p in cell.bounds.coords() if p in region.cells)
    if inside == 0:
        return Color.WHITE
    if inside == cell.area:
        return Color.GREY
    return Color.PARTIAL


def _color_node(h: CubeHierarchy, cell: Cell, region: RectilinearRegion) -> TreeNode:
    color = _cell_color(cell, region)
    if color is not Color.PARTIAL:
        return TreeNode(cell, color, ())
    kids = tuple(_color_node(h, c, region) for c in h.children(cell))
    return TreeNode(cell, color, kids)


def color_tree(h: CubeHierarchy, region: RectilinearRegion) -> HierarchyTree:
    if not region.within(h.dims):
        raise BoundsError("region extends outside the grid")
    grid_area = h.dims.width * h.dims.height
    if not region:
        root = TreeNode(None, Color.WHITE, ())
    elif len(region) == grid_area:
        root = TreeNode(None, Color.GREY, ())
    else:
        kids = tuple(_color_node(h, c, region) for c in h.top_cells)
        root = TreeNode(None, Color.PARTIAL, kids)
    return HierarchyTree(root, h, region)
