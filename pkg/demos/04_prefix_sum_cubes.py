"""Prefix-sum cubes: every node stores a dominated-rectangle sum.

Within a cell, any rectangle costs at most four entries, an arbitrary
rectilinear shape costs one entry per corner, and a dynamic program finds
the cheapest signed point set overall.
"""

from gridcubes import (GridDims, GridValues, HierarchyConfig, Rect,
                       build_ps_cube, ps_query_plan, rectangle_sum,
                       rectilinear_sum, region_from_rectangles)

rows = [[12, 8, 10, 6],
        [20, 7, 11, 4],
        [15, 9, 13, 8],
        [18, 5, 12, 12]]
values = GridValues.from_rows(rows)
ps = build_ps_cube(values, HierarchyConfig(GridDims(4, 4), (4,)))
cell = ps.hierarchy.cells_of(1)[0]
print("prefix table:")
print(ps.tables[cell])

value, points = rectangle_sum(ps, cell, Rect(1, 1, 3, 3))
parts = " ".join(f"{'+' if s > 0 else '-'}{ps.entry(p)}" for p, s in points)
print(f"\nrectangle (1,1)-(3,3): {parts} = {value}")

# An L-shaped region: six corners, six entries.
region = region_from_rectangles([((1, 0), (3, 1)), ((2, 2), (3, 3))], GridDims(4, 4))
value, points = rectilinear_sum(ps, region)
print(f"L-shaped region: {len(points)} corner entries, sum {value}")

plan = ps_query_plan(ps, region)
print(f"cheapest plan: {plan.size} entries, value {plan.value}")
for point, sign in plan.terms:
    c = point.covered
    print(f"  {'+' if sign > 0 else '-'} {point.label()} covers ({c.x0},{c.y0})-({c.x1},{c.y1})")
