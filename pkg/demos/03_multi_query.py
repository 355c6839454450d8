"""Optimize two overlapping queries jointly.

Planned separately, the two queries read six distinct summaries; the merged
flow graph shares the overlap and answers both from five.
"""

from gridcubes import (GridDims, GridValues, HierarchyConfig, build_flow_graph,
                       build_hierarchy, color_tree, combined_plan, min_cut_plan,
                       region_from_rectangles)

dims = GridDims(8, 8)
values = GridValues.random(dims, seed=42, low=0, high=9)
cube = build_hierarchy(values, HierarchyConfig(dims, (2, 2, 2)))

q1 = region_from_rectangles(
    [((0, 0), (3, 3)), ((4, 4), (7, 7)), ((2, 4), (3, 4)), ((2, 5), (2, 5))], dims)
q2 = region_from_rectangles(
    [((0, 0), (3, 3)), ((4, 4), (7, 7)), ((2, 4), (3, 4))], dims)

t1, t2 = color_tree(cube, q1), color_tree(cube, q2)
p1 = min_cut_plan(build_flow_graph(t1), cube)
p2 = min_cut_plan(build_flow_graph(t2), cube)
print("individual plans:", p1.size, "and", p2.size,
      "points;", len(p1.points() | p2.points()), "distinct")

result = combined_plan([t1, t2], cube)
print("combined retrieval:", len(result.retrieval), "points:",
      sorted(c.label() for c in result.retrieval))
for name, plan, region in (("q1", result.plans[0], q1), ("q2", result.plans[1], q2)):
    assert plan.value == values.region_sum(region)
    terms = " ".join(f"{'+' if s > 0 else '-'}{c.label()}" for c, s in plan.terms)
    print(f"  {name}: {terms} = {plan.value}")
