"""Recover lost values and query answers after node and area failures.

Single nodes are rebuilt from a neighbour square, junctions from peer
junctions (or just the three immediate neighbours with redundant storage),
and queries over failed areas fall back to the smallest recoverable
enclosure with a uniformity estimate.
"""

from fractions import Fraction

from gridcubes import (FailureSet, GridDims, GridValues, HierarchyConfig,
                       QueryPlan, build_hierarchy, plan_with_failures,
                       recover_junction, recover_node, region_from_rectangles,
                       run_construction)

dims = GridDims(6, 6)
values = GridValues.random(dims, seed=5, low=1, high=9)
config = HierarchyConfig(dims, (3, 2))
states, _ = run_construction(values, config, mode="ps")

# Lose an ordinary node: three neighbours rebuild its stored prefix.
lost = (1, 2)
truth = states[lost].stored[0]
alive = {k: v for k, v in states.items() if k != lost}
rec = recover_node(alive, lost, 1, config)
print(f"node {lost}: stored {truth}, recovered {rec.value} from {rec.donors}")

# Lose a junction: peers at one cell-hop distance rebuild the cell sum.
alive = {k: v for k, v in states.items() if k != (2, 2)}
rec = recover_junction(alive, (2, 2), 1, config)
print(f"junction (2,2): recovered {rec.value} from {rec.donors}, "
      f"total distance {rec.distance}")

states_r, _ = run_construction(values, config, mode="ps", redundant=True)
alive_r = {k: v for k, v in states_r.items() if k != (2, 2)}
rec = recover_junction(alive_r, (2, 2), 1, config, redundant=True)
print(f"redundant mode: recovered {rec.value} from the neighbours {rec.donors}")

# An area failure: three stacked cells die; a query touching the first one
# cannot be answered exactly, so the answer is estimated as half of the
# recoverable two-cell portion (not a third of the whole strip).
grid8 = GridDims(8, 8)
vals8 = GridValues.random(grid8, seed=7, low=1, high=9)
cube = build_hierarchy(vals8, HierarchyConfig(grid8, (2, 2, 2)))
strip = FailureSet.of(cells=[cube.cell_at(1, (2, 0)),
                             cube.cell_at(1, (2, 2)),
                             cube.cell_at(1, (2, 4))])
query = region_from_rectangles([((2, 0), (3, 1))], grid8)
result = plan_with_failures(cube, strip, query)
assert not isinstance(result, QueryPlan)
print(f"\narea failure: {result.kind.value}, value {result.value} "
      f"(= {float(Fraction(result.value)):g}), requested {len(result.requested_area)} "
      f"of {len(result.recovered_area)} recovered nodes")
