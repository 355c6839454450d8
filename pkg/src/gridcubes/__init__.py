"""Multiresolution cube summaries over 2-D sensor grids.

Builds per-cell SUM summaries at several granularities over a grid of sensor
readings, plans spatially constrained aggregate queries with a provably
minimal number of data points via a max-flow/min-cut reduction, optimizes
several queries jointly, supports a prefix-sum cube variant, simulates the
distributed construction protocol and recovers exact or estimated answers
after node and area failures.
"""

from .division import CellCover, greedy_divide
from .errors import (BoundsError, ConfigError, GridCubesError, InfeasibleError,
                     RecoveryError, ScenarioError, ValidationError)
from .flow import (CombinedResult, FlowGraph, QueryPlan, build_flow_graph,
                   combined_plan, mark_failed, min_cut_plan)
from .grid import (CornerClassification, CornerKind, GridCoord, GridDims,
                   GridValues, Rect, RectilinearRegion, classify_corners,
                   corner_counts, region_contains, region_from_rectangles)
from .hierarchy import (Cell, Color, CubeHierarchy, HierarchyConfig,
                        HierarchyTree, build_hierarchy, cell_of, cells_at,
                        color_tree)
from .prefix import (PrefixSumCube, PSDataPoint, RecoloredSets, build_ps_cube,
                     corner_weights, ps_query_plan, recolor_sets,
                     rectangle_sum, rectilinear_sum)
from .protocol import (NodeState, Packet, SimStats, junction_level, node_slot,
                       node_step, run_construction)
from .recovery import (FailureSet, Reconstruction, RecoveryKind, RecoveryResult,
                       failed_datapoints, plan_with_failures, recover_junction,
                       recover_node, recover_region)

__all__ = [name for name in dir() if not name.startswith("_")]
