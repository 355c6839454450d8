import pytest

from gridcubes.errors import InfeasibleError
from gridcubes.division import greedy_divide
from gridcubes.flow import (build_flow_graph, combined_plan, mark_failed,
                            min_cut_plan)
from gridcubes.grid import GridDims, GridValues, RectilinearRegion, region_from_rectangles
from gridcubes.hierarchy import Color, HierarchyConfig, build_hierarchy, color_tree

from conftest import (enumerate_cut_assignments, naive_region_sum,
                      plan_terms_for_query, random_region)


def demo_cube(seed=42):
    vals = GridValues.random(GridDims(8, 8), seed=seed, low=0, high=9)
    return vals, build_hierarchy(vals, HierarchyConfig(GridDims(8, 8), (2, 2, 2)))


def demo_region(dims=GridDims(8, 8)):
    return region_from_rectangles(
        [((0, 0), (3, 3)), ((4, 4), (7, 7)), ((2, 4), (3, 4)), ((2, 5), (2, 5))], dims)


def second_region(dims=GridDims(8, 8)):
    return region_from_rectangles(
        [((0, 0), (3, 3)), ((4, 4), (7, 7)), ((2, 4), (3, 4))], dims)


def small_cube(seed):
    vals = GridValues.random(GridDims(8, 8), seed=seed, low=0, high=9)
    return vals, build_hierarchy(vals, HierarchyConfig(GridDims(8, 8), (2, 2)))


def cell_by_label(h, label):
    level, coords = label[1:].split("(")
    x, y = (int(v) for v in coords.rstrip(")").split(","))
    cell = h.cell_at(int(level), (x, y))
    assert cell.label() == label
    return cell


def test_graph_structure():
    vals, h = demo_cube()
    tree = color_tree(h, demo_region())
    g = build_flow_graph(tree)
    # every grey node fed from the source, every white node drains to the sink
    grey = tree.cells_by_color(Color.GREY)
    white = tree.cells_by_color(Color.WHITE)
    kinds = {k for k in g.node_kind if isinstance(k, tuple)}
    assert {(c, "G") for c in grey} <= kinds
    assert {(c, "W") for c in white} <= kinds
    # one data point per retained cell; partials carry a +/- arc pair
    cells = {da.cell for da in g.data_arcs}
    partial = tree.cells_by_color(Color.PARTIAL)
    assert cells == grey | white | partial
    assert len(g.data_arcs) == len(cells) + len(partial)


def test_worked_example_min_cut():
    vals, h = demo_cube()
    plan = min_cut_plan(build_flow_graph(color_tree(h, demo_region())), h)
    assert plan.size == 4
    want = {("L2(0,0)", 1), ("L2(4,4)", 1), ("L1(2,4)", 1), ("L0(3,5)", -1)}
    assert {(c.label(), s) for c, s in plan.terms} == want
    assert plan.value == naive_region_sum(vals, demo_region())


def test_alternative_cut_evaluates_identically():
    # The complement route through the top cell is a valid non-minimal plan.
    vals, h = demo_cube()
    region = demo_region()
    top = h.cells_of(3)[0]
    complement = [cell_by_label(h, lb) for lb in
                  ("L2(4,0)", "L1(0,4)", "L1(0,6)", "L1(2,6)", "L0(3,5)")]
    alt = h.value(top) - sum(h.value(c) for c in complement)
    assert alt == naive_region_sum(vals, region)


def test_whole_grid_region_plans_top_cells():
    vals, h = demo_cube()
    region = region_from_rectangles([((0, 0), (7, 7))], h.dims)
    plan = min_cut_plan(build_flow_graph(color_tree(h, region)), h)
    assert [c.level for c, _ in plan.terms] == [3]
    assert plan.value == vals.array.sum()


def test_empty_region_empty_plan():
    vals, h = demo_cube()
    plan = min_cut_plan(build_flow_graph(color_tree(h, RectilinearRegion.empty())), h)
    assert plan.terms == () and plan.value == 0


def test_every_cut_evaluates_to_region_sum(rng):
    # Any assignment of the partial nodes yields the exact aggregate.
    vals, h = small_cube(seed=10)
    for _ in range(40):
        region = random_region(rng, 8, 8)
        tree = color_tree(h, region)
        g = build_flow_graph(tree)
        if len(g.free_nodes()) > 14:
            continue
        expected = naive_region_sum(vals, region)
        for node_side, crossing in enumerate_cut_assignments(g):
            total = sum(da.sign * h.value(da.cell) for da in crossing)
            assert total == expected


def test_min_cut_size_matches_enumeration(rng):
    vals, h = small_cube(seed=11)
    for _ in range(40):
        region = random_region(rng, 8, 8)
        g = build_flow_graph(color_tree(h, region))
        if len(g.free_nodes()) > 14:
            continue
        plan = min_cut_plan(g, h)
        smallest = min(len({da.cell for da in crossing})
                       for _, crossing in enumerate_cut_assignments(g))
        assert plan.size == smallest


def test_max_flow_equals_cut_value(rng):
    from gridcubes.flow import _solve
    vals, h = small_cube(seed=18)
    for _ in range(30):
        region = random_region(rng, 8, 8)
        g = build_flow_graph(color_tree(h, region))
        flow, reach, crossing, _ = _solve(g)
        assert flow == len(crossing)  # all crossing arcs carry unit capacity


def test_min_cut_not_larger_than_greedy_cover(rng):
    vals, h = small_cube(seed=12)
    for _ in range(60):
        region = random_region(rng, 8, 8)
        plan = min_cut_plan(build_flow_graph(color_tree(h, region)), h)
        assert plan.size <= greedy_divide(h, region).size


def test_combined_worked_example():
    vals, h = demo_cube()
    t1 = color_tree(h, demo_region())
    t2 = color_tree(h, second_region())
    p1 = min_cut_plan(build_flow_graph(t1), h)
    p2 = min_cut_plan(build_flow_graph(t2), h)
    assert len(p1.points() | p2.points()) == 6
    result = combined_plan([t1, t2], h)
    assert len(result.retrieval) == 5
    assert sorted(c.label() for c in result.retrieval) == [
        "L0(2,4)", "L0(2,5)", "L0(3,4)", "L2(0,0)", "L2(4,4)"]
    assert result.plans[0].value == naive_region_sum(vals, demo_region())
    assert result.plans[1].value == naive_region_sum(vals, second_region())


def test_combined_identical_queries():
    vals, h = demo_cube()
    t = color_tree(h, demo_region())
    single = min_cut_plan(build_flow_graph(t), h)
    result = combined_plan([t, color_tree(h, demo_region())], h)
    assert result.retrieval == frozenset(single.points())


def test_combined_random_pairs(rng):
    vals, h = small_cube(seed=13)
    for _ in range(30):
        r1 = random_region(rng, 8, 8)
        r2 = random_region(rng, 8, 8)
        t1, t2 = color_tree(h, r1), color_tree(h, r2)
        result = combined_plan([t1, t2], h)
        # per-query plans always evaluate exactly
        assert result.plans[0].value == naive_region_sum(vals, r1)
        assert result.plans[1].value == naive_region_sum(vals, r2)
        # never worse than planning each query alone
        s1 = min_cut_plan(build_flow_graph(t1), h)
        s2 = min_cut_plan(build_flow_graph(t2), h)
        assert len(result.retrieval) <= s1.size + s2.size
        assert len(result.retrieval) <= len(s1.points() | s2.points())


def test_combined_no_duplicate_points_in_any_cut(rng):
    # No assignment can ever charge the same data point twice, including when
    # three queries give one cell all three colors.
    vals, h = small_cube(seed=14)
    from gridcubes.flow import _build_graph
    for _ in range(25):
        for count in (2, 3):
            trees = [color_tree(h, random_region(rng, 8, 8)) for _ in range(count)]
            g = _build_graph(trees)
            if len(g.free_nodes()) > 12:
                continue
            for node_side, crossing in enumerate_cut_assignments(g):
                cells = [da.cell for da in crossing]
                assert len(cells) == len(set(cells))


def test_combined_per_query_values_for_every_cut(rng):
    vals, h = small_cube(seed=15)
    from gridcubes.flow import _build_graph
    regions = None
    for _ in range(40):
        candidate = [random_region(rng, 8, 8) for _ in range(2)]
        g = _build_graph([color_tree(h, r) for r in candidate])
        if len(g.free_nodes()) <= 10:
            regions = candidate
            break
    assert regions is not None
    g = _build_graph([color_tree(h, r) for r in regions])
    for node_side, crossing in enumerate_cut_assignments(g):
        for q, region in enumerate(regions):
            terms = plan_terms_for_query(g, node_side, crossing, q)
            assert sum(s * h.value(c) for c, s in terms) == naive_region_sum(vals, region)


def test_combined_three_queries(rng):
    vals, h = small_cube(seed=19)
    for _ in range(10):
        regions = [random_region(rng, 8, 8) for _ in range(3)]
        result = combined_plan([color_tree(h, r) for r in regions], h)
        for plan, region in zip(result.plans, regions):
            assert plan.value == naive_region_sum(vals, region)
        assert result.retrieval == frozenset().union(*(p.points() for p in result.plans))


def test_combined_disjoint_top_cells_equals_sum_of_individuals():
    vals, h = small_cube(seed=16)
    r1 = region_from_rectangles([((0, 0), (2, 1))], h.dims)   # inside top cell (0,0)
    r2 = region_from_rectangles([((5, 5), (7, 6))], h.dims)   # inside top cell (4,4)
    t1, t2 = color_tree(h, r1), color_tree(h, r2)
    s1 = min_cut_plan(build_flow_graph(t1), h)
    s2 = min_cut_plan(build_flow_graph(t2), h)
    result = combined_plan([t1, t2], h)
    assert len(result.retrieval) == s1.size + s2.size


def test_mark_failed_forces_detour():
    vals, h = demo_cube()
    region = demo_region()
    g = build_flow_graph(color_tree(h, region))
    cell4 = cell_by_label(h, "L2(4,4)")
    plan = min_cut_plan(mark_failed(g, {cell4}), h)
    assert cell4 not in plan.points()
    assert plan.value == naive_region_sum(vals, region)


def test_mark_failed_infeasible_pair():
    vals, h = demo_cube()
    g = build_flow_graph(color_tree(h, demo_region()))
    failed = {cell_by_label(h, "L2(4,0)"), cell_by_label(h, "L2(4,4)")}
    with pytest.raises(InfeasibleError) as err:
        min_cut_plan(mark_failed(g, failed), h)
    assert err.value.blocking == failed


def test_mark_failed_outside_tree_is_noop():
    vals, h = demo_cube()
    region = region_from_rectangles([((0, 0), (3, 3))], h.dims)
    g = build_flow_graph(color_tree(h, region))
    baseline = min_cut_plan(g, h)
    far = cell_by_label(h, "L1(4,6)")
    assert min_cut_plan(mark_failed(g, {far}), h).terms == baseline.terms


def test_failed_plans_match_enumeration(rng):
    vals, h = small_cube(seed=17)
    for _ in range(25):
        region = random_region(rng, 8, 8)
        g0 = build_flow_graph(color_tree(h, region))
        cells = sorted({da.cell for da in g0.data_arcs},
                       key=lambda c: (c.level, c.bounds.y0, c.bounds.x0))
        fail = {cells[rng.randrange(len(cells))]}
        g = mark_failed(g0, fail)
        if len(g.free_nodes()) > 14:
            continue
        sizes = [len({da.cell for da in crossing})
                 for _, crossing in enumerate_cut_assignments(g)
                 if not any(da.cell in fail for da in crossing)]
        try:
            plan = min_cut_plan(g, h)
        except InfeasibleError:
            assert not sizes
            continue
        assert not (set(fail) & plan.points())
        assert plan.size == min(sizes)
        assert plan.value == naive_region_sum(vals, region)
