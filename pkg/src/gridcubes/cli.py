"""Scenario-driven command line front end.

Subcommands: divide, plan, ps-plan, construct, recover, render. Output is
line oriented; --json additionally writes a machine-readable report. Exit
codes: 0 success, 2 scenario parse error, 3 unresolved name, 4 bounds or
validation error, 1 unexpected failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .division import greedy_divide
from .errors import (BoundsError, ConfigError, GridCubesError, InfeasibleError,
                     ScenarioError, ValidationError)
from .flow import QueryPlan, build_flow_graph, combined_plan, mark_failed, min_cut_plan
from .hierarchy import Cell, color_tree
from .prefix import build_ps_cube, ps_query_plan
from .protocol import run_construction
from .recovery import plan_with_failures
from .render import render_svg
from .scenario import Scenario, load_scenario

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_PARSE = 2
EXIT_NAME = 3
EXIT_VALIDATION = 4


def _cell_json(cell: Cell) -> dict:
    b = cell.bounds
    return {"level": cell.level, "x0": b.x0, "y0": b.y0, "x1": b.x1, "y1": b.y1}


def _value_json(v):
    if isinstance(v, Fraction):
        return {"exact": f"{v.numerator}/{v.denominator}", "approx": float(v)}
    return v


def _term_str(point, sign) -> str:
    return f"{'+' if sign > 0 else '-'} {point.label()}"


def _plan_lines(plan: QueryPlan) -> str:
    if not plan.terms:
        return f"(empty) = {plan.value}"
    body = " ".join(_term_str(p, s) for p, s in plan.terms)
    return f"{body} = {plan.value}"


def _failed_cells(scenario: Scenario, specs) -> set[Cell]:
    """Failure specs interpreted as unreadable data points for the planner."""
    from .hierarchy import cell_of

    cells = set()
    for spec in specs:
        kind, obj = scenario.resolve_spec(spec)
        cells.add(cell_of(scenario.config, 0, obj) if kind == "node" else obj)
    return cells


def cmd_divide(scenario: Scenario, args, report: dict) -> int:
    h = scenario.hierarchy()
    results = []
    for name in scenario.expand_query_names(args.region):
        cover = greedy_divide(h, scenario.region(name))
        print(f"region {name}:")
        for cell in cover.cells:
            b = cell.bounds
            print(f"  {cell.level}:({b.x0},{b.y0})-({b.x1},{b.y1})")
        print(f"  size {cover.size}")
        results.append({"region": name, "size": cover.size,
                        "cells": [_cell_json(c) for c in cover.cells]})
    report["divide"] = results
    return EXIT_OK


def cmd_plan(scenario: Scenario, args, report: dict) -> int:
    h = scenario.hierarchy()
    failed = _failed_cells(scenario, args.fail)
    names = scenario.expand_query_names(args.region)
    trees = [color_tree(h, scenario.region(name)) for name in names]
    out = {"queries": [], "infeasible": False}
    try:
        if len(trees) == 1:
            g = mark_failed(build_flow_graph(trees[0]), failed) if failed \
                else build_flow_graph(trees[0])
            plans = [min_cut_plan(g, h)]
            retrieval = plans[0].points()
        else:
            result = combined_plan(trees, h, failed_cells=failed)
            plans = list(result.plans)
            retrieval = set(result.retrieval)
    except InfeasibleError as e:
        blocking = " ".join(sorted(c.label() for c in e.blocking))
        print(f"INFEASIBLE {blocking}")
        out["infeasible"] = True
        out["blocking"] = [_cell_json(c) for c in sorted(
            e.blocking, key=lambda c: (c.level, c.bounds.y0, c.bounds.x0))]
        report["plan"] = out
        return EXIT_OK
    for name, plan in zip(names, plans):
        print(f"query {name}: {_plan_lines(plan)}")
        out["queries"].append({
            "region": name, "size": plan.size, "value": _value_json(plan.value),
            "terms": [dict(_cell_json(c), sign=s) for c, s in plan.terms]})
    print(f"retrieval set: {len(retrieval)} points")
    out["retrieval_size"] = len(retrieval)
    out["retrieval"] = [_cell_json(c) for c in sorted(
        retrieval, key=lambda c: (-c.level, c.bounds.y0, c.bounds.x0))]
    report["plan"] = out
    return EXIT_OK


def cmd_ps_plan(scenario: Scenario, args, report: dict) -> int:
    ps = build_ps_cube(scenario.values, scenario.config)
    results = []
    for name in scenario.expand_query_names(args.region):
        plan = ps_query_plan(ps, scenario.region(name))
        print(f"query {name}: cost {plan.size}, value {plan.value}")
        terms = []
        for point, sign in plan.terms:
            c = point.covered
            print(f"  {'+' if sign > 0 else '-'} {point.label()} "
                  f"covers ({c.x0},{c.y0})-({c.x1},{c.y1}) entry {ps.entry(point)}")
            terms.append({"level": point.cell.level,
                          "x": point.location[0], "y": point.location[1],
                          "covered": [c.x0, c.y0, c.x1, c.y1],
                          "sign": sign, "entry": ps.entry(point)})
        results.append({"region": name, "cost": plan.size,
                        "value": _value_json(plan.value), "terms": terms})
    report["ps_plan"] = results
    return EXIT_OK


def cmd_construct(scenario: Scenario, args, report: dict) -> int:
    mode = args.mode or scenario.mode
    redundant = args.redundant or scenario.redundant
    states, stats = run_construction(scenario.values, scenario.config,
                                     mode=mode, redundant=redundant)
    sent = stats.total_messages
    print(f"sent {sent} received {sum(stats.received.values())} "
          f"max-received {stats.max_received}")
    if args.dump:
        for (x, y) in scenario.dims.coords():
            st = states[(x, y)]
            vals = " ".join(str(v) for v in (st.local_value,) + st.stored)
            print(f"{x} {y} {st.junction_level} {vals}")
    report["construct"] = {"mode": mode, "redundant": redundant,
                           "sent": sent,
                           "received": sum(stats.received.values()),
                           "max_received": stats.max_received}
    return EXIT_OK


def cmd_recover(scenario: Scenario, args, report: dict) -> int:
    h = scenario.hierarchy()
    failures = scenario.failure_set(args.fail)
    results = []
    for name in scenario.expand_query_names(args.region):
        res = plan_with_failures(h, failures, scenario.region(name))
        if isinstance(res, QueryPlan):
            print(f"query {name}: exact plan {_plan_lines(res)}")
            results.append({"region": name, "kind": "exact-plan",
                            "value": _value_json(res.value), "points_read": res.size})
            continue
        kind = res.kind.value
        print(f"query {name}: {kind} value {res.value} "
              f"requested {len(res.requested_area)} recovered {len(res.recovered_area)} "
              f"reads {res.points_read}")
        results.append({"region": name, "kind": kind,
                        "value": _value_json(res.value),
                        "requested_area": len(res.requested_area),
                        "recovered_area": len(res.recovered_area),
                        "points_read": res.points_read})
    report["recover"] = results
    return EXIT_OK


def cmd_render(scenario: Scenario, args, report: dict) -> int:
    if not args.svg:
        raise ValidationError("render requires --svg PATH")
    h = scenario.hierarchy()
    region = scenario.region(args.region[0]) if args.region else None
    plan = None
    if args.plan and region is not None:
        plan = min_cut_plan(build_flow_graph(color_tree(h, region)), h)
    svg = render_svg(h, region, plan)
    with open(args.svg, "w") as fh:
        fh.write(svg)
    print(f"wrote {args.svg}")
    report["render"] = {"path": args.svg, "bytes": len(svg)}
    return EXIT_OK


COMMANDS = {
    "divide": (cmd_divide, True),
    "plan": (cmd_plan, True),
    "ps-plan": (cmd_ps_plan, True),
    "construct": (cmd_construct, False),
    "recover": (cmd_recover, True),
    "render": (cmd_render, False),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gridcubes",
        description="Multiresolution cube queries over 2-D sensor grids")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--scenario", required=True)
        p.add_argument("--region", action="append", default=[])
        p.add_argument("--fail", action="append", default=[])
        p.add_argument("--mode", choices=["simple", "ps"])
        p.add_argument("--redundant", action="store_true")
        p.add_argument("--json", dest="json_path")
        p.add_argument("--svg")
        p.add_argument("--seed", type=int)
        p.add_argument("--dump", action="store_true")
        p.add_argument("--plan", action="store_true",
                       help="overlay the min-cut plan when rendering")
    return parser


def run_scenario(path: str, subcommand: str, flags=()) -> int:
    """Programmatic entry point: dispatch one subcommand on a scenario."""
    return main([subcommand, "--scenario", path, *flags])


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handler, needs_region = COMMANDS[args.command]
    try:
        scenario = load_scenario(args.scenario, seed_override=args.seed)
        if needs_region and not args.region:
            raise ValidationError(f"{args.command} requires at least one --region")
        report = {"schema": 1, "command": args.command, "scenario": args.scenario}
        code = handler(scenario, args, report)
        if args.json_path:
            with open(args.json_path, "w") as fh:
                json.dump(report, fh, indent=2, sort_keys=True)
                fh.write("\n")
        return code
    except ScenarioError as e:
        print(f"error: {e}", file=sys.stderr)
        return {"parse": EXIT_PARSE, "name": EXIT_NAME}.get(e.kind, EXIT_VALIDATION)
    except (BoundsError, ValidationError, ConfigError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except GridCubesError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_UNEXPECTED


if __name__ == "__main__":
    sys.exit(main())
