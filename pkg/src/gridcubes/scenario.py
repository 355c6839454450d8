"""Scenario files: JSON descriptions of grid, hierarchy, regions and failures.

Schema (version 1):

    {
      "schema": 1,
      "grid": {"width": W, "height": H,
               "values": [row-major numbers]            # or
               "random": {"seed": S, "low": A, "high": B}},
      "hierarchy": {"fanouts": [F1, F2, ...],
                    "mode": "simple" | "ps",            # optional, default simple
                    "redundant": false},                # optional
      "regions":  [{"name": N, "rects": [[x0,y0,x1,y1], ...]}, ...],
      "queries":  [{"name": N, "regions": [region names]}, ...],   # optional
      "aliases":  {"label": "cell:LEVEL:x,y" | "node:x,y", ...},   # optional
      "failures": [{"name": N, "fail": [SPEC | alias, ...]}, ...]  # optional
    }

Values are row-major with y as the outer index, matching the top-left origin.
Failure SPECs use the grammar `node:x,y` or `cell:LEVEL:x0,y0` where (x0, y0)
is any grid location inside the cell.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import ScenarioError
from .grid import GridDims, GridValues, RectilinearRegion, region_from_rectangles
from .hierarchy import CubeHierarchy, HierarchyConfig, build_hierarchy, cell_of
from .recovery import FailureSet


@dataclass
class Scenario:
    values: GridValues
    config: HierarchyConfig
    mode: str
    redundant: bool
    regions: dict[str, RectilinearRegion]
    failures: dict[str, list[str]]       # name -> raw specs
    aliases: dict[str, str] = field(default_factory=dict)
    queries: dict[str, list[str]] = field(default_factory=dict)  # name -> region names
    _hierarchy: CubeHierarchy | None = None

    @property
    def dims(self) -> GridDims:
        return self.config.dims

    def hierarchy(self) -> CubeHierarchy:
        if self._hierarchy is None:
            self._hierarchy = build_hierarchy(self.values, self.config)
        return self._hierarchy

    def region(self, name: str) -> RectilinearRegion:
        try:
            return self.regions[name]
        except KeyError:
            raise ScenarioError(f"unknown region {name!r}", kind="name") from None

    def expand_query_names(self, names) -> list[str]:
        """Region names with query names expanded to their region batches."""
        out: list[str] = []
        for name in names:
            if name in self.queries:
                out.extend(self.queries[name])
            else:
                out.append(name)
        return out

    def resolve_spec(self, spec: str):
        """A failure spec or alias -> ('node', coord) or ('cell', Cell)."""
        spec = self.aliases.get(spec, spec)
        parts = spec.split(":")
        try:
            if parts[0] == "node" and len(parts) == 2:
                x, y = (int(v) for v in parts[1].split(","))
                if not self.dims.contains((x, y)):
                    raise ScenarioError(f"node {spec!r} outside grid", kind="validation")
                return "node", (x, y)
            if parts[0] == "cell" and len(parts) == 3:
                level = int(parts[1])
                x, y = (int(v) for v in parts[2].split(","))
                if not 0 <= level <= self.config.height:
                    raise ScenarioError(f"bad level in {spec!r}", kind="validation")
                if not self.dims.contains((x, y)):
                    raise ScenarioError(f"cell {spec!r} outside grid", kind="validation")
                return "cell", cell_of(self.config, level, (x, y))
        except ValueError:
            pass
        raise ScenarioError(f"bad failure spec {spec!r}", kind="validation")

    def failure_set(self, specs) -> FailureSet:
        nodes, cells = [], []
        for spec in specs:
            kind, obj = self.resolve_spec(spec)
            (nodes if kind == "node" else cells).append(obj)
        return FailureSet.of(nodes, cells)

    def named_failure(self, name: str) -> FailureSet:
        try:
            specs = self.failures[name]
        except KeyError:
            raise ScenarioError(f"unknown failure set {name!r}", kind="name") from None
        return self.failure_set(specs)


def _require(obj, key, context):
    if key not in obj:
        raise ScenarioError(f"missing {key!r} in {context}", kind="validation")
    return obj[key]


def load_scenario(path: str, seed_override: int | None = None) -> Scenario:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except OSError as e:
        raise ScenarioError(f"cannot read scenario: {e}", kind="parse") from None
    except json.JSONDecodeError as e:
        raise ScenarioError(
            f"scenario parse error at line {e.lineno}, column {e.colno}: {e.msg}",
            kind="parse") from None

    if raw.get("schema") != 1:
        raise ScenarioError("unsupported or missing schema version", kind="validation")
    grid = _require(raw, "grid", "scenario")
    dims = GridDims(int(_require(grid, "width", "grid")), int(_require(grid, "height", "grid")))
    if "values" in grid:
        values = GridValues.from_flat(dims, grid["values"])
    elif "random" in grid:
        spec = grid["random"]
        seed = seed_override if seed_override is not None else int(_require(spec, "seed", "random"))
        values = GridValues.random(dims, seed, int(spec.get("low", 0)), int(spec.get("high", 9)))
    else:
        raise ScenarioError("grid needs 'values' or 'random'", kind="validation")

    hier = _require(raw, "hierarchy", "scenario")
    config = HierarchyConfig(dims, tuple(int(f) for f in _require(hier, "fanouts", "hierarchy")))
    mode = hier.get("mode", "simple")
    if mode not in ("simple", "ps"):
        raise ScenarioError(f"bad hierarchy mode {mode!r}", kind="validation")

    regions = {}
    for entry in raw.get("regions", []):
        name = _require(entry, "name", "region")
        rect_pairs = [((r[0], r[1]), (r[2], r[3])) for r in _require(entry, "rects", name)]
        regions[name] = region_from_rectangles(rect_pairs, dims)

    failures = {e["name"]: list(e["fail"]) for e in raw.get("failures", [])}
    queries = {e["name"]: list(e["regions"]) for e in raw.get("queries", [])}
    for name, members in queries.items():
        for member in members:
            if member not in regions:
                raise ScenarioError(
                    f"query {name!r} references unknown region {member!r}", kind="name")
    return Scenario(values, config, mode, bool(hier.get("redundant", False)),
                    regions, failures, dict(raw.get("aliases", {})), queries)
