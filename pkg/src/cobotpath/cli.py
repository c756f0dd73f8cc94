"""Command-line pipeline: scenario -> via-points -> IK layers -> chosen paths.

Everything except ``timings.json`` is byte-stable for fixed inputs.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema

from cobotpath.kinematics import RobotGeometry
from cobotpath.pathopt import (
    AngleDiff,
    CostFunctionSpec,
    CostKind,
    DisconnectedLayerError,
    F5Direction,
    build_graph,
    random_indices,
    path_cost,
    shortest_path,
)
from cobotpath.region import boundary_circle
from cobotpath.trajectory import Profile, Scenario, plan_trajectory

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_DISCONNECTED = 2


def _fmt(x: float) -> str:
    return "%.12g" % x


@dataclass(frozen=True)
class RunConfig:
    scenario: str
    out: Path
    geometry: str | None = None
    costs: tuple[CostKind, ...] = (CostKind.F1,)
    weights: tuple[float, ...] = ()
    profile: Profile | None = None
    T: int | None = None
    angle_diff: AngleDiff = AngleDiff.WRAPPED
    f5_direction: F5Direction = F5Direction.AS_PAPER
    random_seeds: tuple[int, ...] = (0,)
    region_boundary: bool = True
    specs: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "out", Path(self.out))
        object.__setattr__(self, "costs", tuple(CostKind(c) for c in self.costs))
        if not self.costs:
            raise ValueError("at least one cost function is required")
        if self.profile is not None:
            object.__setattr__(self, "profile", Profile(self.profile))
        if self.T is not None and (int(self.T) != self.T or self.T < 1):
            raise ValueError(f"T must be a positive integer, got {self.T}")
        if len(self.weights) not in (0, 3, 5):
            raise ValueError(f"--weights takes 3 or 5 values, got {len(self.weights)}")
        kw = dict(zip(("w1", "w2", "w3", "w4", "w5"), self.weights))
        # building the specs here validates weights before any IK work
        specs = {
            c: CostFunctionSpec(c, angle_diff=self.angle_diff, f5_direction=self.f5_direction, **kw)
            for c in self.costs
        }
        object.__setattr__(self, "specs", specs)

    def load(self) -> tuple[Scenario, RobotGeometry]:
        scenario = Scenario.load(self.scenario).with_overrides(self.T, self.profile)
        geom = RobotGeometry.load(self.geometry) if self.geometry else RobotGeometry.default()
        return scenario, geom


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _write_json(path: Path, data) -> None:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


def _path_rows(result):
    edges = (0.0,) + result.per_edge_costs
    for i, (k, q, c) in enumerate(zip(result.indices, result.chosen, edges)):
        yield [i, k, *(_fmt(x) for x in q.theta), _fmt(c)]


PATH_HEADER = ["layer", "index", "theta1", "theta2", "theta3", "theta4", "theta5", "theta6", "edge_cost"]


def run_scenario(config: RunConfig) -> dict:
    """Run the pipeline and write all artifacts to ``config.out``.

    Returns the summary dict. Raises DisconnectedLayerError after writing the
    via-point and solution files when some via-point has no solution.
    """
    scenario, geom = config.load()
    out = config.out
    out.mkdir(parents=True, exist_ok=True)
    timings = {"note": "wall-clock seconds, machine-dependent, excluded from determinism"}

    t0 = time.perf_counter()
    layers = plan_trajectory(scenario, geom)
    timings["ik"] = time.perf_counter() - t0

    _write_csv(
        out / "via_points.csv",
        ["segment", "t", "s", "x", "y", "z"],
        ([v.via.segment, v.via.t, _fmt(v.via.s), *(_fmt(x) for x in v.via.position)] for v in layers),
    )
    _write_json(out / "solutions.json", {
        "scenario": scenario.name,
        "layers": [
            {"layer": i, "segment": L.via.segment, "t": L.via.t,
             "solutions": [[float(x) for x in q.theta] for q in L.solutions]}
            for i, L in enumerate(layers)
        ],
    })
    if config.region_boundary:
        _write_csv(out / "region_boundary.csv", ["angle", "x", "y"],
                   ([_fmt(v) for v in row] for row in boundary_circle(geom)))

    counts = [len(L) for L in layers]
    summary = {
        "scenario": scenario.name,
        "T": scenario.T,
        "profile": scenario.profile.value,
        "geometry": geom.name,
        "layer_count": len(layers),
        "solutions_per_layer": counts,
        "total_solutions": sum(counts),
        "empty_layers": [i for i, c in enumerate(counts) if c == 0],
        "timings_file": "timings.json",
    }

    try:
        graph = build_graph(layers)
    except DisconnectedLayerError:
        _write_json(out / "summary.json", summary)
        _write_json(out / "timings.json", timings)
        raise

    totals, baselines = {}, {}
    seed_paths = {seed: random_indices(graph, seed) for seed in config.random_seeds}
    random_edges = {seed: {} for seed in config.random_seeds}
    for kind, spec in config.specs.items():
        t0 = time.perf_counter()
        result = shortest_path(graph, spec, geom)
        timings[f"shortest_path_{kind.value}"] = time.perf_counter() - t0
        totals[kind.value] = result.total_cost
        _write_csv(out / f"path_{kind.value}.csv", PATH_HEADER, _path_rows(result))
        baselines[kind.value] = {}
        for seed, idx in seed_paths.items():
            r = path_cost(graph, idx, spec, geom)
            baselines[kind.value][str(seed)] = r.total_cost
            random_edges[seed][kind.value] = (0.0,) + r.per_edge_costs

    for seed, idx in seed_paths.items():
        kinds = [k.value for k in config.specs]
        header = PATH_HEADER[:-1] + [f"edge_cost_{k}" for k in kinds]
        rows = (
            [i, k, *(_fmt(x) for x in graph.layers[i][k].theta), *(_fmt(random_edges[seed][c][i]) for c in kinds)]
            for i, k in enumerate(idx)
        )
        _write_csv(out / f"random_path_{seed}.csv", header, rows)

    summary["total_cost"] = totals
    summary["random_baseline_cost"] = baselines
    summary["random_seeds"] = list(config.random_seeds)
    _write_json(out / "summary.json", summary)
    _write_json(out / "timings.json", timings)
    return summary


def _costs(text: str) -> tuple[str, ...]:
    if text == "all":
        return tuple(c.value for c in CostKind)
    return tuple(s.strip().lower() for s in text.split(",") if s.strip())


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(s) for s in text.split(",")) if text else ()


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(s) for s in text.split(",") if s.strip()) if text else ()


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cobotpath", description="Plan a joint-space path through a Cartesian scenario.")
    p.add_argument("--scenario", required=True, help="scenario JSON file or bundled name test1..test7")
    p.add_argument("--geometry", help="geometry JSON file (default: bundled myCobot 280)")
    p.add_argument("--cost", default="f1", help="f1..f6, comma-separated list, or 'all'")
    p.add_argument("--profile", choices=[e.value for e in Profile])
    p.add_argument("--T", type=int, dest="T", help="steps per segment")
    p.add_argument("--weights", default="", help="w1,w2,w3[,w4,w5]")
    p.add_argument("--angle-diff", choices=[e.value for e in AngleDiff], default=AngleDiff.WRAPPED.value)
    p.add_argument("--f5", choices=[e.value for e in F5Direction], default=F5Direction.AS_PAPER.value)
    p.add_argument("--random-seeds", default="0", help="comma-separated seeds for the random baseline")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--no-region-boundary", action="store_true")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = RunConfig(
            scenario=args.scenario,
            out=args.out,
            geometry=args.geometry,
            costs=_costs(args.cost),
            weights=_floats(args.weights),
            profile=args.profile,
            T=args.T,
            angle_diff=args.angle_diff,
            f5_direction=args.f5,
            random_seeds=_ints(args.random_seeds),
            region_boundary=not args.no_region_boundary,
        )
        summary = run_scenario(config)
    except DisconnectedLayerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DISCONNECTED
    except (OSError, ValueError, jsonschema.ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(f"{summary['scenario']}: {summary['layer_count']} layers, "
          f"{summary['total_solutions']} solutions, costs {summary['total_cost']}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
