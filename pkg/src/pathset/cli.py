"""Command-line interface: detection, planning, path sets, benchmarks, rendering.

The default seed comes from PATHSET_SEED when set. Outputs land under
./out/<command> unless -o points elsewhere. Exit codes: 0 on success,
2 on scene loading or validation errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import bench
from .errors import ParseError, PathsetError
from .passages import detect_both, detect_passages, detect_passages_3d
from .planner import CostConfig, mcpp_plan, paopp_plan
from .scene_io import GeneratorSpec, generate_scene, load_scene, render_svg, save_scene, write_stats_csv
from .transfer import PathSet, TeamConfig, generate_path_set, separately_plan


def _default_seed() -> int:
    return int(os.environ.get("PATHSET_SEED", "0"))


def _out_dir(args, command: str) -> Path:
    base = Path(args.out) if args.out else Path("out") / command
    base.mkdir(parents=True, exist_ok=True)
    return base


def _parse_point(text: str) -> np.ndarray:
    parts = [float(x) for x in text.split(",")]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("expected x,y")
    return np.array(parts)


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x]


def _float_list(text: str) -> list[float]:
    return [float(x) for x in text.split(",") if x]


def _cost(args) -> CostConfig:
    return CostConfig(args.cost, args.kp)


def cmd_gen(args) -> int:
    spec = GeneratorSpec(obstacle_count=args.count, side_length=args.side,
                         shapes=tuple(args.shapes.split(",")), seed=args.seed,
                         width=args.width, height=args.height)
    scene = generate_scene(spec)
    out = _out_dir(args, "gen") / (args.name or f"scene_m{args.count}_s{args.seed}.json")
    save_scene(scene, out)
    print(out)
    return 0


def cmd_passages(args) -> int:
    scene = load_scene(args.scene)
    if args.three_d:
        pmap = detect_passages_3d(scene, args.check if args.check != "ext" else "extended")
        pure = None
    elif args.check == "both":
        pure, pmap = detect_both(scene, include_walls=args.walls)
    else:
        mode = "pure" if args.check == "pure" else "extended"
        pmap = detect_passages(scene, mode, include_walls=args.walls)
        pure = None
    out = _out_dir(args, "passages")
    path = out / "passages.json"
    path.write_text(json.dumps(pmap.to_dict(), indent=1))
    print(f"{len(pmap.passages)} passages -> {path}")
    if args.svg:
        svg = out / "passages.svg"
        svg.write_text(render_svg(scene, passages=pmap, pure_passages=pure))
        print(svg)
    return 0


def cmd_plan(args) -> int:
    scene = load_scene(args.scene)
    mode = "pure" if args.check == "pure" else "extended"
    res = paopp_plan(scene, args.start, args.goal, _cost(args), mode=mode,
                     n_samples=args.samples, seed=args.seed)
    out = _out_dir(args, "plan")
    path = out / "plan.json"
    path.write_text(json.dumps(res.to_dict(), indent=1))
    print(f"cost={res.cost:.4f} length={res.length:.3f} "
          f"min_width={res.min_width:.3f} -> {path}")
    if args.svg:
        svg = out / "plan.svg"
        svg.write_text(render_svg(scene, passages=detect_passages(scene, mode), plan=res))
        print(svg)
    return 0


def cmd_mcpp(args) -> int:
    scene = load_scene(args.scene)
    res = mcpp_plan(scene, args.start, args.goal, mc_err=args.mc_err,
                    failure_mode=args.mc_mode, budget=args.budget, seed=args.seed)
    out = _out_dir(args, "mcpp") / "mcpp.json"
    doc = res.plan.to_dict()
    doc["mc"] = res.mc
    doc["rounds"] = res.rounds
    out.write_text(json.dumps(doc, indent=1))
    print(f"mc={res.mc:.4f} rounds={res.rounds} -> {out}")
    return 0


def cmd_pathset(args) -> int:
    scene = load_scene(args.scene)
    if args.team:
        raw = json.loads(Path(args.team).read_text())
        team = TeamConfig(np.array(raw["s0"]), np.array(raw["sd"]), raw.get("pivot"))
    else:
        scene_geom_seed = args.seed
        team = bench.random_team(scene, args.k, scene_geom_seed)
    fn = separately_plan if args.method == "sp" else generate_path_set
    ps, plan = fn(scene, team, _cost(args), n_samples=args.samples, seed=args.seed)
    out = _out_dir(args, "pathset")
    path = out / "pathset.json"
    path.write_text(json.dumps(ps.to_dict(), indent=1))
    print(f"{len(ps.paths)} paths, pivot={ps.pivot}, "
          f"pivot cost={plan.cost:.4f} -> {path}")
    if args.svg:
        svg = out / "pathset.svg"
        svg.write_text(render_svg(scene, passages=detect_passages(scene), path_set=ps))
        print(svg)
    return 0


def cmd_render(args) -> int:
    scene = load_scene(args.scene)
    passages = pure = path_set = None
    if args.passages:
        from .passages import PassageMap
        passages = PassageMap.from_dict(json.loads(Path(args.passages).read_text()))
    if args.with_passages:
        pure, passages = detect_both(scene)
    if args.pathset:
        path_set = PathSet.from_dict(json.loads(Path(args.pathset).read_text()))
    out = _out_dir(args, "render") / "scene.svg"
    out.write_text(render_svg(scene, passages=passages, pure_passages=pure, path_set=path_set))
    print(out)
    return 0


def cmd_bench_passages(args) -> int:
    records = bench.bench_passages(args.counts, args.sides, args.trials, args.seed, args.jobs)
    out = _out_dir(args, "bench-passages")
    write_stats_csv(records, out / "passages.csv", bench.PASSAGE_COLUMNS)
    summary = bench.passage_count_summary(records)
    if len(set(r["side_length"] for r in records)) > 1:
        summary["size_sweep"] = bench.passage_size_summary(records)
    (out / "summary.json").write_text(json.dumps(summary, indent=1))
    if "slope_pure" in summary:
        print(f"pure: slope={summary['slope_pure']:.2f} R2={summary['r2_pure']:.4f}")
        print(f"ext:  slope={summary['slope_ext']:.2f} R2={summary['r2_ext']:.4f}")
    print(f"mean ext/pure ratio: {summary['mean_ratio']:.4f}")
    print(out / "passages.csv")
    return 0


def cmd_bench_plan(args) -> int:
    records = bench.bench_plan(args.counts, args.trials, args.seed, samples=args.samples,
                               cost_kind=args.cost, k_p=args.kp, side=args.side, jobs=args.jobs)
    out = _out_dir(args, "bench-plan")
    write_stats_csv(records, out / "plan.csv", bench.PLAN_COLUMNS)
    summary = bench.plan_speedup_summary(records)
    (out / "summary.json").write_text(json.dumps(summary, indent=1))
    print(f"mean ext/pure time ratio: {summary['time_ratio']:.3f} over {summary['pairs']} pairs")
    print(out / "plan.csv")
    return 0


def cmd_bench_pathset(args) -> int:
    records = bench.bench_pathset(args.counts, args.paths, args.trials, args.seed,
                                  samples=args.samples, methods=args.methods.split(","),
                                  jobs=args.jobs)
    out = _out_dir(args, "bench-pathset")
    write_stats_csv(records, out / "pathset.csv", bench.PATHSET_COLUMNS)
    summary = bench.pathset_summary(records)
    (out / "summary.json").write_text(
        json.dumps({"mean_ms": {str(k): v for k, v in summary["mean_ms"].items()},
                    "pt_cov_across_k": summary["pt_cov_across_k"]}, indent=1))
    print(out / "pathset.csv")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pathset", description=__doc__)
    p.add_argument("--out", "-o", help="output directory (default ./out/<command>)")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a random scene")
    g.add_argument("--count", type=int, required=True)
    g.add_argument("--side", type=float, default=1.0)
    g.add_argument("--shapes", default="square,regular_triangle,rect_2to1")
    g.add_argument("--width", type=float, default=50.0)
    g.add_argument("--height", type=float, default=30.0)
    g.add_argument("--seed", type=int, default=_default_seed())
    g.add_argument("--name")
    g.set_defaults(fn=cmd_gen)

    q = sub.add_parser("passages", help="detect passages in a scene")
    q.add_argument("scene")
    q.add_argument("--check", choices=("pure", "ext", "both"), default="ext")
    q.add_argument("--walls", action=argparse.BooleanOptionalAction, default=None)
    q.add_argument("--3d", dest="three_d", action="store_true")
    q.add_argument("--svg", action="store_true")
    q.set_defaults(fn=cmd_passages)

    pl = sub.add_parser("plan", help="passage-aware single-path planning")
    pl.add_argument("scene")
    pl.add_argument("--start", type=_parse_point, required=True)
    pl.add_argument("--goal", type=_parse_point, required=True)
    pl.add_argument("--cost", choices=("ratio", "weighted"), default="weighted")
    pl.add_argument("--kp", type=float, default=10.0)
    pl.add_argument("--samples", type=int, default=3000)
    pl.add_argument("--check", choices=("pure", "ext"), default="ext")
    pl.add_argument("--seed", type=int, default=_default_seed())
    pl.add_argument("--svg", action="store_true")
    pl.set_defaults(fn=cmd_plan)

    mc = sub.add_parser("mcpp", help="max-clearance baseline planning")
    mc.add_argument("scene")
    mc.add_argument("--start", type=_parse_point, required=True)
    mc.add_argument("--goal", type=_parse_point, required=True)
    mc.add_argument("--mc-err", type=float, default=0.5)
    mc.add_argument("--mc-mode", choices=("time", "sample"), default="sample")
    mc.add_argument("--budget", type=float, default=20000)
    mc.add_argument("--seed", type=int, default=_default_seed())
    mc.set_defaults(fn=cmd_mcpp)

    ps = sub.add_parser("pathset", help="generate a coordinated path set")
    ps.add_argument("scene")
    ps.add_argument("--team", help="JSON file with s0, sd, optional pivot")
    ps.add_argument("--k", type=int, default=5, help="team size for a random team")
    ps.add_argument("--method", choices=("pt", "sp"), default="pt")
    ps.add_argument("--cost", choices=("ratio", "weighted"), default="weighted")
    ps.add_argument("--kp", type=float, default=10.0)
    ps.add_argument("--samples", type=int, default=3000)
    ps.add_argument("--seed", type=int, default=_default_seed())
    ps.add_argument("--svg", action="store_true")
    ps.set_defaults(fn=cmd_pathset)

    r = sub.add_parser("render", help="render a scene (optionally with overlays)")
    r.add_argument("scene")
    r.add_argument("--passages", help="passages JSON to overlay")
    r.add_argument("--with-passages", action="store_true", help="detect and overlay both checks")
    r.add_argument("--pathset", help="path set JSON to overlay")
    r.set_defaults(fn=cmd_render)

    bp = sub.add_parser("bench-passages", help="passage count statistics")
    bp.add_argument("--counts", type=_int_list, default=list(range(10, 101, 10)))
    bp.add_argument("--sides", type=_float_list, default=[1.0])
    bp.add_argument("--trials", type=int, default=10)
    bp.add_argument("--seed", type=int, default=_default_seed())
    bp.add_argument("--jobs", type=int, default=1)
    bp.set_defaults(fn=cmd_bench_passages)

    bl = sub.add_parser("bench-plan", help="pure vs extended planning times")
    bl.add_argument("--counts", type=_int_list, default=[30, 40, 50, 60])
    bl.add_argument("--trials", type=int, default=10)
    bl.add_argument("--samples", type=int, default=10000)
    bl.add_argument("--cost", choices=("ratio", "weighted"), default="weighted")
    bl.add_argument("--kp", type=float, default=10.0)
    bl.add_argument("--side", type=float, default=1.0)
    bl.add_argument("--seed", type=int, default=_default_seed())
    bl.add_argument("--jobs", type=int, default=1)
    bl.set_defaults(fn=cmd_bench_plan)

    bs = sub.add_parser("bench-pathset", help="PT vs SP generation times")
    bs.add_argument("--counts", type=_int_list, default=[10, 20, 30])
    bs.add_argument("--paths", type=_int_list, default=[3, 6, 9, 12, 15, 18])
    bs.add_argument("--trials", type=int, default=10)
    bs.add_argument("--samples", type=int, default=3000)
    bs.add_argument("--methods", default="pt,sp")
    bs.add_argument("--seed", type=int, default=_default_seed())
    bs.add_argument("--jobs", type=int, default=1)
    bs.set_defaults(fn=cmd_bench_pathset)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PathsetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
