"""Command-line front end.

    agtrace scene --config run.cfg --out scene.txt
    agtrace scene --inspect scene.txt
    agtrace simulate --config run.cfg
    agtrace stats out/mpcs.csv --out tables/
    agtrace sweep --config run.cfg --scenario dense_urban

Exit codes: 0 success, 2 configuration error, 3 simulation error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .config import ConfigError, parse_config
from .export import export_run, read_mpcs_csv, read_scene, write_scene, write_stat_tables
from .runner import SimulationError, run_simulation
from .scenario import ScenarioKind, ScenarioSpec, build_scene


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="agtrace", description="28 GHz air-to-ground multipath ray tracer")
    sub = parser.add_subparsers(dest="command", required=True)

    p_scene = sub.add_parser("scene", help="generate or inspect a scene document")
    group = p_scene.add_mutually_exclusive_group(required=True)
    group.add_argument("--config", type=Path, help="run config; generates the seeded scene")
    group.add_argument("--inspect", type=Path, metavar="SCENE", help="print a summary of a scene document")
    p_scene.add_argument("--out", type=Path, help="output scene file (default: <output_dir>/scene.txt)")

    p_sim = sub.add_parser("simulate", help="run one end-to-end simulation")
    p_sim.add_argument("--config", type=Path, required=True)
    p_sim.add_argument("--output-dir", type=Path, help="override the configured output directory")

    p_stats = sub.add_parser("stats", help="recompute statistics tables from an mpcs.csv")
    p_stats.add_argument("mpcs", type=Path)
    p_stats.add_argument("--out", type=Path, help="table directory (default: alongside the input)")

    p_sweep = sub.add_parser("sweep", help="simulate every receiver height of one scenario")
    p_sweep.add_argument("--config", type=Path, required=True)
    p_sweep.add_argument("--scenario", choices=[k.value for k in ScenarioKind], help="override the configured scenario")
    p_sweep.add_argument("--output-dir", type=Path, help="override the configured output directory")
    return parser


def _cmd_scene(args) -> int:
    if args.inspect is not None:
        scene = read_scene(args.inspect)
        z0 = scene.reflecting_surface.anchor_z
        print(f"terrain: {scene.terrain_extent[0]:g} m x {scene.terrain_extent[1]:g} m")
        print(f"surface: z = {z0:g} m, material {scene.surface_material}")
        print(f"buildings: {len(scene.buildings)}")
        if scene.buildings:
            heights = [b.box.max_corner[2] - z0 for b in scene.buildings]
            print(f"building heights: {min(heights):.2f}..{max(heights):.2f} m")
        return 0
    cfg = parse_config(args.config)
    scene = build_scene(replace(cfg.scenario, seed=cfg.seed))
    out = args.out if args.out is not None else cfg.output_dir / "scene.txt"
    out.parent.mkdir(parents=True, exist_ok=True)
    write_scene(scene, out)
    print(f"wrote {out}")
    return 0


def _cmd_simulate(args) -> int:
    cfg = parse_config(args.config)
    out_dir = args.output_dir if args.output_dir is not None else cfg.output_dir
    run = run_simulation(cfg)
    files = export_run(run, out_dir)
    total = sum(len(s.mpcs) for s in run.snapshots)
    print(f"{len(run.snapshots)} snapshots, {total} MPCs -> {files[0].parent}")
    return 0


def _cmd_stats(args) -> int:
    run = read_mpcs_csv(args.mpcs)
    out_dir = args.out if args.out is not None else args.mpcs.parent
    files = write_stat_tables(run, out_dir)
    print(f"wrote {len(files)} tables -> {out_dir}")
    return 0


def _cmd_sweep(args) -> int:
    cfg = parse_config(args.config)
    if args.scenario is not None:
        cfg = replace(cfg, scenario=ScenarioSpec.for_kind(args.scenario, seed=cfg.seed))
    base = args.output_dir if args.output_dir is not None else cfg.output_dir
    for height in cfg.trajectory.rx_heights:
        run = run_simulation(cfg, rx_height=height)
        out = Path(base) / f"height_{height:g}m"
        export_run(run, out)
        total = sum(len(s.mpcs) for s in run.snapshots)
        print(f"height {height:g} m: {len(run.snapshots)} snapshots, {total} MPCs -> {out}")
    return 0


_COMMANDS = {"scene": _cmd_scene, "simulate": _cmd_simulate, "stats": _cmd_stats, "sweep": _cmd_sweep}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (SimulationError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
