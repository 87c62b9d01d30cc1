"""End-to-end simulation dispatch over trajectory points."""

from __future__ import annotations

import concurrent.futures
import math
from dataclasses import replace

from .channel import DEFAULT_ANTENNAS, Snapshot, snapshot_from_paths
from .config import RunConfig
from .materials import DEFAULT_MATERIALS, load_material_table
from .raytracer import trace_all
from .scenario import build_scene, sample_trajectory, tx_position
from .stats import RunResult


class SimulationError(Exception):
    pass


# per-process state for the worker pool; snapshots are independent, so the
# only shared data is the immutable scene and run parameters
_WORKER_CTX: dict = {}


def _init_worker(scene, tx, budget, trace_cfg, materials) -> None:
    _WORKER_CTX.update(scene=scene, tx=tx, budget=budget, trace=trace_cfg, materials=materials)


def _solve_point(point) -> Snapshot:
    ctx = _WORKER_CTX
    paths = trace_all(ctx["scene"], ctx["tx"], point.position, ctx["trace"])
    return snapshot_from_paths(
        paths,
        ctx["budget"],
        ctx["scene"],
        DEFAULT_ANTENNAS,
        index=point.index,
        time=point.time,
        rx_pos=point.position,
        materials=ctx["materials"],
    )


def run_simulation(cfg: RunConfig, rx_height: float | None = None) -> RunResult:
    """Trace every trajectory point and assemble the ordered run result.

    Snapshots are independent work units; with workers > 1 they are solved
    in a process pool and merged back in snapshot order, so the result is
    identical for any worker count.
    """
    try:
        scenario = replace(cfg.scenario, seed=cfg.seed)
        scene = build_scene(scenario)
        materials = load_material_table(cfg.material_table) if cfg.material_table else DEFAULT_MATERIALS
        surface_z = scene.reflecting_surface.anchor_z
        tx = tx_position(cfg.trajectory, surface_z)
        height = rx_height if rx_height is not None else cfg.rx_height
        points = sample_trajectory(cfg.trajectory, height, surface_z)

        digest_cfg = cfg if rx_height is None else replace(cfg, rx_height=rx_height)
        _init_worker(scene, tx, cfg.budget, cfg.trace, materials)
        if cfg.workers <= 1:
            snapshots = [_solve_point(p) for p in points]
        else:
            chunk = max(1, math.ceil(len(points) / (4 * cfg.workers)))
            with concurrent.futures.ProcessPoolExecutor(
                max_workers=cfg.workers,
                initializer=_init_worker,
                initargs=(scene, tx, cfg.budget, cfg.trace, materials),
            ) as pool:
                snapshots = list(pool.map(_solve_point, points, chunksize=chunk))
        return RunResult(snapshots=tuple(snapshots), config_digest=digest_cfg.digest(), seed=cfg.seed)
    except (ValueError, RuntimeError) as exc:
        raise SimulationError(str(exc)) from exc
