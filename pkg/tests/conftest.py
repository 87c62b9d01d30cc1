from __future__ import annotations

import random

import pytest

from agtrace import (
    Aabb,
    Building,
    LinkBudget,
    RunResult,
    Scene,
    TraceConfig,
    TrajectorySpec,
    sample_trajectory,
    snapshot_from_paths,
    trace_all,
    tx_position,
    vec3,
)


def simulate_points(scene, height, budget=None, trace_cfg=None, traj=None) -> RunResult:
    """Minimal in-process run over a trajectory, bypassing the config layer."""
    budget = budget or LinkBudget()
    trace_cfg = trace_cfg or TraceConfig()
    traj = traj or TrajectorySpec()
    surface_z = scene.reflecting_surface.anchor_z
    tx = tx_position(traj, surface_z)
    snapshots = []
    for point in sample_trajectory(traj, height, surface_z):
        paths = trace_all(scene, tx, point.position, trace_cfg)
        snapshots.append(
            snapshot_from_paths(paths, budget, scene, index=point.index, time=point.time, rx_pos=point.position)
        )
    return RunResult(snapshots=tuple(snapshots), config_digest="test", seed=0)


@pytest.fixture
def ground_scene() -> Scene:
    return Scene()


@pytest.fixture
def budget() -> LinkBudget:
    return LinkBudget()


def make_box(x0, y0, x1, y1, h, z0=0.0) -> Building:
    return Building(Aabb(vec3(x0, y0, z0), vec3(x1, y1, z0 + h)))


def random_small_scene(rng: random.Random, max_boxes: int = 3) -> Scene:
    """Generic-position scene with a few boxes for oracle comparisons."""
    boxes: list[Building] = []
    target = rng.randint(1, max_boxes)
    while len(boxes) < target:
        w = rng.uniform(5.0, 50.0)
        d = rng.uniform(5.0, 50.0)
        h = rng.uniform(5.0, 80.0)
        x0 = rng.uniform(-150.0, 120.0)
        y0 = rng.uniform(-150.0, 120.0)
        candidate = make_box(x0, y0, x0 + w, y0 + d, h)
        if any(candidate.box.overlaps(b.box, gap=1.0) for b in boxes):
            continue
        boxes.append(candidate)
    return Scene(buildings=tuple(boxes))


def random_terminals(rng: random.Random, scene: Scene):
    """tx/rx strictly above ground and outside every building."""
    out = []
    while len(out) < 2:
        p = vec3(rng.uniform(-180.0, 180.0), rng.uniform(-180.0, 180.0), rng.uniform(1.0, 60.0))
        if any(b.box.contains(p, eps=1.0) for b in scene.buildings):
            continue
        out.append(p)
    return out[0], out[1]
