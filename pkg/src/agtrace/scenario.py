"""Seeded environment generation and the UAV trajectory.

Four canonical deployments, distinguished by building count and height
span. Buildings are placed uniformly inside a deployment region around the
link, with a clear corridor reserved under the trajectory so the direct
path can never be blocked. Identical seeds give bit-identical scenes.

    over_sea     no buildings, sea surface at z = 10 m
    rural        10 buildings,  4-8 m tall
    suburban     20 buildings,  4-30 m tall
    dense_urban  100 buildings, 70-180 m tall, 5 m minimum street gap
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, replace
from enum import Enum
from typing import NamedTuple

from .geometry import Aabb, Building, Plane, Scene, Vec3, vec3

SEA_SURFACE_Z = 10.0


class ScenarioKind(str, Enum):
    OVER_SEA = "over_sea"
    RURAL = "rural"
    SUBURBAN = "suburban"
    DENSE_URBAN = "dense_urban"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


# kind -> (building count, height range, footprint side range, street gap)
_DEPLOYMENT_DEFAULTS: dict[ScenarioKind, tuple[int, tuple[float, float], tuple[float, float], float]] = {
    ScenarioKind.OVER_SEA: (0, (0.0, 0.0), (0.0, 0.0), 0.0),
    ScenarioKind.RURAL: (10, (4.0, 8.0), (10.0, 25.0), 0.0),
    ScenarioKind.SUBURBAN: (20, (4.0, 30.0), (10.0, 25.0), 0.0),
    ScenarioKind.DENSE_URBAN: (100, (70.0, 180.0), (20.0, 50.0), 5.0),
}


@dataclass(frozen=True)
class ScenarioSpec:
    kind: ScenarioKind
    building_count: int
    height_range: tuple[float, float]
    footprint_range: tuple[float, float]
    seed: int = 1
    street_gap: float = 0.0
    terrain_extent: tuple[float, float] = (10_000.0, 10_000.0)
    # buildings go here; defaults bracket the 40..1240 m trajectory
    deployment_region: tuple[tuple[float, float], tuple[float, float]] = ((-200.0, 1440.0), (-520.0, 520.0))
    corridor_half_width: float = 5.0
    # street reserved under the flight line; None spans the deployment region
    corridor_x: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if self.building_count < 0:
            raise ValueError("building_count must be >= 0")
        if self.building_count and (self.height_range[0] <= 0 or self.height_range[0] > self.height_range[1]):
            raise ValueError("invalid building height range")
        if self.building_count and (self.footprint_range[0] <= 0 or self.footprint_range[0] > self.footprint_range[1]):
            raise ValueError("invalid footprint range")

    @classmethod
    def for_kind(cls, kind: ScenarioKind | str, seed: int = 1, **overrides) -> "ScenarioSpec":
        kind = ScenarioKind(kind)
        count, heights, footprint, gap = _DEPLOYMENT_DEFAULTS[kind]
        spec = cls(kind=kind, building_count=count, height_range=heights, footprint_range=footprint, seed=seed, street_gap=gap)
        return replace(spec, **overrides) if overrides else spec


_PLACEMENT_TRIES_PER_BUILDING = 400


def build_scene(spec: ScenarioSpec) -> Scene:
    """Generate the scene for a spec; same seed, same scene, bit for bit."""
    if spec.kind is ScenarioKind.OVER_SEA:
        surface = Plane(SEA_SURFACE_Z)
        surface_material = "sea_water"
    else:
        surface = Plane(0.0)
        surface_material = "wet_earth"
    z0 = surface.anchor_z

    rng = random.Random(spec.seed)
    (rx0, rx1), (ry0, ry1) = spec.deployment_region
    ex, ey = spec.terrain_extent
    rx0, rx1 = max(rx0, -ex / 2), min(rx1, ex / 2)
    ry0, ry1 = max(ry0, -ey / 2), min(ry1, ey / 2)
    cor_x0, cor_x1 = spec.corridor_x if spec.corridor_x is not None else (rx0 - 5.0, rx1 + 5.0)
    cor_hw = spec.corridor_half_width

    placed: list[Aabb] = []
    while len(placed) < spec.building_count:
        for attempt in range(_PLACEMENT_TRIES_PER_BUILDING + 1):
            if attempt == _PLACEMENT_TRIES_PER_BUILDING:
                raise RuntimeError(
                    f"could not place {spec.building_count} buildings in the deployment region "
                    f"(placed {len(placed)}); spec infeasible"
                )
            w = rng.uniform(*spec.footprint_range)
            d = rng.uniform(*spec.footprint_range)
            h = rng.uniform(*spec.height_range)
            if rx1 - rx0 < w or ry1 - ry0 < d:
                raise RuntimeError("deployment region smaller than a building footprint")
            cx = rng.uniform(rx0 + w / 2, rx1 - w / 2)
            cy = rng.uniform(ry0 + d / 2, ry1 - d / 2)
            x0, x1 = cx - w / 2, cx + w / 2
            y0, y1 = cy - d / 2, cy + d / 2
            # reserved corridor keeps the direct and surface-bounce legs clear
            if x1 > cor_x0 and x0 < cor_x1 and y1 > -cor_hw and y0 < cor_hw:
                continue
            box = Aabb(vec3(x0, y0, z0), vec3(x1, y1, z0 + h))
            if any(box.overlaps(other, gap=spec.street_gap) for other in placed):
                continue
            placed.append(box)
            break

    return Scene(
        terrain_extent=spec.terrain_extent,
        reflecting_surface=surface,
        surface_material=surface_material,
        buildings=tuple(Building(b, "concrete") for b in placed),
    )


@dataclass(frozen=True)
class TrajectorySpec:
    """Straight constant-height run, azimuth-aligned with the transmitter."""

    tx_height: float = 2.0
    rx_heights: tuple[float, ...] = (2.0, 50.0, 100.0, 150.0)
    start_offset: float = 40.0
    length: float = 1200.0
    speed: float = 15.0
    spacing: float = 10.0

    def __post_init__(self) -> None:
        if min(self.tx_height, self.start_offset, self.length, self.speed, self.spacing) <= 0:
            raise ValueError("trajectory parameters must be positive")
        if any(h <= 0 for h in self.rx_heights):
            raise ValueError("rx heights must be positive")


class TrajectoryPoint(NamedTuple):
    index: int
    time: float
    position: Vec3


def tx_position(spec: TrajectorySpec, surface_z: float = 0.0) -> Vec3:
    return vec3(0.0, 0.0, surface_z + spec.tx_height)


def sample_trajectory(spec: TrajectorySpec, height: float, surface_z: float = 0.0) -> list[TrajectoryPoint]:
    """Uniformly spaced receiver points along +x, starting at the offset."""
    if height <= 0:
        raise ValueError("rx height must be positive")
    n = int(math.floor(spec.length / spec.spacing + 1e-9)) + 1
    return [
        TrajectoryPoint(
            index=i,
            time=i * spec.spacing / spec.speed,
            position=vec3(spec.start_offset + i * spec.spacing, 0.0, surface_z + height),
        )
        for i in range(n)
    ]
