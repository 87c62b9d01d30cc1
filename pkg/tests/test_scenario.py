from __future__ import annotations

import pytest

from agtrace import ScenarioKind, ScenarioSpec, TrajectorySpec, build_scene, sample_trajectory, trace_los, tx_position
from agtrace.export import write_scene


class TestSpecDefaults:
    @pytest.mark.parametrize(
        "kind,count,heights",
        [
            (ScenarioKind.OVER_SEA, 0, None),
            (ScenarioKind.RURAL, 10, (4.0, 8.0)),
            (ScenarioKind.SUBURBAN, 20, (4.0, 30.0)),
            (ScenarioKind.DENSE_URBAN, 100, (70.0, 180.0)),
        ],
    )
    def test_deployment_table(self, kind, count, heights):
        spec = ScenarioSpec.for_kind(kind, seed=3)
        assert spec.building_count == count
        if heights:
            assert spec.height_range == heights

    def test_string_kind_accepted(self):
        assert ScenarioSpec.for_kind("rural").kind is ScenarioKind.RURAL

    def test_invalid_overrides(self):
        with pytest.raises(ValueError):
            ScenarioSpec.for_kind("rural", building_count=-1)
        with pytest.raises(ValueError):
            ScenarioSpec.for_kind("rural", height_range=(8.0, 4.0))


class TestBuildScene:
    def test_over_sea(self):
        scene = build_scene(ScenarioSpec.for_kind("over_sea", seed=1))
        assert scene.reflecting_surface.anchor_z == 10.0
        assert scene.surface_material == "sea_water"
        assert scene.buildings == ()

    def test_rural_counts_and_heights(self):
        scene = build_scene(ScenarioSpec.for_kind("rural", seed=4))
        assert len(scene.buildings) == 10
        for b in scene.buildings:
            h = b.box.max_corner[2] - b.box.min_corner[2]
            assert 4.0 <= h <= 8.0
            assert b.material == "concrete"

    def test_seeded_determinism(self, tmp_path):
        a = build_scene(ScenarioSpec.for_kind("dense_urban", seed=7))
        b = build_scene(ScenarioSpec.for_kind("dense_urban", seed=7))
        pa, pb = tmp_path / "a.txt", tmp_path / "b.txt"
        write_scene(a, pa)
        write_scene(b, pb)
        assert pa.read_bytes() == pb.read_bytes()

    def test_different_seed_differs(self, tmp_path):
        a = build_scene(ScenarioSpec.for_kind("dense_urban", seed=7))
        b = build_scene(ScenarioSpec.for_kind("dense_urban", seed=8))
        pa, pb = tmp_path / "a.txt", tmp_path / "b.txt"
        write_scene(a, pa)
        write_scene(b, pb)
        assert pa.read_bytes() != pb.read_bytes()

    def test_corridor_is_clear(self):
        spec = ScenarioSpec.for_kind("dense_urban", seed=2)
        scene = build_scene(spec)
        # default corridor spans the whole deployment region, so no wall can
        # straddle the flight line anywhere
        for b in scene.buildings:
            lo, hi = b.box.min_corner, b.box.max_corner
            assert hi[1] < -spec.corridor_half_width or lo[1] > spec.corridor_half_width

    def test_street_gap_dense_urban(self):
        scene = build_scene(ScenarioSpec.for_kind("dense_urban", seed=5))
        boxes = [b.box for b in scene.buildings]
        for i, a in enumerate(boxes):
            for b in boxes[i + 1 :]:
                gap_x = max(a.min_corner[0] - b.max_corner[0], b.min_corner[0] - a.max_corner[0])
                gap_y = max(a.min_corner[1] - b.max_corner[1], b.min_corner[1] - a.max_corner[1])
                assert max(gap_x, gap_y) >= 5.0 - 1e-9

    def test_los_clear_along_trajectory(self):
        scene = build_scene(ScenarioSpec.for_kind("dense_urban", seed=6))
        traj = TrajectorySpec(spacing=100.0)
        tx = tx_position(traj)
        for point in sample_trajectory(traj, 50.0):
            assert trace_los(scene, tx, point.position) is not None

    def test_infeasible_spec_errors(self):
        spec = ScenarioSpec.for_kind(
            "dense_urban",
            seed=1,
            building_count=500,
            deployment_region=((-100.0, 100.0), (-100.0, 100.0)),
        )
        with pytest.raises(RuntimeError, match="infeasible"):
            build_scene(spec)


class TestTrajectory:
    def test_default_sampling(self):
        points = sample_trajectory(TrajectorySpec(), 150.0)
        assert len(points) == 121
        assert points[0].position[0] == 40.0
        assert points[-1].position[0] == 1240.0
        assert points[-1].time == pytest.approx(80.0, rel=1e-12)

    def test_height_applied(self):
        points = sample_trajectory(TrajectorySpec(), 2.0)
        assert all(p.position[2] == 2.0 for p in points)

    def test_surface_offset(self):
        points = sample_trajectory(TrajectorySpec(), 150.0, surface_z=10.0)
        assert all(p.position[2] == 160.0 for p in points)
        assert tx_position(TrajectorySpec(), 10.0)[2] == 12.0

    def test_bad_height(self):
        with pytest.raises(ValueError):
            sample_trajectory(TrajectorySpec(), -5.0)

    def test_bad_spec(self):
        with pytest.raises(ValueError):
            TrajectorySpec(spacing=0.0)
