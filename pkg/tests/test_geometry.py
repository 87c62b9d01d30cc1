from __future__ import annotations

import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from agtrace import Aabb, Building, Plane, Scene, mirror_point, ray_aabb_intersect, segment_occluded, vec3
from agtrace.geometry import Face, box_faces

from .conftest import make_box, random_small_scene, random_terminals
from .oracles import quad_ray_box


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


class TestRayAabb:
    def test_axis_slab_case(self):
        box = Aabb(vec3(2, -1, -1), vec3(4, 1, 1))
        hit = ray_aabb_intersect(vec3(0, 0, 0), vec3(1, 0, 0), box)
        assert hit == (2.0, 4.0)

    def test_miss(self):
        box = Aabb(vec3(2, 2, 2), vec3(3, 3, 3))
        assert ray_aabb_intersect(vec3(0, 0, 0), vec3(0, 0, 1), box) is None

    def test_origin_inside(self):
        box = Aabb(vec3(-1, -1, -1), vec3(1, 1, 1))
        rng = random.Random(3)
        for _ in range(20):
            d = unit([rng.gauss(0, 1) for _ in range(3)])
            t_near, t_far = ray_aabb_intersect(vec3(0, 0, 0), d, box)
            assert t_near < 0.0 < t_far

    def test_behind_origin(self):
        box = Aabb(vec3(-4, -1, -1), vec3(-2, 1, 1))
        assert ray_aabb_intersect(vec3(0, 0, 0), vec3(1, 0, 0), box) is None

    def test_non_unit_direction_asserts(self):
        box = Aabb(vec3(0, 0, 0), vec3(1, 1, 1))
        with pytest.raises(AssertionError):
            ray_aabb_intersect(vec3(-1, 0.5, 0.5), vec3(2, 0, 0), box)

    def test_agrees_with_quad_oracle(self):
        rng = random.Random(12345)
        for _ in range(10_000):
            lo = np.array([rng.uniform(-10, 10) for _ in range(3)])
            hi = lo + np.array([rng.uniform(0.5, 8) for _ in range(3)])
            box = Aabb(lo, hi)
            origin = np.array([rng.uniform(-25, 25) for _ in range(3)])
            d = unit([rng.gauss(0, 1) for _ in range(3)])
            got = ray_aabb_intersect(origin, d, box)
            want = quad_ray_box(origin, d, box)
            if want is None:
                assert got is None
            else:
                assert got is not None
                assert got[0] == pytest.approx(want[0], rel=1e-9, abs=1e-9)
                assert got[1] == pytest.approx(want[1], rel=1e-9, abs=1e-9)


class TestMirrorPoint:
    def test_across_ground(self):
        assert np.allclose(mirror_point(vec3(0, 0, 5), Plane(0.0)), [0, 0, -5])

    def test_fixed_point_on_plane(self):
        p = vec3(3, -2, 10)
        assert np.allclose(mirror_point(p, Plane(10.0)), p)

    def test_offset_plane(self):
        assert np.allclose(mirror_point(vec3(1, 2, 3), Plane(10.0)), [1, 2, 17])

    @given(
        st.floats(-1e4, 1e4),
        st.floats(-1e4, 1e4),
        st.floats(-1e4, 1e4),
        st.floats(-1e3, 1e3),
        st.sampled_from([0, 1, 2]),
        st.integers(-1, 1).filter(lambda s: s != 0),
    )
    def test_involution(self, x, y, z, coord, axis, sign):
        p = vec3(x, y, z)
        face = Face("f", axis, coord, sign, *(a for a in (0, 1, 2) if a != axis), 0.0, 1.0, 0.0, 1.0)
        assert np.allclose(mirror_point(mirror_point(p, face), face), p, atol=1e-9)
        plane = Plane(coord)
        assert np.allclose(mirror_point(mirror_point(p, plane), plane), p, atol=1e-9)


class TestSegmentOccluded:
    def test_empty_scene(self, ground_scene):
        assert not segment_occluded(vec3(0, 0, 2), vec3(100, 5, 30), ground_scene)

    def test_through_box_interior(self):
        scene = Scene(buildings=(make_box(10, -5, 20, 5, 30),))
        assert segment_occluded(vec3(0, 0, 2), vec3(40, 0, 2), scene)

    def test_grazing_along_face_is_clear(self):
        # segment lying exactly in the x = 10 wall plane
        scene = Scene(buildings=(make_box(10, -5, 20, 5, 30),))
        assert not segment_occluded(vec3(10, -20, 2), vec3(10, 20, 2), scene)

    def test_endpoint_on_face_is_clear(self):
        scene = Scene(buildings=(make_box(10, -5, 20, 5, 30),))
        # leg ending exactly on the wall, approaching from outside
        assert not segment_occluded(vec3(0, 0, 2), vec3(10, 0, 2), scene)

    def test_surface_crossing(self, ground_scene):
        assert segment_occluded(vec3(0, 0, 2), vec3(10, 0, -2), ground_scene)
        assert not segment_occluded(vec3(0, 0, 2), vec3(10, 0, -2), ground_scene, {"surface"})

    def test_symmetry(self):
        rng = random.Random(77)
        for _ in range(200):
            scene = random_small_scene(rng)
            a, b = random_terminals(rng, scene)
            assert segment_occluded(a, b, scene) == segment_occluded(b, a, scene)


class TestScene:
    def test_rejects_overlapping_buildings(self):
        with pytest.raises(ValueError, match="overlap"):
            Scene(buildings=(make_box(0, 0, 10, 10, 5), make_box(5, 5, 15, 15, 5)))

    def test_rejects_floating_building(self):
        b = Building(Aabb(vec3(0, 0, 3), vec3(5, 5, 10)))
        with pytest.raises(ValueError, match="rest"):
            Scene(buildings=(b,))

    def test_rejects_out_of_terrain(self):
        with pytest.raises(ValueError, match="terrain"):
            Scene(terrain_extent=(100.0, 100.0), buildings=(make_box(40, 40, 60, 60, 5),))

    def test_face_table_counts(self):
        scene = Scene(buildings=(make_box(0, 0, 10, 10, 5), make_box(20, 20, 30, 30, 5)))
        assert scene.face_table.n == 13  # 6 per box + reflecting surface
        assert scene.material_of("surface") == "wet_earth"
        assert scene.material_of("b0:+x") == "concrete"

    def test_box_face_geometry(self):
        box = Aabb(vec3(1, 2, 0), vec3(3, 5, 7))
        faces = {f.surface_id: f for f in box_faces(box, 0)}
        assert faces["b0:+x"].coord == 3 and faces["b0:+x"].axis == 0 and faces["b0:+x"].normal_sign == 1
        assert faces["b0:-y"].coord == 2 and faces["b0:-y"].normal[1] == -1

    def test_aabb_validation(self):
        with pytest.raises(ValueError):
            Aabb(vec3(1, 0, 0), vec3(0, 1, 1))
        with pytest.raises(ValueError):
            vec3(float("nan"), 0, 0)
