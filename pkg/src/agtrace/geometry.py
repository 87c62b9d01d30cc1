"""Axis-aligned scene geometry: vectors, boxes, planes, occlusion queries.

All coordinates are metric. The reflecting surface (ground or sea top) is a
horizontal plane; buildings are axis-aligned boxes resting on it. Every
reflector in a scene is therefore an axis-aligned rectangle, which keeps the
image method exact and lets occlusion tests run vectorized over one flat
face table.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from numpy.typing import NDArray

Vec3 = NDArray[np.float64]

# Slack for point-on-plane / strict-interior tests. Double precision leaves
# roughly nanometre noise at kilometre scale.
GEOM_EPS = 1e-9

SURFACE_ID = "surface"


def vec3(x: float, y: float, z: float) -> Vec3:
    """Build a finite 3-vector (meters)."""
    v = np.array([x, y, z], dtype=np.float64)
    if not np.all(np.isfinite(v)):
        raise ValueError(f"non-finite vector components: {v!r}")
    return v


@dataclass(frozen=True, eq=False)
class Aabb:
    """Axis-aligned box spanning [min_corner, max_corner] componentwise."""

    min_corner: Vec3
    max_corner: Vec3

    def __post_init__(self) -> None:
        lo = np.asarray(self.min_corner, dtype=np.float64)
        hi = np.asarray(self.max_corner, dtype=np.float64)
        object.__setattr__(self, "min_corner", lo)
        object.__setattr__(self, "max_corner", hi)
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise ValueError("non-finite box corner")
        if np.any(lo > hi):
            raise ValueError(f"min_corner must be <= max_corner, got {lo} > {hi}")

    def overlaps(self, other: "Aabb", gap: float = 0.0) -> bool:
        """True if the boxes' interiors come closer than `gap` on every axis."""
        return bool(
            np.all(self.min_corner < other.max_corner + gap)
            and np.all(other.min_corner < self.max_corner + gap)
        )

    def contains(self, p: Vec3, eps: float = GEOM_EPS) -> bool:
        return bool(np.all(p >= self.min_corner - eps) and np.all(p <= self.max_corner + eps))


@dataclass(frozen=True)
class Plane:
    """Horizontal plane z = anchor_z with fixed +z unit normal."""

    anchor_z: float = 0.0

    @property
    def normal(self) -> Vec3:
        return np.array([0.0, 0.0, 1.0])


@dataclass(frozen=True, eq=False)
class Face:
    """One axis-aligned rectangular reflector.

    `axis` is the constant coordinate, `coord` its value and `normal_sign`
    the outward direction along that axis. `u_axis`/`v_axis` span the
    rectangle with bounds [u_lo, u_hi] x [v_lo, v_hi].
    """

    surface_id: str
    axis: int
    coord: float
    normal_sign: int
    u_axis: int
    v_axis: int
    u_lo: float
    u_hi: float
    v_lo: float
    v_hi: float
    box_index: int = -1

    @property
    def normal(self) -> Vec3:
        n = np.zeros(3)
        n[self.axis] = float(self.normal_sign)
        return n


@dataclass(frozen=True, eq=False)
class Building:
    box: Aabb
    material: str = "concrete"


_FACE_TAGS = (("-x", 0, -1), ("+x", 0, +1), ("-y", 1, -1), ("+y", 1, +1), ("-z", 2, -1), ("+z", 2, +1))


def box_faces(box: Aabb, index: int) -> list[Face]:
    """The six outward faces of a building box, ids `b<index>:<±axis>`."""
    faces = []
    for tag, axis, sign in _FACE_TAGS:
        u_axis, v_axis = [a for a in (0, 1, 2) if a != axis]
        coord = box.max_corner[axis] if sign > 0 else box.min_corner[axis]
        faces.append(
            Face(
                surface_id=f"b{index}:{tag}",
                axis=axis,
                coord=float(coord),
                normal_sign=sign,
                u_axis=u_axis,
                v_axis=v_axis,
                u_lo=float(box.min_corner[u_axis]),
                u_hi=float(box.max_corner[u_axis]),
                v_lo=float(box.min_corner[v_axis]),
                v_hi=float(box.max_corner[v_axis]),
                box_index=index,
            )
        )
    return faces


class FaceTable:
    """Structure-of-arrays view of all reflectors in a scene.

    Row 0..n-1 are building faces, the last row is the reflecting surface
    clipped to the terrain extent. Used by vectorized occlusion and the
    image-method tracer.
    """

    def __init__(self, faces: list[Face]):
        self.faces = faces
        n = len(faces)
        self.axis = np.array([f.axis for f in faces], dtype=np.intp)
        self.coord = np.array([f.coord for f in faces])
        self.sign = np.array([f.normal_sign for f in faces], dtype=np.float64)
        self.u_axis = np.array([f.u_axis for f in faces], dtype=np.intp)
        self.v_axis = np.array([f.v_axis for f in faces], dtype=np.intp)
        self.u_lo = np.array([f.u_lo for f in faces])
        self.u_hi = np.array([f.u_hi for f in faces])
        self.v_lo = np.array([f.v_lo for f in faces])
        self.v_hi = np.array([f.v_hi for f in faces])
        self.ids = [f.surface_id for f in faces]
        self.index_of = {f.surface_id: i for i, f in enumerate(faces)}
        self.n = n

    def outward_side(self, p: Vec3) -> NDArray[np.float64]:
        """Signed distance of `p` from each face plane, positive outward."""
        return self.sign * (p[self.axis] - self.coord)


@dataclass(frozen=True, eq=False)
class Scene:
    """Immutable propagation scene: terrain, reflecting surface, buildings.

    The terrain is centered on the origin: x,y within ±extent/2. Buildings
    must rest on the reflecting surface, stay inside the terrain, and be
    pairwise disjoint. All queries are read-only and safe to share across
    workers.
    """

    terrain_extent: tuple[float, float] = (10_000.0, 10_000.0)
    reflecting_surface: Plane = field(default_factory=Plane)
    surface_material: str = "wet_earth"
    buildings: tuple[Building, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "buildings", tuple(self.buildings))
        ex, ey = self.terrain_extent
        if ex <= 0 or ey <= 0:
            raise ValueError("terrain extent must be positive")
        z0 = self.reflecting_surface.anchor_z
        for i, b in enumerate(self.buildings):
            lo, hi = b.box.min_corner, b.box.max_corner
            if abs(lo[2] - z0) > GEOM_EPS:
                raise ValueError(f"building {i} does not rest on the reflecting surface")
            if lo[0] < -ex / 2 - GEOM_EPS or hi[0] > ex / 2 + GEOM_EPS or lo[1] < -ey / 2 - GEOM_EPS or hi[1] > ey / 2 + GEOM_EPS:
                raise ValueError(f"building {i} footprint outside terrain bounds")
            for j in range(i + 1, len(self.buildings)):
                if b.box.overlaps(self.buildings[j].box):
                    raise ValueError(f"buildings {i} and {j} overlap")

    @cached_property
    def face_table(self) -> FaceTable:
        faces: list[Face] = []
        for i, b in enumerate(self.buildings):
            faces.extend(box_faces(b.box, i))
        ex, ey = self.terrain_extent
        faces.append(
            Face(
                surface_id=SURFACE_ID,
                axis=2,
                coord=self.reflecting_surface.anchor_z,
                normal_sign=+1,
                u_axis=0,
                v_axis=1,
                u_lo=-ex / 2,
                u_hi=ex / 2,
                v_lo=-ey / 2,
                v_hi=ey / 2,
            )
        )
        return FaceTable(faces)

    def material_of(self, surface_id: str) -> str:
        if surface_id == SURFACE_ID:
            return self.surface_material
        return self.buildings[self.face_table.faces[self.face_table.index_of[surface_id]].box_index].material


def mirror_point(p: Vec3, surface: Plane | Face) -> Vec3:
    """Reflect a point across an axis-aligned plane. Involution by construction."""
    q = np.array(p, dtype=np.float64)
    if isinstance(surface, Plane):
        q[2] = 2.0 * surface.anchor_z - q[2]
    else:
        q[surface.axis] = 2.0 * surface.coord - q[surface.axis]
    return q


def ray_aabb_intersect(origin: Vec3, direction: Vec3, box: Aabb) -> tuple[float, float] | None:
    """Slab-method ray/box test for a unit-direction ray.

    Returns the (t_near, t_far) parameter interval when the ray meets the
    box with t_far > 0 (origin inside gives t_near < 0), else None.
    """
    norm = float(np.linalg.norm(direction))
    assert abs(norm - 1.0) < 1e-9, "direction must be unit length"
    t_near, t_far = -np.inf, np.inf
    for k in range(3):
        d = direction[k]
        if d == 0.0:
            if origin[k] < box.min_corner[k] or origin[k] > box.max_corner[k]:
                return None
            continue
        t1 = (box.min_corner[k] - origin[k]) / d
        t2 = (box.max_corner[k] - origin[k]) / d
        if t1 > t2:
            t1, t2 = t2, t1
        t_near = max(t_near, t1)
        t_far = min(t_far, t2)
        if t_near > t_far:
            return None
    if t_far <= 0.0:
        return None
    return float(t_near), float(t_far)


def segment_occluded(a: Vec3, b: Vec3, scene: Scene, ignore_surfaces: frozenset[str] | set[str] = frozenset()) -> bool:
    """True iff the open segment (a, b) crosses a face strictly.

    A crossing counts only when the hit point is strictly inside the face
    rectangle and strictly between the endpoints (GEOM_EPS margins), so a
    segment that merely touches a face, slides along it, or starts/ends on
    it — as reflection legs do by construction — does not occlude.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    d = b - a
    seg_len = float(np.linalg.norm(d))
    if seg_len <= GEOM_EPS:
        raise ValueError("degenerate segment")
    ft = scene.face_table
    a_k = a[ft.axis]
    d_k = d[ft.axis]
    with np.errstate(divide="ignore", invalid="ignore"):
        t = (ft.coord - a_k) / d_k
    t_eps = GEOM_EPS / seg_len
    hit = np.isfinite(t) & (t > t_eps) & (t < 1.0 - t_eps)
    if not np.any(hit):
        return False
    idx = np.nonzero(hit)[0]
    p = a[None, :] + t[idx, None] * d[None, :]
    pu = p[np.arange(len(idx)), ft.u_axis[idx]]
    pv = p[np.arange(len(idx)), ft.v_axis[idx]]
    inside = (
        (pu > ft.u_lo[idx] + GEOM_EPS)
        & (pu < ft.u_hi[idx] - GEOM_EPS)
        & (pv > ft.v_lo[idx] + GEOM_EPS)
        & (pv < ft.v_hi[idx] - GEOM_EPS)
    )
    if not np.any(inside):
        return False
    if not ignore_surfaces:
        return True
    for row in idx[inside]:
        if ft.ids[row] not in ignore_surfaces:
            return True
    return False
