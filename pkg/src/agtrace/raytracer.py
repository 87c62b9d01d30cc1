"""Specular path enumeration via the image method.

Paths are built by mirroring the transmitter across an ordered sequence of
reflectors, intersecting the unfolded straight line back from the receiver,
and validating that every bounce lands on its rectangle, leaves on the
outward side, and that every leg is unobstructed. Candidate sequences are
screened and unfolded vectorized over the scene's face table; only the few
survivors pay for per-segment occlusion tests.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .geometry import GEOM_EPS, SURFACE_ID, FaceTable, Scene, Vec3, mirror_point, segment_occluded

# strictness of the unfolded crossing parameter t in (0, 1)
T_EPS = 1e-12

MAX_ORDER = 3


@dataclass(frozen=True, eq=False)
class PropagationPath:
    """One specular path: vertices from tx to rx, one surface id per bounce."""

    vertices: tuple[Vec3, ...]
    surfaces: tuple[str, ...]
    total_length: float

    @property
    def bounce_count(self) -> int:
        return len(self.surfaces)

    @property
    def departure_direction(self) -> Vec3:
        d = self.vertices[1] - self.vertices[0]
        return d / np.linalg.norm(d)

    @property
    def arrival_direction(self) -> Vec3:
        """Unit vector at the receiver pointing back along the last leg."""
        d = self.vertices[-2] - self.vertices[-1]
        return d / np.linalg.norm(d)


def _make_path(vertices: list[Vec3], surfaces: tuple[str, ...]) -> PropagationPath:
    length = float(sum(np.linalg.norm(b - a) for a, b in itertools.pairwise(vertices)))
    return PropagationPath(tuple(np.asarray(v, dtype=np.float64) for v in vertices), surfaces, length)


@dataclass(frozen=True)
class TraceConfig:
    max_reflection_order: int = 2
    include_ground_bounce: bool = True

    def __post_init__(self) -> None:
        if not 0 <= self.max_reflection_order <= MAX_ORDER:
            raise ValueError(f"max_reflection_order must be in [0, {MAX_ORDER}]")


def trace_los(scene: Scene, tx: Vec3, rx: Vec3) -> PropagationPath | None:
    """Direct segment, or None when a building blocks it."""
    tx = np.asarray(tx, dtype=np.float64)
    rx = np.asarray(rx, dtype=np.float64)
    if np.array_equal(tx, rx):
        raise ValueError("tx and rx coincide")
    if segment_occluded(tx, rx, scene):
        return None
    return _make_path([tx, rx], ())


def trace_surface_bounce(scene: Scene, tx: Vec3, rx: Vec3) -> PropagationPath | None:
    """Single specular bounce off the reflecting surface (ground or sea top)."""
    tx = np.asarray(tx, dtype=np.float64)
    rx = np.asarray(rx, dtype=np.float64)
    z0 = scene.reflecting_surface.anchor_z
    if tx[2] <= z0 + GEOM_EPS or rx[2] <= z0 + GEOM_EPS:
        raise ValueError("terminals must be strictly above the reflecting surface")
    image = mirror_point(tx, scene.reflecting_surface)
    t = (z0 - image[2]) / (rx[2] - image[2])
    point = image + t * (rx - image)
    ex, ey = scene.terrain_extent
    if not (-ex / 2 <= point[0] <= ex / 2 and -ey / 2 <= point[1] <= ey / 2):
        return None
    if segment_occluded(tx, point, scene, {SURFACE_ID}) or segment_occluded(point, rx, scene, {SURFACE_ID}):
        return None
    return _make_path([tx, point, rx], (SURFACE_ID,))


def _unfold_sequences(ft: FaceTable, seq: np.ndarray, tx: Vec3, rx: Vec3) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized image-method unfold for candidate sequences.

    seq is (M, n) of face-table rows. Returns (valid mask, bounce points
    (M, n, 3)); invalid rows may hold NaN points.
    """
    M, n = seq.shape
    rows = np.arange(M)
    images = [np.broadcast_to(tx, (M, 3)).copy()]
    for m in range(n):
        k = ft.axis[seq[:, m]]
        c = ft.coord[seq[:, m]]
        nxt = images[-1].copy()
        nxt[rows, k] = 2.0 * c - nxt[rows, k]
        images.append(nxt)

    valid = np.ones(M, dtype=bool)
    q = np.broadcast_to(rx, (M, 3)).copy()
    pts = np.empty((M, n, 3))
    for m in range(n - 1, -1, -1):
        sel = seq[:, m]
        k = ft.axis[sel]
        c = ft.coord[sel]
        s = ft.sign[sel]
        img = images[m + 1]
        a_k = img[rows, k]
        b_k = q[rows, k]
        with np.errstate(divide="ignore", invalid="ignore"):
            t = (c - a_k) / (b_k - a_k)
            valid &= np.isfinite(t) & (t > T_EPS) & (t < 1.0 - T_EPS)
            # the next path point must sit strictly on the reflecting side
            valid &= s * (b_k - c) > GEOM_EPS
            p = img + t[:, None] * (q - img)
            pu = p[rows, ft.u_axis[sel]]
            pv = p[rows, ft.v_axis[sel]]
            valid &= (pu >= ft.u_lo[sel] - GEOM_EPS) & (pu <= ft.u_hi[sel] + GEOM_EPS)
            valid &= (pv >= ft.v_lo[sel] - GEOM_EPS) & (pv <= ft.v_hi[sel] + GEOM_EPS)
        pts[:, m, :] = p
        q = p
    return valid, pts


def _paths_from_survivors(scene: Scene, seq: np.ndarray, pts: np.ndarray, valid: np.ndarray, tx: Vec3, rx: Vec3) -> list[PropagationPath]:
    ft = scene.face_table
    paths = []
    for row in np.nonzero(valid)[0]:
        vertices = [tx, *pts[row], rx]
        if any(segment_occluded(a, b, scene) for a, b in itertools.pairwise(vertices)):
            continue
        surfaces = tuple(ft.ids[i] for i in seq[row])
        paths.append(_make_path(vertices, surfaces))
    return paths


def trace_building_paths(scene: Scene, tx: Vec3, rx: Vec3, cfg: TraceConfig) -> list[PropagationPath]:
    """All valid specular paths with 1..max order bounces touching a building.

    Mixed face/surface sequences are included when the ground bounce is
    enabled; the pure surface bounce itself is owned by
    trace_surface_bounce. Each surface sequence appears at most once.
    """
    tx = np.asarray(tx, dtype=np.float64)
    rx = np.asarray(rx, dtype=np.float64)
    ft = scene.face_table
    if cfg.max_reflection_order < 1 or ft.n == 0 or not scene.buildings:
        return []
    surface_row = ft.index_of[SURFACE_ID]
    all_rows = np.arange(ft.n)
    if not cfg.include_ground_bounce:
        all_rows = all_rows[all_rows != surface_row]
    first_ok = all_rows[ft.outward_side(tx)[all_rows] > GEOM_EPS]
    last_ok = all_rows[ft.outward_side(rx)[all_rows] > GEOM_EPS]

    paths: list[PropagationPath] = []

    if len(first_ok) and len(last_ok):
        # order 1: single building-face bounces
        single = np.intersect1d(first_ok, last_ok)
        single = single[single != surface_row]
        if len(single):
            seq = single[:, None]
            valid, pts = _unfold_sequences(ft, seq, tx, rx)
            paths += _paths_from_survivors(scene, seq, pts, valid, tx, rx)

        if cfg.max_reflection_order >= 2:
            i, j = np.meshgrid(first_ok, last_ok, indexing="ij")
            seq = np.stack([i.ravel(), j.ravel()], axis=1)
            seq = seq[seq[:, 0] != seq[:, 1]]
            if len(seq):
                valid, pts = _unfold_sequences(ft, seq, tx, rx)
                paths += _paths_from_survivors(scene, seq, pts, valid, tx, rx)

        if cfg.max_reflection_order >= 3:
            # keep memory bounded: vectorize (first, last) pairs per middle row
            for mid in all_rows:
                fi = first_ok[first_ok != mid]
                la = last_ok[last_ok != mid]
                if not len(fi) or not len(la):
                    continue
                i, k = np.meshgrid(fi, la, indexing="ij")
                seq = np.stack([i.ravel(), np.full(i.size, mid, dtype=np.intp), k.ravel()], axis=1)
                valid, pts = _unfold_sequences(ft, seq, tx, rx)
                paths += _paths_from_survivors(scene, seq, pts, valid, tx, rx)

    return sorted(paths, key=lambda p: (p.total_length, p.surfaces))


def trace_all(scene: Scene, tx: Vec3, rx: Vec3, cfg: TraceConfig | None = None) -> list[PropagationPath]:
    """LOS + surface bounce + building paths, shortest first (LOS leads ties)."""
    cfg = cfg or TraceConfig()
    tx = np.asarray(tx, dtype=np.float64)
    rx = np.asarray(rx, dtype=np.float64)
    paths = []
    los = trace_los(scene, tx, rx)
    if los is not None:
        paths.append(los)
    if cfg.include_ground_bounce:
        grc = trace_surface_bounce(scene, tx, rx)
        if grc is not None:
            paths.append(grc)
    paths += trace_building_paths(scene, tx, rx, cfg)
    return sorted(paths, key=lambda p: (p.total_length, p.bounce_count, p.surfaces))
