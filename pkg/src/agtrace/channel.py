"""Convert geometric paths into multipath components.

Each resolved path contributes one MPC with power, phase, time of arrival
and departure/arrival directions. Angle conventions: elevation is the local
zenith angle (0 deg straight up, 90 deg horizontal, 180 deg straight down);
azimuth is counterclockwise from +x in [0, 360). Arrival angles describe
the direction the ray comes from, seen at the receiver.

Power budget for a path of unfolded length L with bounces i:

    P[dBm] = P_tx + 20 log10( (lambda / 4 pi L) * prod |Gamma_i| )
             + 10 log10(g_tx * g_rx) + G_tx + G_rx

with g the normalized dipole pattern values and G the peak gains in dBi.
The phase accumulates 2 pi f L / c plus each reflection coefficient's
argument, wrapped to [0, 2 pi).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .antenna import DipolePattern
from .geometry import SURFACE_ID, Scene, Vec3
from .materials import (
    PARALLEL,
    PERPENDICULAR,
    SPEED_OF_LIGHT,
    CarrierSpec,
    Material,
    DEFAULT_MATERIALS,
    fresnel_reflection,
    free_space_gain,
    grazing_angle,
)
from .raytracer import PropagationPath


class Persistence(str, Enum):
    LOS = "LOS"
    GRC = "GRC"
    NON_PERSISTENT = "NonPersistent"

    def __str__(self) -> str:  # pragma: no cover - cosmetic
        return self.value


@dataclass(frozen=True)
class Mpc:
    """One resolved multipath component."""

    power_dbm: float
    amplitude: float
    phase: float
    toa: float
    dod_az: float
    dod_el: float
    doa_az: float
    doa_el: float
    bounce_count: int
    persistence: Persistence


@dataclass(frozen=True)
class LinkBudget:
    tx_power_dbm: float = 30.0
    sensitivity_dbm: float = -110.0
    carrier: CarrierSpec = field(default_factory=CarrierSpec)

    def __post_init__(self) -> None:
        if self.tx_power_dbm <= self.sensitivity_dbm:
            raise ValueError("tx power must exceed receiver sensitivity")


@dataclass(frozen=True, eq=False)
class Snapshot:
    """All retained MPCs at one trajectory point, sorted by arrival time."""

    index: int
    time: float
    rx_pos: Vec3
    mpcs: tuple[Mpc, ...]

    def __post_init__(self) -> None:
        for cls in (Persistence.LOS, Persistence.GRC):
            if sum(m.persistence is cls for m in self.mpcs) > 1:
                raise ValueError(f"snapshot holds more than one {cls.value} component")


AntennaPair = tuple[DipolePattern, DipolePattern]

DEFAULT_ANTENNAS: AntennaPair = (DipolePattern(), DipolePattern())


def _az_el_deg(direction: Vec3) -> tuple[float, float]:
    az = math.degrees(math.atan2(direction[1], direction[0])) % 360.0
    el = math.degrees(math.acos(max(-1.0, min(1.0, float(direction[2])))))
    return az, el


def classify_persistence(path: PropagationPath) -> Persistence:
    """LOS for the direct path, GRC for the single surface bounce, rest non-persistent."""
    if not path.surfaces:
        return Persistence.LOS
    if path.surfaces == (SURFACE_ID,):
        return Persistence.GRC
    return Persistence.NON_PERSISTENT


def _reflection_product(path: PropagationPath, scene: Scene, materials: dict[str, Material]) -> tuple[float, float]:
    """(product of |Gamma|, sum of arg Gamma) over the path's bounces."""
    modulus = 1.0
    arg_sum = 0.0
    ft = scene.face_table
    for m, sid in enumerate(path.surfaces):
        face = ft.faces[ft.index_of[sid]]
        seg = path.vertices[m + 1] - path.vertices[m]
        d = seg / np.linalg.norm(seg)
        sin_grazing = abs(float(d[face.axis]))
        psi = math.asin(max(-1.0, min(1.0, sin_grazing)))
        # vertical polarization: in the incidence plane for horizontal
        # reflectors, normal to it for vertical wall faces
        pol = PARALLEL if face.axis == 2 else PERPENDICULAR
        gamma = fresnel_reflection(psi, materials[scene.material_of(sid)], pol)
        modulus *= abs(gamma)
        arg_sum += cmath.phase(gamma)
    return modulus, arg_sum


def synthesize_mpc(
    path: PropagationPath,
    budget: LinkBudget,
    scene: Scene,
    antennas: AntennaPair = DEFAULT_ANTENNAS,
    materials: dict[str, Material] | None = None,
) -> Mpc:
    """Amplitude, phase, TOA and angles for one traced path."""
    materials = materials if materials is not None else DEFAULT_MATERIALS
    length = path.total_length
    carrier = budget.carrier
    dep = path.departure_direction
    arr = path.arrival_direction
    dod_az, dod_el = _az_el_deg(dep)
    doa_az, doa_el = _az_el_deg(arr)

    gamma_mod, gamma_arg = _reflection_product(path, scene, materials)
    g_pattern = antennas[0].gain(math.radians(dod_el)) * antennas[1].gain(math.radians(doa_el))
    linear = free_space_gain(length, carrier) * gamma_mod**2 * g_pattern
    if linear > 0.0:
        power_dbm = budget.tx_power_dbm + 10.0 * math.log10(linear) + antennas[0].peak_gain_dbi + antennas[1].peak_gain_dbi
    else:
        power_dbm = -math.inf
    phase = (2.0 * math.pi * carrier.frequency * length / SPEED_OF_LIGHT + gamma_arg) % (2.0 * math.pi)
    return Mpc(
        power_dbm=power_dbm,
        amplitude=10.0 ** (power_dbm / 20.0) if math.isfinite(power_dbm) else 0.0,
        phase=phase,
        toa=length / SPEED_OF_LIGHT,
        dod_az=dod_az,
        dod_el=dod_el,
        doa_az=doa_az,
        doa_el=doa_el,
        bounce_count=path.bounce_count,
        persistence=classify_persistence(path),
    )


def apply_sensitivity(mpcs: list[Mpc], budget: LinkBudget) -> list[Mpc]:
    """Keep MPCs at or above the sensitivity threshold (inclusive), order preserved."""
    return [m for m in mpcs if m.power_dbm >= budget.sensitivity_dbm]


def snapshot_from_paths(
    paths: list[PropagationPath],
    budget: LinkBudget,
    scene: Scene,
    antennas: AntennaPair = DEFAULT_ANTENNAS,
    index: int = 0,
    time: float = 0.0,
    rx_pos: Vec3 | None = None,
    materials: dict[str, Material] | None = None,
) -> Snapshot:
    """Synthesize, filter by sensitivity, and sort by arrival time."""
    if rx_pos is None:
        rx_pos = paths[0].vertices[-1] if paths else np.zeros(3)
    mpcs = [synthesize_mpc(p, budget, scene, antennas, materials) for p in paths]
    mpcs = apply_sensitivity(mpcs, budget)
    mpcs.sort(key=lambda m: m.toa)
    return Snapshot(index=index, time=time, rx_pos=np.asarray(rx_pos, dtype=np.float64), mpcs=tuple(mpcs))


def two_ray_oracle(
    h_t: float,
    h_r: float,
    D: float,
    budget: LinkBudget,
    material: Material | None = None,
    antennas: AntennaPair = DEFAULT_ANTENNAS,
) -> tuple[Mpc, Mpc]:
    """Closed-form LOS and surface-bounce components, no ray tracing.

    Geometry is the canonical flat-surface link: tx above the origin, rx at
    horizontal distance D along +x, heights measured from the surface. Used
    as the independent reference for the traced pipeline.
    """
    if h_t <= 0 or h_r <= 0 or D <= 0:
        raise ValueError("heights and horizontal distance must be positive")
    material = material if material is not None else DEFAULT_MATERIALS["wet_earth"]
    carrier = budget.carrier
    peak = antennas[0].peak_gain_dbi + antennas[1].peak_gain_dbi

    d_los = math.hypot(D, h_r - h_t)
    zen_dep = math.acos((h_r - h_t) / d_los)
    g_los = antennas[0].gain(zen_dep) * antennas[1].gain(math.pi - zen_dep)
    lin_los = free_space_gain(d_los, carrier) * g_los
    p_los = budget.tx_power_dbm + 10.0 * math.log10(lin_los) + peak if lin_los > 0 else -math.inf
    los = Mpc(
        power_dbm=p_los,
        amplitude=10.0 ** (p_los / 20.0) if math.isfinite(p_los) else 0.0,
        phase=(2.0 * math.pi * carrier.frequency * d_los / SPEED_OF_LIGHT) % (2.0 * math.pi),
        toa=d_los / SPEED_OF_LIGHT,
        dod_az=0.0,
        dod_el=math.degrees(zen_dep),
        doa_az=180.0,
        doa_el=180.0 - math.degrees(zen_dep),
        bounce_count=0,
        persistence=Persistence.LOS,
    )

    d_grc = math.hypot(D, h_t + h_r)
    psi = grazing_angle(h_t, h_r, D)
    gamma = fresnel_reflection(psi, material, PARALLEL)
    zen_grc = 0.5 * math.pi + psi
    g_grc = antennas[0].gain(zen_grc) * antennas[1].gain(math.pi - zen_grc)
    lin_grc = free_space_gain(d_grc, carrier) * g_grc * abs(gamma) ** 2
    p_grc = budget.tx_power_dbm + 10.0 * math.log10(lin_grc) + peak if lin_grc > 0 else -math.inf
    grc = Mpc(
        power_dbm=p_grc,
        amplitude=10.0 ** (p_grc / 20.0) if math.isfinite(p_grc) else 0.0,
        phase=(2.0 * math.pi * carrier.frequency * d_grc / SPEED_OF_LIGHT + cmath.phase(gamma)) % (2.0 * math.pi),
        toa=d_grc / SPEED_OF_LIGHT,
        dod_az=0.0,
        dod_el=math.degrees(zen_grc),
        doa_az=180.0,
        doa_el=90.0 + math.degrees(psi),
        bounce_count=1,
        persistence=Persistence.GRC,
    )
    return los, grc
