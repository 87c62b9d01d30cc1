"""Material table and electromagnetic primitives.

Reflectors are modeled as half-spaces of complex relative permittivity
eps = eps' - j*eps'' (time convention exp(+jwt), so passive materials have
eps'' >= 0). Reflection uses the standard Fresnel coefficients expressed in
terms of the grazing angle, the angle between the incident ray and the
surface.

Shipped permittivities at 28 GHz (ITU-R P.2040-style, overridable through a
material table file):

    concrete   5.31 - j0.48
    wet_earth  15.0 - j2.3
    sea_water  20.0 - j30.0
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from pathlib import Path

SPEED_OF_LIGHT = 299_792_458.0

PARALLEL = "parallel"
PERPENDICULAR = "perpendicular"


@dataclass(frozen=True)
class Material:
    """Half-space reflector: name plus complex relative permittivity parts."""

    name: str
    rel_permittivity_real: float
    rel_permittivity_imag: float

    def __post_init__(self) -> None:
        if self.rel_permittivity_real < 1.0:
            raise ValueError(f"{self.name}: relative permittivity real part must be >= 1")
        if self.rel_permittivity_imag < 0.0:
            raise ValueError(f"{self.name}: passive material needs non-negative imaginary part")

    @property
    def permittivity(self) -> complex:
        return complex(self.rel_permittivity_real, -self.rel_permittivity_imag)


DEFAULT_MATERIALS: dict[str, Material] = {
    m.name: m
    for m in (
        Material("concrete", 5.31, 0.48),
        Material("wet_earth", 15.0, 2.3),
        Material("sea_water", 20.0, 30.0),
    )
}


@dataclass(frozen=True)
class CarrierSpec:
    """Sounding carrier; wavelength is derived from the exact c."""

    frequency: float = 28e9

    def __post_init__(self) -> None:
        if self.frequency <= 0:
            raise ValueError("carrier frequency must be positive")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.frequency


def free_space_gain(d: float, carrier: CarrierSpec) -> float:
    """Free-space power gain (lambda / 4 pi d)^2; strictly decreasing in d."""
    if d <= 0:
        raise ValueError(f"distance must be positive, got {d}")
    return (carrier.wavelength / (4.0 * math.pi * d)) ** 2


def grazing_angle(h_t: float, h_r: float, D: float) -> float:
    """Grazing angle of the specular surface bounce, arctan((h_t+h_r)/D)."""
    if h_t <= 0 or h_r <= 0 or D <= 0:
        raise ValueError("heights and horizontal distance must be positive")
    return math.atan((h_t + h_r) / D)


def fresnel_reflection(grazing: float, material: Material, polarization: str) -> complex:
    """Fresnel field reflection coefficient off a lossy half-space.

    `grazing` in (0, pi/2] is measured from the surface. Parallel means the
    E-field lies in the plane of incidence (TM), perpendicular means it is
    normal to it (TE). |result| <= 1 for any passive material.
    """
    if not 0.0 < grazing <= math.pi / 2 + 1e-12:
        raise ValueError(f"grazing angle out of (0, pi/2]: {grazing}")
    eps = material.permittivity
    s = math.sin(grazing)
    root = cmath.sqrt(eps - math.cos(grazing) ** 2)
    if polarization == PARALLEL:
        return (eps * s - root) / (eps * s + root)
    if polarization == PERPENDICULAR:
        return (s - root) / (s + root)
    raise ValueError(f"unknown polarization {polarization!r}")


def sea_layer_loss(material: Material | None, grazing: float) -> float:
    """Power attenuation the reflecting layer applies to the surface bounce.

    |Gamma(material)|^2 at the given grazing angle for the vertical (TM)
    branch; 1.0 when there is no layer (plain ground scenario, or the
    perfect-conductor limit). The traced pipeline realizes this through the
    bounce's Fresnel coefficient; this helper exposes the factor directly.
    """
    if material is None:
        return 1.0
    return abs(fresnel_reflection(grazing, material, PARALLEL)) ** 2


@dataclass(frozen=True)
class PathGainModel:
    """Reference-amplitude power law: P(d) = alpha_ref^2 * (lambda/4 pi d)^gamma * g."""

    alpha_ref: float = 1.0
    gamma: float = 2.0
    carrier: CarrierSpec = field(default_factory=CarrierSpec)

    def __post_init__(self) -> None:
        if self.alpha_ref <= 0:
            raise ValueError("alpha_ref must be positive")

    def received_power(self, d: float, misalignment_gain: float = 1.0) -> float:
        if d <= 0:
            raise ValueError(f"distance must be positive, got {d}")
        beta = self.carrier.wavelength / (4.0 * math.pi * d)
        return self.alpha_ref**2 * beta**self.gamma * misalignment_gain


def load_material_table(path: str | Path) -> dict[str, Material]:
    """Parse a material table file: `name eps_real eps_imag` per record.

    Blank lines and `#` comments are skipped. Returns the shipped defaults
    updated with the file's records.
    """
    table = dict(DEFAULT_MATERIALS)
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"{path}:{lineno}: expected 'name eps_real eps_imag', got {raw!r}")
        name, re_s, im_s = parts
        try:
            table[name] = Material(name, float(re_s), float(im_s))
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: {exc}") from exc
    return table


def dump_material_table(table: dict[str, Material]) -> str:
    lines = ["# name  eps_real  eps_imag"]
    for name in sorted(table):
        m = table[name]
        lines.append(f"{name} {m.rel_permittivity_real:g} {m.rel_permittivity_imag:g}")
    return "\n".join(lines) + "\n"
