"""Vertical half-wave dipole pattern and link misalignment gain.

Both terminals carry a vertically oriented half-wave dipole: omnidirectional
in azimuth, donut-shaped in elevation with nulls on the vertical axis. The
ideal closed-form pattern is used (HPBW about 78 degrees), normalized to 1
broadside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import Vec3

PEAK_GAIN_DBI = 2.15


@dataclass(frozen=True)
class DipolePattern:
    """Half-wave dipole with a fixed vertical boresight axis."""

    peak_gain_dbi: float = PEAK_GAIN_DBI

    def gain(self, zenith_angle: float) -> float:
        return pattern_gain(zenith_angle)


def pattern_gain(zenith_angle: float) -> float:
    """Normalized dipole power pattern [cos((pi/2) cos t) / sin t]^2.

    1 broadside (t = pi/2), exactly 0 along the axis (continuous limit at
    the poles).
    """
    if not -1e-12 <= zenith_angle <= math.pi + 1e-12:
        raise ValueError(f"zenith angle out of [0, pi]: {zenith_angle}")
    s = math.sin(zenith_angle)
    if s < 1e-12:
        return 0.0
    return (math.cos(0.5 * math.pi * math.cos(zenith_angle)) / s) ** 2


def link_misalignment_gain(tx_pos: Vec3, rx_pos: Vec3) -> float:
    """Pattern product for the straight tx->rx ray, in [0, 1].

    Equals 1 for equal heights (horizontal ray through both broadsides) and
    shrinks as the elevation offset grows.
    """
    d = np.asarray(rx_pos, dtype=float) - np.asarray(tx_pos, dtype=float)
    norm = float(np.linalg.norm(d))
    if norm <= 0.0:
        raise ValueError("tx and rx positions coincide")
    cos_dep = float(np.clip(d[2] / norm, -1.0, 1.0))
    zen_dep = math.acos(cos_dep)
    # arrival ray points back along the segment; the dipole is symmetric
    # about broadside so this equals pattern_gain(zen_dep), kept explicit.
    zen_arr = math.acos(-cos_dep)
    return pattern_gain(zen_dep) * pattern_gain(zen_arr)
