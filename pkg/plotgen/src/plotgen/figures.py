"""Offline figure rendering for exported mpcs.csv tables.

Five figure families over the simulator's CSV interface:

    power_vs_toa     received power against TOA, one series per class
    toa_distance     TOA against link distance, power on the colorbar
    toa_cdf          TOA CDFs, one curve per input file
    angle_cdf        2x2 arrival/departure angle CDFs, one curve per input
    elevation_trace  arrival and departure elevation along the trajectory

Rendering is deterministic: fixed style, fixed dpi, pinned PNG metadata, no
timestamps. Inputs are never modified.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

FIGURE_KINDS = ("power_vs_toa", "toa_distance", "toa_cdf", "angle_cdf", "elevation_trace")

REQUIRED_COLUMNS = (
    "snapshot",
    "time_s",
    "rx_x",
    "rx_y",
    "rx_z",
    "power_dbm",
    "phase_rad",
    "toa_ns",
    "dod_az_deg",
    "dod_el_deg",
    "doa_az_deg",
    "doa_el_deg",
    "bounces",
    "class",
)

CLASS_STYLE = {
    "LOS": ("tab:blue", "o"),
    "GRC": ("tab:green", "s"),
    "NonPersistent": ("tab:red", "."),
}

_RC = {
    "figure.dpi": 110,
    "savefig.dpi": 110,
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "lines.linewidth": 1.4,
}

_METADATA = {"Software": "plotgen"}


class SchemaError(ValueError):
    """The input CSV does not match the exporter contract."""


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    inputs: tuple[Path, ...]
    out: Path
    title: str | None = None
    xlim: tuple[float, float] | None = None
    ylim: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if self.kind not in FIGURE_KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; expected one of {', '.join(FIGURE_KINDS)}")
        if not self.inputs:
            raise ValueError("at least one input CSV is required")
        for path in self.inputs:
            if not Path(path).exists():
                raise FileNotFoundError(f"input not found: {path}")


@dataclass
class MpcTable:
    """Parsed mpcs.csv columns; numeric fields as arrays, class as strings."""

    path: Path
    numeric: dict[str, np.ndarray]
    mpc_class: list[str]
    source_stamp: str = ""

    def __getitem__(self, column: str) -> np.ndarray:
        return self.numeric[column]

    @property
    def distance(self) -> np.ndarray:
        # trajectory convention: transmitter under the origin
        return np.hypot(self["rx_x"], self["rx_y"])

    @property
    def rx_height(self) -> float:
        return float(np.median(self["rx_z"]))

    def rows_of_class(self, name: str) -> np.ndarray:
        return np.array([c == name for c in self.mpc_class], dtype=bool)


def read_mpcs(path: str | Path) -> MpcTable:
    """Parse an exported mpcs.csv; raises SchemaError on contract breaks."""
    path = Path(path)
    stamp = ""
    rows: list[list[str]] = []
    header: list[str] | None = None
    with path.open(newline="") as fh:
        for raw in csv.reader(fh):
            if not raw:
                continue
            if raw[0].startswith("#"):
                stamp = ",".join(raw)
                continue
            if header is None:
                header = raw
                continue
            rows.append(raw)
    if header is None:
        raise SchemaError(f"{path}: no header row")
    missing = [c for c in REQUIRED_COLUMNS if c not in header]
    if missing:
        raise SchemaError(f"{path}: missing column {missing[0]!r}")
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    idx = {c: header.index(c) for c in REQUIRED_COLUMNS}
    numeric = {
        c: np.array([float(r[idx[c]]) for r in rows])
        for c in REQUIRED_COLUMNS
        if c != "class"
    }
    mpc_class = [r[idx["class"]] for r in rows]
    return MpcTable(path=path, numeric=numeric, mpc_class=mpc_class, source_stamp=stamp)


def ecdf_curve(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    uniq, counts = np.unique(values, return_counts=True)
    return uniq, np.cumsum(counts) / values.size


def _single_table(spec: FigureSpec) -> MpcTable:
    if len(spec.inputs) != 1:
        raise ValueError(f"kind {spec.kind!r} takes exactly one input CSV")
    return read_mpcs(spec.inputs[0])


def _fig_power_vs_toa(spec: FigureSpec):
    table = _single_table(spec)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for name, (color, marker) in CLASS_STYLE.items():
        mask = table.rows_of_class(name)
        if mask.any():
            ax.scatter(table["toa_ns"][mask], table["power_dbm"][mask], s=12, c=color, marker=marker, label=name)
    ax.set_xlabel("TOA (ns)")
    ax.set_ylabel("received power (dBm)")
    ax.legend(loc="upper right")
    return fig


def _fig_toa_distance(spec: FigureSpec):
    table = _single_table(spec)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    sc = ax.scatter(table.distance, table["toa_ns"], c=table["power_dbm"], s=12, cmap="viridis")
    fig.colorbar(sc, ax=ax, label="received power (dBm)")
    ax.set_xlabel("link distance (m)")
    ax.set_ylabel("TOA (ns)")
    return fig


def _fig_toa_cdf(spec: FigureSpec):
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for path in spec.inputs:
        table = read_mpcs(path)
        x, p = ecdf_curve(table["toa_ns"])
        ax.plot(x, p, drawstyle="steps-post", label=f"rx z = {table.rx_height:g} m")
    ax.set_xlabel("TOA (ns)")
    ax.set_ylabel("CDF")
    ax.set_ylim(0.0, 1.02)
    ax.legend(loc="lower right")
    return fig


_ANGLE_PANELS = (
    ("doa_az_deg", "arrival azimuth (deg)"),
    ("doa_el_deg", "arrival elevation (deg)"),
    ("dod_az_deg", "departure azimuth (deg)"),
    ("dod_el_deg", "departure elevation (deg)"),
)


def _fig_angle_cdf(spec: FigureSpec):
    fig, axes = plt.subplots(2, 2, figsize=(8.0, 6.0))
    for (column, label), ax in zip(_ANGLE_PANELS, axes.ravel()):
        for path in spec.inputs:
            table = read_mpcs(path)
            x, p = ecdf_curve(table[column])
            ax.plot(x, p, drawstyle="steps-post", label=f"rx z = {table.rx_height:g} m")
        ax.set_xlabel(label)
        ax.set_ylabel("CDF")
        ax.set_ylim(0.0, 1.02)
    axes[0, 0].legend(loc="lower right", fontsize=7)
    fig.tight_layout()
    return fig


def _fig_elevation_trace(spec: FigureSpec):
    table = _single_table(spec)
    fig, (ax_doa, ax_dod) = plt.subplots(2, 1, figsize=(6.0, 6.0), sharex=True)
    for name, (color, marker) in CLASS_STYLE.items():
        mask = table.rows_of_class(name)
        if not mask.any():
            continue
        ax_doa.scatter(table.distance[mask], table["doa_el_deg"][mask], s=10, c=color, marker=marker, label=name)
        ax_dod.scatter(table.distance[mask], table["dod_el_deg"][mask], s=10, c=color, marker=marker)
    ax_doa.set_ylabel("arrival elevation (deg)")
    ax_dod.set_ylabel("departure elevation (deg)")
    ax_dod.set_xlabel("link distance (m)")
    ax_doa.axhline(90.0, color="gray", lw=0.8, ls="--")
    ax_dod.axhline(90.0, color="gray", lw=0.8, ls="--")
    ax_doa.legend(loc="upper right", fontsize=7)
    fig.tight_layout()
    return fig


_BUILDERS = {
    "power_vs_toa": _fig_power_vs_toa,
    "toa_distance": _fig_toa_distance,
    "toa_cdf": _fig_toa_cdf,
    "angle_cdf": _fig_angle_cdf,
    "elevation_trace": _fig_elevation_trace,
}


def build_figure(spec: FigureSpec):
    """Figure object for a spec; callers own closing it."""
    with plt.rc_context(_RC):
        fig = _BUILDERS[spec.kind](spec)
        if spec.title:
            fig.suptitle(spec.title)
        for ax in fig.get_axes():
            if spec.xlim:
                ax.set_xlim(*spec.xlim)
            if spec.ylim:
                ax.set_ylim(*spec.ylim)
        return fig


def render(spec: FigureSpec) -> Path:
    """Render the figure to spec.out; nothing is written on error."""
    fig = build_figure(spec)
    try:
        out = Path(spec.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(out, format=out.suffix.lstrip(".") or "png", metadata=_METADATA)
    finally:
        plt.close(fig)
    return Path(spec.out)
