"""Bit-stable file formats: scene documents, mpcs.csv, CDF tables, summary.

Every output embeds the seed and config digest on a leading comment line.
Numeric fields are printed with 9 significant digits; statistics tables are
always derived from the printed (round-tripped) values so that recomputing
them from an exported mpcs.csv reproduces the exact same bytes.
"""

from __future__ import annotations

import json
from pathlib import Path

from .channel import Mpc, Persistence, Snapshot
from .geometry import Aabb, Building, Plane, Scene, vec3
from .scenario import SEA_SURFACE_Z
from .stats import ANGLE_FIELDS, RunResult, ecdf, summarize

MPCS_HEADER = "snapshot,time_s,rx_x,rx_y,rx_z,power_dbm,phase_rad,toa_ns,dod_az_deg,dod_el_deg,doa_az_deg,doa_el_deg,bounces,class"

CDF_FILES = {"toa_ns": "toa_cdf.csv", **{name: f"{name}_cdf.csv" for name in ANGLE_FIELDS}}


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def _stamp(run: RunResult) -> str:
    return f"# seed={run.seed} config_digest={run.config_digest}"


def mpcs_rows(run: RunResult) -> list[str]:
    rows = []
    for snap in run.snapshots:
        for m in snap.mpcs:
            rows.append(
                ",".join(
                    [
                        str(snap.index),
                        _fmt(snap.time),
                        _fmt(snap.rx_pos[0]),
                        _fmt(snap.rx_pos[1]),
                        _fmt(snap.rx_pos[2]),
                        _fmt(m.power_dbm),
                        _fmt(m.phase),
                        _fmt(m.toa * 1e9),
                        _fmt(m.dod_az),
                        _fmt(m.dod_el),
                        _fmt(m.doa_az),
                        _fmt(m.doa_el),
                        str(m.bounce_count),
                        m.persistence.value,
                    ]
                )
            )
    return rows


def export_run(run: RunResult, out_dir: str | Path) -> list[Path]:
    """Write mpcs.csv, summary.json, and the per-statistic CDF tables."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    mpcs_path = out / "mpcs.csv"
    lines = [_stamp(run), MPCS_HEADER, *mpcs_rows(run)]
    mpcs_path.write_text("\n".join(lines) + "\n")
    written.append(mpcs_path)

    # statistics come from the printed values: re-reading the CSV later
    # must reproduce these tables byte for byte
    round_tripped = read_mpcs_csv(mpcs_path)
    written.extend(write_stat_tables(round_tripped, out))
    return written


def write_stat_tables(run: RunResult, out_dir: str | Path) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    samples: dict[str, list[float]] = {"toa_ns": [m.toa * 1e9 for _, m in run.all_mpcs()]}
    for name in ANGLE_FIELDS:
        samples[name] = [getattr(m, name) for _, m in run.all_mpcs()]
    for name, filename in CDF_FILES.items():
        path = out / filename
        lines = [_stamp(run), "value,probability"]
        if samples[name]:
            table = ecdf(samples[name])
            lines += [f"{_fmt(v)},{_fmt(p)}" for v, p in zip(table.values, table.probabilities)]
        path.write_text("\n".join(lines) + "\n")
        written.append(path)

    summary_path = out / "summary.json"
    summary_path.write_text(json.dumps(summarize(run), sort_keys=True, indent=2) + "\n")
    written.append(summary_path)
    return written


def read_mpcs_csv(path: str | Path) -> RunResult:
    """Reconstruct a run from an exported mpcs.csv."""
    path = Path(path)
    lines = path.read_text().splitlines()
    seed = 0
    digest = ""
    body = []
    for line in lines:
        if line.startswith("#"):
            for token in line[1:].split():
                key, _, value = token.partition("=")
                if key == "seed":
                    seed = int(value)
                elif key == "config_digest":
                    digest = value
            continue
        body.append(line)
    if not body or body[0] != MPCS_HEADER:
        raise ValueError(f"{path}: unexpected mpcs.csv header")

    by_snapshot: dict[int, tuple[float, tuple[float, float, float], list[Mpc]]] = {}
    for row in body[1:]:
        if not row:
            continue
        parts = row.split(",")
        if len(parts) != 14:
            raise ValueError(f"{path}: malformed row {row!r}")
        idx = int(parts[0])
        power = float(parts[5])
        mpc = Mpc(
            power_dbm=power,
            amplitude=10.0 ** (power / 20.0),
            phase=float(parts[6]),
            toa=float(parts[7]) * 1e-9,
            dod_az=float(parts[8]),
            dod_el=float(parts[9]),
            doa_az=float(parts[10]),
            doa_el=float(parts[11]),
            bounce_count=int(parts[12]),
            persistence=Persistence(parts[13]),
        )
        entry = by_snapshot.setdefault(idx, (float(parts[1]), (float(parts[2]), float(parts[3]), float(parts[4])), []))
        entry[2].append(mpc)

    snapshots = []
    for i in sorted(by_snapshot):
        time, pos, mpcs = by_snapshot[i]
        snapshots.append(Snapshot(index=i, time=time, rx_pos=vec3(*pos), mpcs=tuple(mpcs)))
    return RunResult(snapshots=tuple(snapshots), config_digest=digest, seed=seed)


def write_scene(scene: Scene, path: str | Path) -> None:
    """Serialize a scene document: terrain, surface, building records."""
    surface_type = "sea" if scene.reflecting_surface.anchor_z == SEA_SURFACE_Z else "ground"
    lines = [
        "# agtrace scene v1",
        f"terrain {_fmt(scene.terrain_extent[0])} {_fmt(scene.terrain_extent[1])}",
        f"surface {surface_type} {_fmt(scene.reflecting_surface.anchor_z)} {scene.surface_material}",
    ]
    for b in scene.buildings:
        lo, hi = b.box.min_corner, b.box.max_corner
        lines.append("building " + " ".join(_fmt(v) for v in (*lo, *hi)) + f" {b.material}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_scene(path: str | Path) -> Scene:
    path = Path(path)
    terrain = (10_000.0, 10_000.0)
    surface = Plane(0.0)
    surface_material = "wet_earth"
    buildings: list[Building] = []
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        try:
            if kind == "terrain" and len(parts) == 3:
                terrain = (float(parts[1]), float(parts[2]))
            elif kind == "surface" and len(parts) == 4:
                surface = Plane(float(parts[2]))
                surface_material = parts[3]
            elif kind == "building" and len(parts) == 8:
                lo = vec3(*(float(v) for v in parts[1:4]))
                hi = vec3(*(float(v) for v in parts[4:7]))
                buildings.append(Building(Aabb(lo, hi), parts[7]))
            else:
                raise ValueError(f"unrecognized record {kind!r}")
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: {exc}") from exc
    return Scene(
        terrain_extent=terrain,
        reflecting_surface=surface,
        surface_material=surface_material,
        buildings=tuple(buildings),
    )
