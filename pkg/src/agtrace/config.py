"""Run configuration: flat key = value text files with strict validation."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path

from .channel import LinkBudget
from .materials import CarrierSpec
from .raytracer import TraceConfig
from .scenario import ScenarioKind, ScenarioSpec, TrajectorySpec


class ConfigError(Exception):
    """Invalid run configuration; message names the offending key/line."""


@dataclass(frozen=True)
class RunConfig:
    scenario: ScenarioSpec
    trajectory: TrajectorySpec
    budget: LinkBudget
    trace: TraceConfig
    rx_height: float = 150.0
    material_table: Path | None = None
    output_dir: Path = Path("out")
    seed: int = 1
    workers: int = 1

    def digest(self) -> str:
        """Stable hash of the resolved configuration."""
        payload = "\n".join(f"{k}={v}" for k, v in sorted(self.canonical_items()))
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    def canonical_items(self) -> list[tuple[str, str]]:
        s, t, b, tr = self.scenario, self.trajectory, self.budget, self.trace
        return [
            ("scenario", s.kind.value),
            ("seed", str(self.seed)),
            ("building_count", str(s.building_count)),
            ("building_height_min", f"{s.height_range[0]:g}"),
            ("building_height_max", f"{s.height_range[1]:g}"),
            ("footprint_min", f"{s.footprint_range[0]:g}"),
            ("footprint_max", f"{s.footprint_range[1]:g}"),
            ("rx_height", f"{self.rx_height:g}"),
            ("tx_height", f"{t.tx_height:g}"),
            ("start_offset", f"{t.start_offset:g}"),
            ("trajectory_length", f"{t.length:g}"),
            ("speed", f"{t.speed:g}"),
            ("sample_spacing", f"{t.spacing:g}"),
            ("max_reflection_order", str(tr.max_reflection_order)),
            ("include_ground_bounce", str(tr.include_ground_bounce).lower()),
            ("tx_power_dbm", f"{b.tx_power_dbm:g}"),
            ("sensitivity_dbm", f"{b.sensitivity_dbm:g}"),
            ("frequency_hz", f"{b.carrier.frequency:g}"),
            ("material_table", str(self.material_table) if self.material_table else ""),
        ]


_KNOWN_KEYS = {
    "scenario",
    "seed",
    "rx_height",
    "rx_heights",
    "tx_height",
    "start_offset",
    "trajectory_length",
    "speed",
    "sample_spacing",
    "max_reflection_order",
    "include_ground_bounce",
    "tx_power_dbm",
    "sensitivity_dbm",
    "frequency_hz",
    "building_count",
    "building_height_min",
    "building_height_max",
    "footprint_min",
    "footprint_max",
    "material_table",
    "output_dir",
    "workers",
}


def _parse_kv(path: Path) -> dict[str, tuple[str, int]]:
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    items: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if key in items:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        if not value:
            raise ConfigError(f"{path}:{lineno}: empty value for key {key!r}")
        items[key] = (value, lineno)
    return items


def _take(items: dict, key: str, default, conv, path: Path, check=None):
    if key not in items:
        return default
    value, lineno = items.pop(key)
    try:
        out = conv(value)
    except ValueError as exc:
        raise ConfigError(f"{path}:{lineno}: invalid value for {key!r}: {exc}") from exc
    if check is not None and not check(out):
        raise ConfigError(f"{path}:{lineno}: value out of range for {key!r}: {value}")
    return out


def _bool(value: str) -> bool:
    lowered = value.lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {value!r}")


def _heights(value: str) -> tuple[float, ...]:
    parts = [p.strip() for p in value.split(",") if p.strip()]
    if not parts:
        raise ValueError("empty height list")
    return tuple(float(p) for p in parts)


def parse_config(path: str | Path) -> RunConfig:
    """Load, validate, and default-fill a run configuration file."""
    path = Path(path)
    items = _parse_kv(path)

    if "scenario" not in items:
        raise ConfigError(f"{path}: missing required key 'scenario'")
    kind_raw, lineno = items.pop("scenario")
    try:
        kind = ScenarioKind(kind_raw)
    except ValueError:
        names = ", ".join(k.value for k in ScenarioKind)
        raise ConfigError(f"{path}:{lineno}: unknown scenario {kind_raw!r} (expected one of {names})") from None

    seed = _take(items, "seed", 1, int, path)
    scenario_overrides = {}
    count = _take(items, "building_count", None, int, path, check=lambda v: v >= 0)
    if count is not None:
        scenario_overrides["building_count"] = count
    h_lo = _take(items, "building_height_min", None, float, path, check=lambda v: v > 0)
    h_hi = _take(items, "building_height_max", None, float, path, check=lambda v: v > 0)
    f_lo = _take(items, "footprint_min", None, float, path, check=lambda v: v > 0)
    f_hi = _take(items, "footprint_max", None, float, path, check=lambda v: v > 0)

    scenario = ScenarioSpec.for_kind(kind, seed=seed)
    if h_lo is not None or h_hi is not None:
        scenario_overrides["height_range"] = (h_lo if h_lo is not None else scenario.height_range[0], h_hi if h_hi is not None else scenario.height_range[1])
    if f_lo is not None or f_hi is not None:
        scenario_overrides["footprint_range"] = (f_lo if f_lo is not None else scenario.footprint_range[0], f_hi if f_hi is not None else scenario.footprint_range[1])
    try:
        scenario = ScenarioSpec.for_kind(kind, seed=seed, **scenario_overrides)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc

    try:
        trajectory = TrajectorySpec(
            tx_height=_take(items, "tx_height", 2.0, float, path, check=lambda v: v > 0),
            rx_heights=_take(items, "rx_heights", (2.0, 50.0, 100.0, 150.0), _heights, path, check=lambda hs: all(h > 0 for h in hs)),
            start_offset=_take(items, "start_offset", 40.0, float, path, check=lambda v: v > 0),
            length=_take(items, "trajectory_length", 1200.0, float, path, check=lambda v: v > 0),
            speed=_take(items, "speed", 15.0, float, path, check=lambda v: v > 0),
            spacing=_take(items, "sample_spacing", 10.0, float, path, check=lambda v: v > 0),
        )
        budget = LinkBudget(
            tx_power_dbm=_take(items, "tx_power_dbm", 30.0, float, path),
            sensitivity_dbm=_take(items, "sensitivity_dbm", -110.0, float, path),
            carrier=CarrierSpec(frequency=_take(items, "frequency_hz", 28e9, float, path, check=lambda v: v > 0)),
        )
        trace = TraceConfig(
            max_reflection_order=_take(items, "max_reflection_order", 2, int, path),
            include_ground_bounce=_take(items, "include_ground_bounce", True, _bool, path),
        )
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc

    rx_height = _take(items, "rx_height", 150.0, float, path, check=lambda v: v > 0)
    material_table = _take(items, "material_table", None, Path, path)
    if material_table is not None:
        material_table = (path.parent / material_table).resolve() if not material_table.is_absolute() else material_table
        if not material_table.exists():
            raise ConfigError(f"{path}: material_table file not found: {material_table}")
    output_dir = _take(items, "output_dir", Path("out"), Path, path)
    workers = _take(items, "workers", 1, int, path, check=lambda v: v >= 1)

    assert not items, f"unconsumed keys: {items}"
    return RunConfig(
        scenario=scenario,
        trajectory=trajectory,
        budget=budget,
        trace=trace,
        rx_height=rx_height,
        material_table=material_table,
        output_dir=output_dir,
        seed=seed,
        workers=workers,
    )
