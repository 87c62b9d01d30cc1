"""Deterministic image-method ray tracer for 28 GHz air-to-ground links."""

from .antenna import DipolePattern, link_misalignment_gain, pattern_gain
from .channel import (
    LinkBudget,
    Mpc,
    Persistence,
    Snapshot,
    apply_sensitivity,
    classify_persistence,
    snapshot_from_paths,
    synthesize_mpc,
    two_ray_oracle,
)
from .config import ConfigError, RunConfig, parse_config
from .geometry import Aabb, Building, Plane, Scene, mirror_point, ray_aabb_intersect, segment_occluded, vec3
from .materials import (
    CarrierSpec,
    Material,
    PathGainModel,
    DEFAULT_MATERIALS,
    free_space_gain,
    fresnel_reflection,
    grazing_angle,
    sea_layer_loss,
)
from .raytracer import PropagationPath, TraceConfig, trace_all, trace_building_paths, trace_los, trace_surface_bounce
from .runner import SimulationError, run_simulation
from .scenario import ScenarioKind, ScenarioSpec, TrajectorySpec, build_scene, sample_trajectory, tx_position
from .stats import Ecdf, RunResult, TrackRecord, angle_cdfs, ecdf, power_vs_toa, summarize, track_mpcs

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
