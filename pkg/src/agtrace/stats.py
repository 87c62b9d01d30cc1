"""Post-processing over a finished run: CDFs, traces, birth/death tracking."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import Mpc, Persistence, Snapshot


@dataclass(frozen=True, eq=False)
class RunResult:
    """Ordered snapshots over one trajectory plus run identity."""

    snapshots: tuple[Snapshot, ...]
    config_digest: str = ""
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "snapshots", tuple(self.snapshots))
        for i, snap in enumerate(self.snapshots):
            if snap.index != i:
                raise ValueError(f"snapshot indices must be contiguous from 0, got {snap.index} at {i}")

    def all_mpcs(self) -> list[tuple[int, Mpc]]:
        return [(s.index, m) for s in self.snapshots for m in s.mpcs]


@dataclass(frozen=True, eq=False)
class Ecdf:
    """Empirical CDF with tied samples collapsed."""

    values: np.ndarray
    probabilities: np.ndarray

    def evaluate(self, x: float) -> float:
        idx = int(np.searchsorted(self.values, x, side="right"))
        return 0.0 if idx == 0 else float(self.probabilities[idx - 1])


def ecdf(values) -> Ecdf:
    """Standard ECDF of a non-empty sample."""
    arr = np.asarray(list(values), dtype=np.float64)
    if arr.size == 0:
        raise ValueError("ecdf requires a non-empty sample")
    uniq, counts = np.unique(arr, return_counts=True)
    probs = np.cumsum(counts) / arr.size
    return Ecdf(values=uniq, probabilities=probs)


def power_vs_toa(run: RunResult) -> list[tuple[int, float, float, Persistence]]:
    """Snapshot-tagged (index, toa, power_dbm, class) rows for plotting."""
    return [(i, m.toa, m.power_dbm, m.persistence) for i, m in run.all_mpcs()]


ANGLE_FIELDS = ("doa_az", "doa_el", "dod_az", "dod_el")


def angle_cdfs(run: RunResult) -> dict[str, Ecdf]:
    """One ECDF per angle dimension over every retained MPC of the run."""
    mpcs = [m for _, m in run.all_mpcs()]
    return {name: ecdf([getattr(m, name) for m in mpcs]) for name in ANGLE_FIELDS}


@dataclass(frozen=True)
class TrackRecord:
    """Lifetime of one component: [birth, death] snapshot span."""

    persistence: Persistence
    birth: int
    death: int
    refs: tuple[tuple[int, int], ...]  # (snapshot index, position in snapshot)

    @property
    def lifetime(self) -> int:
        return self.death - self.birth + 1


def _doa_unit(m: Mpc) -> np.ndarray:
    el = math.radians(m.doa_el)
    az = math.radians(m.doa_az)
    return np.array([math.sin(el) * math.cos(az), math.sin(el) * math.sin(az), math.cos(el)])


def _doa_separation_deg(a: Mpc, b: Mpc) -> float:
    dot = float(np.clip(np.dot(_doa_unit(a), _doa_unit(b)), -1.0, 1.0))
    return math.degrees(math.acos(dot))


def track_mpcs(run: RunResult, toa_tol: float = 2e-9, angle_tol: float = 2.0) -> list[TrackRecord]:
    """Associate MPCs across consecutive snapshots into lifetime tracks.

    Non-persistent components match greedily by smallest combined
    (TOA, arrival-direction) distance, admissible only within both
    tolerances; an unmatched new component is a birth, an unmatched old one
    a death. LOS and GRC form one track each spanning their presence.
    """
    if toa_tol <= 0 or angle_tol <= 0:
        raise ValueError("tracking tolerances must be positive")

    tracks: list[TrackRecord] = []
    for cls in (Persistence.LOS, Persistence.GRC):
        refs = [
            (s.index, j)
            for s in run.snapshots
            for j, m in enumerate(s.mpcs)
            if m.persistence is cls
        ]
        if refs:
            tracks.append(TrackRecord(cls, refs[0][0], refs[-1][0], tuple(refs)))

    # open non-persistent tracks: (refs list, last mpc, last snapshot index)
    active: list[tuple[list[tuple[int, int]], Mpc, int]] = []
    closed: list[TrackRecord] = []

    def close(track: tuple[list[tuple[int, int]], Mpc, int]) -> None:
        refs, _, last = track
        closed.append(TrackRecord(Persistence.NON_PERSISTENT, refs[0][0], last, tuple(refs)))

    for snap in run.snapshots:
        fresh = [(j, m) for j, m in enumerate(snap.mpcs) if m.persistence is Persistence.NON_PERSISTENT]
        pairs = []
        for a_idx, (_, old, last) in enumerate(active):
            if last != snap.index - 1:
                continue
            for f_idx, (_, new) in enumerate(fresh):
                dt = abs(new.toa - old.toa)
                if dt > toa_tol:
                    continue
                sep = _doa_separation_deg(new, old)
                if sep > angle_tol:
                    continue
                pairs.append((dt / toa_tol + sep / angle_tol, a_idx, f_idx))
        pairs.sort()
        used_a: set[int] = set()
        used_f: set[int] = set()
        for _, a_idx, f_idx in pairs:
            if a_idx in used_a or f_idx in used_f:
                continue
            used_a.add(a_idx)
            used_f.add(f_idx)
            refs, _, _ = active[a_idx]
            j, m = fresh[f_idx]
            refs.append((snap.index, j))
            active[a_idx] = (refs, m, snap.index)
        survivors = []
        for a_idx, track in enumerate(active):
            if a_idx in used_a or track[2] == snap.index:
                survivors.append(track)
            else:
                close(track)
        active = survivors
        for f_idx, (j, m) in enumerate(fresh):
            if f_idx not in used_f:
                active.append(([(snap.index, j)], m, snap.index))
    for track in active:
        close(track)

    closed.sort(key=lambda t: (t.birth, t.refs[0][1]))
    return tracks + closed


def summarize(run: RunResult) -> dict:
    """Deterministic run digest used by exports and regression tests."""
    per_class = {cls.value: 0 for cls in Persistence}
    for _, m in run.all_mpcs():
        per_class[m.persistence.value] += 1
    counts = [len(s.mpcs) for s in run.snapshots]
    toas = [m.toa for _, m in run.all_mpcs()]
    np_tracks = [t for t in track_mpcs(run) if t.persistence is Persistence.NON_PERSISTENT]
    hist: dict[str, int] = {}
    for t in np_tracks:
        key = str(t.lifetime)
        hist[key] = hist.get(key, 0) + 1
    summary: dict = {
        "seed": run.seed,
        "config_digest": run.config_digest,
        "snapshots": len(run.snapshots),
        "mpc_count_total": sum(per_class.values()),
        "mpc_count_by_class": per_class,
        "mean_mpcs_per_snapshot": (sum(counts) / len(counts)) if counts else 0.0,
        "max_mpcs_per_snapshot": max(counts) if counts else 0,
        "toa_ns_range": [min(toas) * 1e9, max(toas) * 1e9] if toas else None,
        "angle_ranges_deg": {
            name: [min(vals), max(vals)] if (vals := [getattr(m, name) for _, m in run.all_mpcs()]) else None
            for name in ANGLE_FIELDS
        },
        "non_persistent_track_count": len(np_tracks),
        "non_persistent_lifetime_histogram": dict(sorted(hist.items(), key=lambda kv: int(kv[0]))),
    }
    return summary
