"""File formats: profile CSV with JSON sidecar, matrix CSV, report JSON.

Profiles serialize as `player,scenario,t_index,value` rows plus a sidecar
holding the grid and scenario probabilities; matrices as dense CSV behind a
`# n=<N>,scale=<s>` comment line. All floats use repr-faithful %.17g so a
round trip is bit-exact and identical runs produce identical bytes.
"""

from __future__ import annotations

import csv
import json
import os

import numpy as np

from .core import Profile, ScenarioSet, TimeGrid
from .errors import ArgumentError
from .graphs import InteractionMatrix

__all__ = [
    "save_profile",
    "load_profile",
    "save_matrix",
    "load_matrix",
    "save_json",
    "sidecar_path",
]

_FMT = ".17g"


def _g(x):
    return format(float(x), _FMT)


def sidecar_path(path):
    return str(path) + ".meta.json"


def save_profile(profile, path):
    """Write player/scenario/step rows plus the grid/probability sidecar.

    A bare Process is stored as a one-player profile.
    """
    if not isinstance(profile, Profile):
        profile = Profile(profile.grid, profile.scenarios, profile.values[None])
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["player", "scenario", "t_index", "value"])
        n, s, t = profile.values.shape
        for i in range(n):
            for w in range(s):
                for k in range(t):
                    writer.writerow([i, w, k, _g(profile.values[i, w, k])])
    meta = {
        "players": n,
        "horizon": float(profile.grid.horizon),
        "weights": [float(w) for w in profile.grid.weights],
        "probabilities": [float(p) for p in profile.scenarios.probabilities],
    }
    save_json(meta, sidecar_path(path))


def load_profile(path):
    meta_file = sidecar_path(path)
    if not os.path.exists(meta_file):
        raise ArgumentError(f"missing profile sidecar {meta_file}")
    with open(meta_file) as handle:
        meta = json.load(handle)
    grid = TimeGrid(meta["horizon"], np.asarray(meta["weights"], dtype=float))
    scenarios = ScenarioSet(np.asarray(meta["probabilities"], dtype=float))
    values = np.zeros((meta["players"], scenarios.n, grid.n_steps))
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        if header != ["player", "scenario", "t_index", "value"]:
            raise ArgumentError(f"unexpected profile header {header!r} in {path}")
        for row in reader:
            i, w, k = int(row[0]), int(row[1]), int(row[2])
            values[i, w, k] = float(row[3])
    return Profile(grid, scenarios, values)


def save_matrix(matrix, path):
    with open(path, "w", newline="") as handle:
        handle.write(f"# n={matrix.n},scale={_g(matrix.scale)}\n")
        writer = csv.writer(handle)
        for row in matrix.entries:
            writer.writerow([_g(v) for v in row])


def load_matrix(path):
    with open(path, newline="") as handle:
        first = handle.readline().strip()
        if not first.startswith("# n="):
            raise ArgumentError(f"matrix file {path} lacks the '# n=...,scale=...' header")
        fields = dict(part.split("=") for part in first[2:].split(","))
        n, scale = int(fields["n"]), float(fields["scale"])
        rows = [[float(v) for v in row] for row in csv.reader(handle) if row]
    entries = np.asarray(rows, dtype=float)
    if entries.shape != (n, n):
        raise ArgumentError(f"matrix body shape {entries.shape} does not match n={n}")
    return InteractionMatrix(entries, scale=scale)


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def save_json(payload, path):
    """Deterministic JSON: sorted keys, newline-terminated."""
    with open(path, "w") as handle:
        json.dump(_jsonable(payload), handle, indent=2, sort_keys=True)
        handle.write("\n")
