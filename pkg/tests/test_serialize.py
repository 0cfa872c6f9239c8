import numpy as np
import pytest

from graphongames import ArgumentError, InteractionMatrix
from graphongames.serialize import (
    load_matrix,
    load_profile,
    save_json,
    save_matrix,
    save_profile,
    sidecar_path,
)
from conftest import make_space, random_profile


def test_profile_round_trip(tmp_path):
    grid, sc = make_space(horizon=1.7, n_steps=5, n_scenarios=3)
    rng = np.random.default_rng(21)
    profile = random_profile(rng, 4, grid, sc)
    path = tmp_path / "profile.csv"
    save_profile(profile, path)
    loaded = load_profile(path)
    assert np.array_equal(loaded.values, profile.values)
    assert np.array_equal(loaded.grid.weights, profile.grid.weights)
    assert np.array_equal(loaded.scenarios.probabilities, profile.scenarios.probabilities)
    header = path.read_text().splitlines()[0]
    assert header == "player,scenario,t_index,value"
    assert (tmp_path / sidecar_path("profile.csv")).name == "profile.csv.meta.json"


def test_single_process_round_trip(tmp_path):
    grid, sc = make_space()
    rng = np.random.default_rng(23)
    process = random_profile(rng, 1, grid, sc).process(0)
    path = tmp_path / "process.csv"
    save_profile(process, path)
    loaded = load_profile(path)
    assert loaded.players == 1
    assert np.array_equal(loaded.values[0], process.values)


def test_profile_load_requires_sidecar(tmp_path):
    path = tmp_path / "p.csv"
    path.write_text("player,scenario,t_index,value\n")
    with pytest.raises(ArgumentError):
        load_profile(path)


def test_matrix_round_trip(tmp_path):
    rng = np.random.default_rng(22)
    raw = rng.uniform(0, 1, size=(3, 3))
    entries = (raw + raw.T) / 2
    matrix = InteractionMatrix(entries, scale=1.25)
    path = tmp_path / "graph.csv"
    save_matrix(matrix, path)
    first = path.read_text().splitlines()[0]
    assert first.startswith("# n=3,scale=1.25")
    loaded = load_matrix(path)
    assert np.array_equal(loaded.entries, matrix.entries)
    assert loaded.scale == matrix.scale


def test_load_matrix_rejects_malformed(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("0,1\n1,0\n")  # no header comment
    with pytest.raises(ArgumentError):
        load_matrix(path)
    path.write_text("# n=3,scale=1\n0,1\n1,0\n")  # body does not match n
    with pytest.raises(ArgumentError):
        load_matrix(path)


def test_save_json_is_deterministic(tmp_path):
    payload = {"b": np.float64(1.5), "a": np.arange(3), "c": {"z": (1, 2)}}
    p1, p2 = tmp_path / "x.json", tmp_path / "y.json"
    save_json(payload, p1)
    save_json(payload, p2)
    assert p1.read_bytes() == p2.read_bytes()
    assert p1.read_text().startswith("{")
