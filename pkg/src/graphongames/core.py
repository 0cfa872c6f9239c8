"""Discretized stochastic process space and profile containers.

A process is a scenario x time grid of real values together with scenario
probabilities and time quadrature weights; expectations are probability
weighted sums and time integrals are weighted sums, so every inner product
below is a finite bilinear form. Profiles stack one process per player and
are the common currency of all solvers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, ShapeError

__all__ = [
    "TimeGrid",
    "ScenarioSet",
    "Process",
    "Profile",
    "inner_product",
    "norm",
    "profile_norm",
    "profile_distance",
    "step_embed",
    "step_profile_distance",
    "make_heterogeneity",
    "substream",
]

_REL_TOL = 1e-12


def substream(seed, *tags):
    """Deterministic counter-based generator for (seed, *tags).

    Philox keyed through a SeedSequence spawn key, so independent streams
    for different tags never collide and regenerating with the same key is
    bit-exact.
    """
    entropy = int(seed) & (2**64 - 1)
    key = tuple(int(t) & (2**63 - 1) for t in tags)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy, spawn_key=key)))


def _readonly(a):
    out = np.array(a, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class TimeGrid:
    """Quadrature over [0, horizon]: per-step weights summing to the horizon."""

    horizon: float
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "weights", _readonly(self.weights))
        if self.horizon <= 0:
            raise ArgumentError(f"horizon must be positive, got {self.horizon}")
        if self.weights.ndim != 1 or self.weights.size == 0:
            raise ShapeError("weights must be a nonempty 1-d array")
        if np.any(self.weights <= 0):
            raise ArgumentError("all quadrature weights must be positive")
        total = float(self.weights.sum())
        if abs(total - self.horizon) > _REL_TOL * max(1.0, abs(self.horizon)):
            raise ArgumentError(f"weights sum to {total}, expected horizon {self.horizon}")

    @property
    def n_steps(self):
        return self.weights.size

    @property
    def times(self):
        """Left endpoints of the quadrature cells."""
        return np.concatenate([[0.0], np.cumsum(self.weights)[:-1]])

    @staticmethod
    def uniform(horizon, n_steps):
        """Left-endpoint rule with constant weight horizon/n_steps."""
        if n_steps < 1:
            raise ArgumentError("n_steps must be >= 1")
        return TimeGrid(float(horizon), np.full(n_steps, horizon / n_steps))

    @staticmethod
    def trapezoid(horizon, n_steps):
        """Trapezoid weights on a uniform grid (n_steps >= 2)."""
        if n_steps < 2:
            raise ArgumentError("trapezoid rule needs n_steps >= 2")
        h = horizon / (n_steps - 1)
        w = np.full(n_steps, h)
        w[0] = w[-1] = h / 2.0
        return TimeGrid(float(horizon), w)


@dataclass(frozen=True)
class ScenarioSet:
    """Finite scenario space with explicit probabilities."""

    probabilities: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "probabilities", _readonly(self.probabilities))
        p = self.probabilities
        if p.ndim != 1 or p.size < 1:
            raise ShapeError("probabilities must be a nonempty 1-d array")
        if np.any(p < 0):
            raise ArgumentError("scenario probabilities must be nonnegative")
        if abs(float(p.sum()) - 1.0) > _REL_TOL:
            raise ArgumentError(f"scenario probabilities sum to {p.sum()}, expected 1")

    @property
    def n(self):
        return self.probabilities.size

    @staticmethod
    def uniform(n):
        if n < 1:
            raise ArgumentError("need at least one scenario")
        return ScenarioSet(np.full(n, 1.0 / n))


def _quad_table(grid, scenarios):
    """Outer product p_ω ⊗ w_t used by every inner product."""
    return scenarios.probabilities[:, None] * grid.weights[None, :]


@dataclass(frozen=True)
class Process:
    """One player's action/heterogeneity process: values[scenario, t]."""

    grid: TimeGrid
    scenarios: ScenarioSet
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _readonly(self.values))
        v = self.values
        if v.shape != (self.scenarios.n, self.grid.n_steps):
            raise ShapeError(
                f"process values shape {v.shape} does not match "
                f"({self.scenarios.n}, {self.grid.n_steps})"
            )
        if not np.all(np.isfinite(v)):
            raise ArgumentError("process values must be finite")

    @staticmethod
    def constant(c, grid, scenarios):
        return Process(grid, scenarios, np.full((scenarios.n, grid.n_steps), float(c)))

    def with_values(self, values):
        return Process(self.grid, self.scenarios, values)


@dataclass(frozen=True)
class Profile:
    """Indexed family of processes sharing one grid and scenario set.

    values has shape (players, n_scenarios, n_steps). A profile indexed by
    the uniform partition of [0,1] doubles as the discretization of an
    infinite-player action profile; `profile_norm(..., normalized=True)`
    is then the continuum norm.
    """

    grid: TimeGrid
    scenarios: ScenarioSet
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _readonly(self.values))
        v = self.values
        if v.ndim != 3 or v.shape[0] < 1:
            raise ShapeError("profile values must be (players, scenarios, steps) with players >= 1")
        if v.shape[1:] != (self.scenarios.n, self.grid.n_steps):
            raise ShapeError(
                f"profile slice shape {v.shape[1:]} does not match "
                f"({self.scenarios.n}, {self.grid.n_steps})"
            )
        if not np.all(np.isfinite(v)):
            raise ArgumentError("profile values must be finite")

    @property
    def players(self):
        return self.values.shape[0]

    def process(self, i):
        return Process(self.grid, self.scenarios, self.values[i])

    def with_values(self, values):
        return Profile(self.grid, self.scenarios, values)

    @staticmethod
    def constant(c, players, grid, scenarios):
        return Profile(grid, scenarios, np.full((players, scenarios.n, grid.n_steps), float(c)))

    @staticmethod
    def zeros(players, grid, scenarios):
        return Profile.constant(0.0, players, grid, scenarios)

    @staticmethod
    def from_processes(processes):
        if not processes:
            raise ArgumentError("empty profile")
        head = processes[0]
        for p in processes[1:]:
            if p.grid is not head.grid and not (
                p.grid.horizon == head.grid.horizon
                and np.array_equal(p.grid.weights, head.grid.weights)
            ):
                raise ShapeError("profile members must share one time grid")
            if p.scenarios is not head.scenarios and not np.array_equal(
                p.scenarios.probabilities, head.scenarios.probabilities
            ):
                raise ShapeError("profile members must share one scenario set")
        return Profile(head.grid, head.scenarios, np.stack([p.values for p in processes]))


def _check_same_space(a, b):
    if a.values.shape != b.values.shape:
        raise ShapeError(f"shape mismatch: {a.values.shape} vs {b.values.shape}")
    if not np.array_equal(a.grid.weights, b.grid.weights):
        raise ShapeError("time grids differ")
    if not np.array_equal(a.scenarios.probabilities, b.scenarios.probabilities):
        raise ShapeError("scenario sets differ")


def inner_product(a, b):
    """⟨a,b⟩ = Σ_ω p_ω Σ_t w_t a[ω,t] b[ω,t] (expectation of the time integral)."""
    _check_same_space(a, b)
    q = _quad_table(a.grid, a.scenarios)
    return float(np.sum(a.values * b.values * q))


def norm(a):
    """Process norm sqrt(⟨a,a⟩)."""
    return float(np.sqrt(max(inner_product(a, a), 0.0)))


def _profile_sq_norms(profile):
    q = _quad_table(profile.grid, profile.scenarios)
    return np.einsum("ist,st->i", profile.values**2, q)


def profile_norm(profile, normalized=True):
    """Profile norm: sqrt((1/N)Σ_i ‖aⁱ‖²) if normalized, else sqrt(Σ_i ‖aⁱ‖²).

    The normalized form is the continuum (uniform-partition) norm; the
    unnormalized form is the plain product-space norm.
    """
    if profile.players < 1:
        raise ArgumentError("empty profile")
    total = float(_profile_sq_norms(profile).sum())
    if normalized:
        total /= profile.players
    return float(np.sqrt(max(total, 0.0)))


def profile_distance(a, b, normalized=True):
    _check_same_space(a, b)
    return profile_norm(a.with_values(a.values - b.values), normalized=normalized)


def step_embed(profile, m):
    """Refine an N-player profile to m players constant on each parent block.

    m must be a positive multiple of N; the normalized profile norm is
    preserved exactly.
    """
    n = profile.players
    if m < 1 or m % n != 0:
        raise ArgumentError(f"m={m} must be a positive multiple of the player count {n}")
    reps = m // n
    return profile.with_values(np.repeat(profile.values, reps, axis=0))


def step_profile_distance(a, b):
    """Continuum (normalized) distance between step profiles on different
    uniform partitions, computed exactly on the merged partition."""
    if not np.array_equal(a.grid.weights, b.grid.weights) or not np.array_equal(
        a.scenarios.probabilities, b.scenarios.probabilities
    ):
        raise ShapeError("profiles must share grid and scenario set")
    na, nb = a.players, b.players
    cuts = np.union1d(np.arange(na + 1) / na, np.arange(nb + 1) / nb)
    widths = np.diff(cuts)
    mids = (cuts[:-1] + cuts[1:]) / 2.0
    ia = np.minimum((mids * na).astype(int), na - 1)
    ib = np.minimum((mids * nb).astype(int), nb - 1)
    diff = a.values[ia] - b.values[ib]
    q = _quad_table(a.grid, a.scenarios)
    per_piece = np.einsum("ist,st->i", diff**2, q)
    return float(np.sqrt(max(float(per_piece @ widths), 0.0)))


def make_heterogeneity(family, *, players, grid, scenarios, seed, **params):
    """Reproducible heterogeneity profiles.

    Families:
      constant: value c for every player/scenario/step.
      sinusoid: amplitude·sin(2π·frequency·t/T + phase), independent random
        phase per (player, scenario).
      ar1: per-(player, scenario) stationary AR(1) path with coefficient phi
        (|phi| < 1), innovation scale sigma, plus an optional mean.

    The same seed always yields bit-identical profiles.
    """
    n_w, n_t = scenarios.n, grid.n_steps
    if players < 1:
        raise ArgumentError("players must be >= 1")
    if family == "constant":
        c = float(params.pop("value", 1.0))
        _reject_extra(params)
        values = np.full((players, n_w, n_t), c)
    elif family == "sinusoid":
        amp = float(params.pop("amplitude", 1.0))
        freq = float(params.pop("frequency", 1.0))
        _reject_extra(params)
        rng = substream(seed, 1)
        phase = rng.uniform(0.0, 2.0 * np.pi, size=(players, n_w, 1))
        t = grid.times[None, None, :]
        values = amp * np.sin(2.0 * np.pi * freq * t / grid.horizon + phase)
    elif family == "ar1":
        phi = float(params.pop("phi", 0.5))
        sigma = float(params.pop("sigma", 1.0))
        mean = float(params.pop("mean", 0.0))
        _reject_extra(params)
        if not abs(phi) < 1:
            raise ArgumentError(f"ar1 requires |phi| < 1, got {phi}")
        if sigma < 0:
            raise ArgumentError("ar1 sigma must be nonnegative")
        rng = substream(seed, 2)
        eps = rng.standard_normal(size=(players, n_w, n_t))
        values = np.empty((players, n_w, n_t))
        values[..., 0] = eps[..., 0] * (sigma / np.sqrt(1.0 - phi * phi))
        for t in range(1, n_t):
            values[..., t] = phi * values[..., t - 1] + sigma * eps[..., t]
        values += mean
    else:
        raise ArgumentError(f"unknown heterogeneity family {family!r}")
    return Profile(grid, scenarios, values)


def _reject_extra(params):
    if params:
        raise ArgumentError(f"unknown heterogeneity parameters: {sorted(params)}")
