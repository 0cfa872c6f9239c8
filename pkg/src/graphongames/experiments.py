"""Convergence experiments: finite networks against their graphon limit.

The graphon reference is the fine uniform-partition game at resolution m.
For each ladder size N the harness samples (or deterministically coarsens)
a network, solves it, step-embeds the equilibrium, and measures the
continuum distance; the intervention variant compares the exact network
optimum against the projected graphon intervention. Medians across
replications feed a log-log rate fit.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .core import Profile, ScenarioSet, TimeGrid, profile_norm, step_profile_distance
from .errors import ArgumentError, GraphonGamesError, PreconditionError
from .games import (
    LQUtility,
    lq_closed_form_welfare,
    operator_norm_bound,
    solve_nash_fixed_point,
    solve_nash_lq,
)
from .graphs import Graphon, InteractionMatrix, cut_norm, sample_simple, sample_weighted, sampling_bound
from .interventions import (
    InterventionProblem,
    approximate_network_intervention,
    solve_spectral_lq,
)

__all__ = [
    "HeterogeneityField",
    "ExperimentConfig",
    "ConvergenceReport",
    "RateEstimate",
    "run_equilibrium_convergence",
    "run_intervention_convergence",
    "estimate_rate",
    "adjacent_block_lipschitz",
    "write_report_csv",
]


@dataclass(frozen=True)
class HeterogeneityField:
    """Deterministic heterogeneity θ^x as a function of the player label x.

    θ^x[ω, t] = (base + slope·x + amplitude·cos(2π·cycles·x)) · s_ω · τ(t)
    with per-scenario multipliers s_ω = 1 + spread·u_ω (u equispaced in
    [−1, 1]) and τ either constant 1 or 1 + ½·sin(2π·time_cycles·t/T).
    Lipschitz in x with constant |slope| + 2π·cycles·|amplitude|.
    """

    base: float = 1.0
    slope: float = 0.0
    amplitude: float = 0.0
    cycles: float = 1.0
    scenario_spread: float = 0.0
    time_profile: str = "constant"
    time_cycles: float = 1.0

    def __post_init__(self):
        if self.time_profile not in ("constant", "sine"):
            raise ArgumentError(f"unknown time profile {self.time_profile!r}")

    def shape_x(self, x):
        x = np.asarray(x, dtype=float)
        return self.base + self.slope * x + self.amplitude * np.cos(2.0 * np.pi * self.cycles * x)

    def lipschitz_x(self):
        return abs(self.slope) + 2.0 * np.pi * self.cycles * abs(self.amplitude)

    def profile_at(self, points, grid, scenarios):
        g = self.shape_x(points)
        u = np.linspace(-1.0, 1.0, scenarios.n) if scenarios.n > 1 else np.zeros(1)
        s = 1.0 + self.scenario_spread * u
        if self.time_profile == "constant":
            tau = np.ones(grid.n_steps)
        else:
            tau = 1.0 + 0.5 * np.sin(2.0 * np.pi * self.time_cycles * grid.times / grid.horizon)
        values = g[:, None, None] * s[None, :, None] * tau[None, None, :]
        return Profile(grid, scenarios, values)


@dataclass(frozen=True)
class ExperimentConfig:
    """One convergence run: graphon, utility, θ field, ladder, sampling."""

    graphon: Graphon
    utility: object
    field: HeterogeneityField
    ladder: tuple
    replications: int
    seed: int
    horizon: float = 1.0
    n_steps: int = 4
    n_scenarios: int = 2
    resolution: int | None = None
    sampling: str = "weighted"
    kappa: object = 1.0
    theta_mode: str = "sampled"
    delta: float = 0.05
    lipschitz_l: float | None = None
    lipschitz_breaks: int = 0
    budget: float = 1.0
    tol: float = 1e-10

    def __post_init__(self):
        ladder = tuple(int(n) for n in self.ladder)
        object.__setattr__(self, "ladder", ladder)
        if len(ladder) < 1 or any(b <= a for a, b in zip(ladder, ladder[1:])):
            raise ArgumentError("ladder must be strictly increasing")
        if self.replications < 1:
            raise ArgumentError("need at least one replication")
        if self.sampling not in ("weighted", "simple", "midpoint"):
            raise ArgumentError(f"unknown sampling mode {self.sampling!r}")
        if self.theta_mode not in ("sampled", "midpoint"):
            raise ArgumentError(f"unknown theta mode {self.theta_mode!r}")
        m = self.effective_resolution()
        if m < max(ladder):
            raise ArgumentError("graphon resolution must be at least the largest ladder size")
        if self.sampling == "midpoint" and any(m % n for n in ladder):
            raise ArgumentError("deterministic coarsening needs the resolution divisible by every N")
        if not np.isscalar(self.kappa) and len(tuple(self.kappa)) != len(ladder):
            raise ArgumentError("kappa schedule length must match the ladder")

    def effective_resolution(self):
        return int(self.resolution) if self.resolution else 4 * max(self.ladder)

    def kappa_for(self, idx):
        if np.isscalar(self.kappa):
            return float(self.kappa)
        sched = tuple(self.kappa)
        if len(sched) != len(self.ladder):
            raise ArgumentError("kappa schedule length must match the ladder")
        return float(sched[idx])

    def spaces(self):
        return TimeGrid.uniform(self.horizon, self.n_steps), ScenarioSet.uniform(self.n_scenarios)


@dataclass(frozen=True)
class RateEstimate:
    """OLS fit of log(median distance) against log(N)."""

    slope: float | None
    intercept: float | None
    r_squared: float | None
    n_points: int
    degenerate: bool = False


def estimate_rate(ns, medians):
    """Least squares on (log N, log median); needs >= 4 positive points."""
    ns = np.asarray(ns, dtype=float)
    med = np.asarray(medians, dtype=float)
    if ns.size != med.size:
        raise ArgumentError("ladder and medians must align")
    if ns.size < 4:
        raise ArgumentError("rate estimation needs at least 4 ladder points")
    if np.any(med <= 0):
        return RateEstimate(None, None, None, int(ns.size), degenerate=True)
    lx, ly = np.log(ns), np.log(med)
    slope, intercept = np.polyfit(lx, ly, 1)
    fitted = slope * lx + intercept
    ss_res = float(np.sum((ly - fitted) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return RateEstimate(float(slope), float(intercept), r2, int(ns.size))


@dataclass
class ConvergenceReport:
    """Long-format result rows plus per-N medians and a rate fit.

    Wall times are kept apart from the rows so the delimited report is
    bit-identical across reruns with the same seed.
    """

    kind: str
    ladder: tuple
    rows: list = field(default_factory=list)
    wall_times: list = field(default_factory=list)
    rate: RateEstimate | None = None
    extras: dict = field(default_factory=dict)

    def add(self, n, rep, metric, value):
        self.rows.append({"N": int(n), "rep": int(rep), "metric": metric, "value": float(value)})

    def values(self, metric, n=None):
        return [
            r["value"]
            for r in self.rows
            if r["metric"] == metric and (n is None or r["N"] == n)
        ]

    def medians(self, metric):
        out = {}
        for n in self.ladder:
            vals = self.values(metric, n)
            if vals:
                out[n] = float(np.median(vals))
        return out

    def summary_dict(self):
        primary = "distance" if self.kind == "equilibrium" else "gap"
        med = self.medians(primary)
        summary = {
            "kind": self.kind,
            "ladder": list(self.ladder),
            "medians": {str(n): med[n] for n in med},
            "failures": len(self.values("failed")),
        }
        if self.rate is not None:
            summary["rate"] = {
                "slope": self.rate.slope,
                "intercept": self.rate.intercept,
                "r_squared": self.rate.r_squared,
                "n_points": self.rate.n_points,
                "degenerate": self.rate.degenerate,
            }
        summary.update(self.extras)
        return summary


def write_report_csv(report, path):
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["N", "rep", "metric", "value"])
        for row in report.rows:
            writer.writerow([row["N"], row["rep"], row["metric"], format(row["value"], ".17g")])


def adjacent_block_lipschitz(profile):
    """Empirical Lipschitz estimate across adjacent blocks: the largest
    A-norm difference quotient N·‖θ^{i+1} − θ^i‖ (diagnostic only)."""
    n = profile.players
    if n < 2:
        return 0.0
    qtable = profile.scenarios.probabilities[:, None] * profile.grid.weights[None, :]
    diffs = np.diff(profile.values, axis=0)
    norms = np.sqrt(np.maximum(np.einsum("ist,st->i", diffs**2, qtable), 0.0))
    return float(norms.max() * n)


def _reference_matrix(graphon, m):
    vals = np.clip(graphon.discretize(m), 0.0, 1.0)
    return InteractionMatrix((vals + vals.T) / 2.0)


def _coarsen_matrix(graphon, m, n):
    """Deterministic N-block coarsening of the resolution-m discretization."""
    vals = np.clip(graphon.discretize(m), 0.0, 1.0)
    r = m // n
    coarse = vals.reshape(n, r, n, r).mean(axis=(1, 3))
    return InteractionMatrix((coarse + coarse.T) / 2.0)


def _solve_equilibrium(utility, matrix, theta, tol):
    if isinstance(utility, LQUtility) and utility.action_set.kind == "unbounded":
        return solve_nash_lq(matrix, utility.beta, theta)
    return solve_nash_fixed_point(utility, matrix, theta, tol=tol)


def _sample_network(cfg, idx, n, rep):
    # the per-replication seed is shared across the ladder, so the latent
    # uniforms at different N are prefixes of one stream (common random
    # numbers across rungs)
    base = cfg.seed * 1_000_003 + rep
    if cfg.sampling == "weighted":
        matrix, latents = sample_weighted(cfg.graphon, n, seed=base)
    elif cfg.sampling == "simple":
        matrix, latents = sample_simple(cfg.graphon, n, cfg.kappa_for(idx), seed=base)
    else:
        matrix = _coarsen_matrix(cfg.graphon, cfg.effective_resolution(), n)
        latents = None
    if isinstance(cfg.utility, LQUtility) and cfg.sampling != "midpoint":
        matrix = matrix.without_diagonal()
    return matrix, latents


def _theta_points(cfg, n, latents):
    if cfg.theta_mode == "sampled" and latents is not None:
        return latents
    return (np.arange(n) + 0.5) / n


def _contraction_margin(cfg):
    lam1 = operator_norm_bound(cfg.graphon)
    return cfg.utility.alpha_u - cfg.utility.ell_u * lam1


def run_equilibrium_convergence(cfg):
    """Equilibrium distance to the graphon reference across the ladder.

    Per (N, rep): sample or coarsen the network, solve it, and record the
    normalized continuum distance to the resolution-m reference
    equilibrium, the θ discretization distance, and whichever theoretical
    bound is computable (exact cut-norm bound for aligned step targets,
    sampling bounds ρ/ρ' when Lipschitz constants are configured).
    Contraction failures are recorded per row and the run continues.
    """
    grid, scenarios = cfg.spaces()
    m = cfg.effective_resolution()
    ref_matrix = _reference_matrix(cfg.graphon, m)
    mids = (np.arange(m) + 0.5) / m
    theta_ref = cfg.field.profile_at(mids, grid, scenarios)
    margin = _contraction_margin(cfg)
    if margin <= 0:
        raise PreconditionError(
            f"graphon game violates the contraction condition: alpha_U - ell_U*lambda1 = {margin:.6g}"
        )
    ref_eq = _solve_equilibrium(cfg.utility, ref_matrix, theta_ref, cfg.tol)
    c_theta = cfg.utility.ell_theta / margin
    report = ConvergenceReport("equilibrium", cfg.ladder)
    for idx, n in enumerate(cfg.ladder):
        for rep in range(cfg.replications):
            start = time.perf_counter()
            try:
                matrix, latents = _sample_network(cfg, idx, n, rep)
                points = _theta_points(cfg, n, latents)
                theta_n = cfg.field.profile_at(points, grid, scenarios)
                eq = _solve_equilibrium(cfg.utility, matrix, theta_n, cfg.tol)
            except GraphonGamesError:
                report.add(n, rep, "failed", 1.0)
                report.wall_times.append((n, rep, time.perf_counter() - start))
                continue
            distance = step_profile_distance(ref_eq.actions, eq.actions)
            theta_dist = step_profile_distance(theta_ref, theta_n)
            report.add(n, rep, "distance", distance)
            report.add(n, rep, "theta_distance", theta_dist)
            m_bound = profile_norm(eq.actions, normalized=True)
            c_w = math.sqrt(8.0) * cfg.utility.ell_u * m_bound / margin
            if cfg.sampling == "midpoint" and cfg.graphon.kind == "step":
                diff = _step_difference_blocks(cfg.graphon, matrix, n)
                if diff is not None and diff.shape[0] <= 16:
                    cut = cut_norm(diff, mode="exact")
                    report.add(n, rep, "bound_cut", c_w * math.sqrt(cut) + c_theta * theta_dist)
            elif cfg.sampling in ("weighted", "simple") and cfg.lipschitz_l is not None:
                # the bound's admissible delta window is empty for small N
                if n * math.exp(-n / 5.0) < cfg.delta < math.exp(-1.0):
                    rho, rho_prime = sampling_bound(
                        n, cfg.delta, cfg.lipschitz_l, cfg.lipschitz_breaks, cfg.kappa_for(idx)
                    )
                    op_bound = rho if cfg.sampling == "weighted" else rho_prime
                    report.add(
                        n, rep, "bound_rho", c_w / math.sqrt(8.0) * op_bound + c_theta * theta_dist
                    )
            report.wall_times.append((n, rep, time.perf_counter() - start))
    meds = report.medians("distance")
    if len(meds) >= 4:
        report.rate = estimate_rate(list(meds.keys()), list(meds.values()))
    return report


def _step_difference_blocks(graphon, matrix, n):
    """Block values of W − W_{G^N} on the common refinement, when small."""
    k = graphon.n_blocks
    lcm = k * n // math.gcd(k, n)
    if lcm > 256:
        return None
    reps_w, reps_g = lcm // k, lcm // n
    w_fine = np.repeat(np.repeat(graphon.blocks, reps_w, axis=0), reps_w, axis=1)
    g_fine = np.repeat(np.repeat(matrix.effective(), reps_g, axis=0), reps_g, axis=1)
    return w_fine - g_fine


def run_intervention_convergence(cfg):
    """Intervention welfare gap across the ladder (linear-quadratic only).

    The graphon reference intervention is solved once at resolution m; per
    (N, rep) the exact network optimum is compared against the projected
    reference candidate. The gap is nonnegative up to solver tolerance
    because the candidate is budget-feasible.
    """
    if not isinstance(cfg.utility, LQUtility):
        raise ArgumentError("intervention convergence requires a linear-quadratic utility")
    grid, scenarios = cfg.spaces()
    m = cfg.effective_resolution()
    ref_matrix = _reference_matrix(cfg.graphon, m)
    mids = (np.arange(m) + 0.5) / m
    theta_ref = cfg.field.profile_at(mids, grid, scenarios)
    ref_problem = InterventionProblem(cfg.utility, ref_matrix, theta_ref, cfg.budget)
    ref_solution = solve_spectral_lq(ref_problem)
    theta_bar_ref = ref_solution.theta_bar
    report = ConvergenceReport("intervention", cfg.ladder)
    report.extras["reference_welfare"] = ref_solution.welfare
    report.extras["empirical_block_lipschitz"] = adjacent_block_lipschitz(theta_bar_ref)
    for idx, n in enumerate(cfg.ladder):
        for rep in range(cfg.replications):
            start = time.perf_counter()
            try:
                matrix, latents = _sample_network(cfg, idx, n, rep)
                points = _theta_points(cfg, n, latents)
                theta_n = cfg.field.profile_at(points, grid, scenarios)
                problem = InterventionProblem(cfg.utility, matrix, theta_n, cfg.budget)
                opt = solve_spectral_lq(problem)
                candidate = approximate_network_intervention(theta_bar_ref, n)
                eq_cand = solve_nash_lq(
                    matrix, cfg.utility.beta, theta_n.with_values(theta_n.values + candidate.values)
                )
                welfare_cand = lq_closed_form_welfare(cfg.utility, eq_cand.actions)
            except GraphonGamesError:
                report.add(n, rep, "failed", 1.0)
                report.wall_times.append((n, rep, time.perf_counter() - start))
                continue
            report.add(n, rep, "gap", opt.welfare - welfare_cand)
            report.add(n, rep, "welfare_opt", opt.welfare)
            report.add(n, rep, "welfare_candidate", welfare_cand)
            report.wall_times.append((n, rep, time.perf_counter() - start))
    meds = report.medians("gap")
    if len(meds) >= 4 and all(v > 0 for v in meds.values()):
        report.rate = estimate_rate(list(meds.keys()), list(meds.values()))
    return report
