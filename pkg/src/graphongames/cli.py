"""Command-line entry point.

One INI-style config file per run (sections per module, unknown keys
rejected), flag overrides, deterministic outputs. Subcommands:

  nash      solve a network/graphon game and write the equilibrium
  intervene solve the planner problem (spectral for LQ, general otherwise)
  sample    draw a weighted or simple graph from a graphon
  converge  run a convergence experiment ladder
  spectral  eigendecomposition and cut-norm report for a structure

Exit codes: 0 success, 2 bad config/precondition, 3 numeric failure,
4 guarded trivial intervention.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import os
import sys

import numpy as np

from . import __version__
from .core import ScenarioSet, TimeGrid, make_heterogeneity
from .errors import (
    ArgumentError,
    GraphonGamesError,
    NumericError,
    PreconditionError,
    TrivialInterventionError,
)
from .experiments import (
    ExperimentConfig,
    HeterogeneityField,
    run_equilibrium_convergence,
    run_intervention_convergence,
    write_report_csv,
)
from .games import LQUtility, average_welfare, lq_closed_form_welfare, solve_nash_fixed_point, solve_nash_lq
from .graphs import (
    Graphon,
    InteractionMatrix,
    cut_norm,
    graphon_lambda1,
    op_norm_diff,
    sample_simple,
    sample_weighted,
    spectrum,
    step_graphon,
)
from .interventions import (
    InterventionProblem,
    simple_intervention,
    solve_general_intervention,
    solve_spectral_lq,
)
from .serialize import save_json, save_matrix, save_profile, load_matrix

_SCHEMA = {
    "run": {"seed", "out"},
    "space": {"horizon", "n_steps", "n_scenarios"},
    "game": {"utility", "beta", "w_tilde"},
    "graph": {"source", "path", "kind", "level", "blocks", "n", "mode", "kappa", "zero_diagonal"},
    "theta": {
        "family", "value", "amplitude", "frequency", "phi", "sigma", "mean",
        "base", "slope", "cycles", "scenario_spread", "time_profile", "time_cycles",
    },
    "intervention": {"budget", "solver", "tol"},
    "experiment": {
        "metric", "ladder", "replications", "resolution", "sampling", "kappa",
        "theta_mode", "delta", "lipschitz_l", "lipschitz_breaks", "budget",
    },
    "spectral": {"cut_mode", "resolution"},
}

_SECTIONS = {
    "nash": {"run", "space", "game", "graph", "theta"},
    "intervene": {"run", "space", "game", "graph", "theta", "intervention"},
    "sample": {"run", "graph"},
    "converge": {"run", "space", "game", "graph", "theta", "experiment"},
    "spectral": {"run", "graph", "spectral"},
}


class ConfigError(ArgumentError):
    pass


def _load_config(path, overrides):
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    read = parser.read(path)
    if not read:
        raise ConfigError(f"config file not found: {path}")
    cfg = {s: dict(parser.items(s)) for s in parser.sections()}
    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        key, value = item.split("=", 1)
        if "." not in key:
            raise ConfigError(f"override key {key!r} must be section.key")
        section, name = key.split(".", 1)
        cfg.setdefault(section, {})[name] = value
    return cfg


def _validate(cfg, command):
    allowed = _SECTIONS[command]
    for section, keys in cfg.items():
        if section not in allowed:
            raise ConfigError(f"section [{section}] is not used by '{command}'")
        unknown = set(keys) - _SCHEMA[section]
        if unknown:
            raise ConfigError(f"unknown keys in [{section}]: {sorted(unknown)}")


def _get(cfg, section, key, default=None, cast=str):
    raw = cfg.get(section, {}).get(key)
    if raw is None:
        if default is None:
            raise ConfigError(f"missing required key {section}.{key}")
        return default
    if cast is bool:
        return str(raw).strip().lower() in ("1", "true", "yes", "on")
    return cast(raw)


def _spaces(cfg):
    grid = TimeGrid.uniform(
        _get(cfg, "space", "horizon", 1.0, float), _get(cfg, "space", "n_steps", 8, int)
    )
    scenarios = ScenarioSet.uniform(_get(cfg, "space", "n_scenarios", 2, int))
    return grid, scenarios


def _utility(cfg):
    kind = _get(cfg, "game", "utility", "lq")
    if kind != "lq":
        raise ConfigError(f"the CLI supports the 'lq' utility, got {kind!r}")
    return LQUtility(
        beta=_get(cfg, "game", "beta", cast=float),
        w_tilde=_get(cfg, "game", "w_tilde", 0.0, float),
    )


def _graphon(cfg):
    kind = _get(cfg, "graph", "kind", "constant")
    if kind == "constant":
        return Graphon.constant(_get(cfg, "graph", "level", 0.5, float))
    if kind == "product":
        return Graphon.product()
    if kind == "min":
        return Graphon.min_kernel()
    if kind == "block":
        raw = _get(cfg, "graph", "blocks")
        rows = [[float(v) for v in row.split()] for row in raw.split(";")]
        return Graphon.block_model(np.asarray(rows))
    raise ConfigError(f"unknown graphon kind {kind!r}")


def _structure(cfg, seed, lq=True):
    """Interaction matrix per the [graph] section; returns (matrix, latents)."""
    source = _get(cfg, "graph", "source", "graphon")
    if source == "matrix":
        return load_matrix(_get(cfg, "graph", "path")), None
    if source != "graphon":
        raise ConfigError(f"graph source must be 'matrix' or 'graphon', got {source!r}")
    graphon = _graphon(cfg)
    n = _get(cfg, "graph", "n", cast=int)
    mode = _get(cfg, "graph", "mode", "midpoint")
    if mode == "midpoint":
        vals = np.clip(graphon.discretize(n), 0.0, 1.0)
        matrix, latents = InteractionMatrix((vals + vals.T) / 2.0), None
    elif mode == "weighted":
        matrix, latents = sample_weighted(graphon, n, seed)
    elif mode == "simple":
        matrix, latents = sample_simple(graphon, n, _get(cfg, "graph", "kappa", 1.0, float), seed)
    else:
        raise ConfigError(f"unknown graph mode {mode!r}")
    if lq and _get(cfg, "graph", "zero_diagonal", mode != "midpoint", bool):
        matrix = matrix.without_diagonal()
    return matrix, latents


def _theta(cfg, players, grid, scenarios, seed, latents=None):
    family = _get(cfg, "theta", "family", "constant")
    if family == "field":
        field = HeterogeneityField(
            base=_get(cfg, "theta", "base", 1.0, float),
            slope=_get(cfg, "theta", "slope", 0.0, float),
            amplitude=_get(cfg, "theta", "amplitude", 0.0, float),
            cycles=_get(cfg, "theta", "cycles", 1.0, float),
            scenario_spread=_get(cfg, "theta", "scenario_spread", 0.0, float),
            time_profile=_get(cfg, "theta", "time_profile", "constant"),
            time_cycles=_get(cfg, "theta", "time_cycles", 1.0, float),
        )
        points = latents if latents is not None else (np.arange(players) + 0.5) / players
        return field.profile_at(points, grid, scenarios)
    params = {}
    for key, cast in (
        ("value", float), ("amplitude", float), ("frequency", float),
        ("phi", float), ("sigma", float), ("mean", float),
    ):
        raw = cfg.get("theta", {}).get(key)
        if raw is not None:
            params[key] = cast(raw)
    return make_heterogeneity(
        family, players=players, grid=grid, scenarios=scenarios, seed=seed, **params
    )


def _field(cfg):
    return HeterogeneityField(
        base=_get(cfg, "theta", "base", 1.0, float),
        slope=_get(cfg, "theta", "slope", 0.0, float),
        amplitude=_get(cfg, "theta", "amplitude", 0.0, float),
        cycles=_get(cfg, "theta", "cycles", 1.0, float),
        scenario_spread=_get(cfg, "theta", "scenario_spread", 0.0, float),
        time_profile=_get(cfg, "theta", "time_profile", "constant"),
        time_cycles=_get(cfg, "theta", "time_cycles", 1.0, float),
    )


def _write_manifest(out, command, config_path, cfg, seed):
    digest = hashlib.sha256()
    with open(config_path, "rb") as handle:
        digest.update(handle.read())
    manifest = {
        "command": command,
        "config": os.path.basename(str(config_path)),
        "config_sha256": digest.hexdigest(),
        "resolved": cfg,
        "seed": seed,
        "versions": {"graphongames": __version__, "numpy": np.__version__},
    }
    save_json(manifest, os.path.join(out, "manifest.json"))


def _prepare(args, command):
    cfg = _load_config(args.config, args.override)
    _validate(cfg, command)
    seed = args.seed if args.seed is not None else _get(cfg, "run", "seed", 0, int)
    out = args.out if args.out else _get(cfg, "run", "out", "runs/out")
    os.makedirs(out, exist_ok=True)
    _write_manifest(out, command, args.config, cfg, seed)
    return cfg, seed, out


def cmd_nash(args):
    cfg, seed, out = _prepare(args, "nash")
    grid, scenarios = _spaces(cfg)
    utility = _utility(cfg)
    matrix, latents = _structure(cfg, seed)
    theta = _theta(cfg, matrix.n, grid, scenarios, seed, latents)
    solution = solve_nash_lq(matrix, utility.beta, theta)
    check = solve_nash_fixed_point(utility, matrix, theta, tol=1e-10) if matrix.n <= 64 else None
    save_profile(solution.actions, os.path.join(out, "equilibrium.csv"))
    report = {
        "players": matrix.n,
        "iterations": solution.iterations,
        "residual": solution.residual,
        "contraction_factor": solution.contraction_factor,
        "welfare": average_welfare(utility, matrix, solution.actions, theta),
        "welfare_closed_form": lq_closed_form_welfare(utility, solution.actions),
    }
    if check is not None:
        report["fixed_point_iterations"] = check.iterations
        report["fixed_point_agreement"] = float(
            np.max(np.abs(check.actions.values - solution.actions.values))
        )
    save_json(report, os.path.join(out, "nash_report.json"))
    return 0


def cmd_intervene(args):
    from .report import render_intervention_figure

    cfg, seed, out = _prepare(args, "intervene")
    grid, scenarios = _spaces(cfg)
    utility = _utility(cfg)
    matrix, latents = _structure(cfg, seed)
    theta = _theta(cfg, matrix.n, grid, scenarios, seed, latents)
    budget = _get(cfg, "intervention", "budget", cast=float)
    solver = _get(cfg, "intervention", "solver", "auto")
    problem = InterventionProblem(utility, matrix, theta, budget)
    summary = {"budget": budget, "players": matrix.n, "w": utility.w}
    if solver in ("auto", "spectral"):
        solution = solve_spectral_lq(problem)
        save_profile(solution.theta_bar, os.path.join(out, "intervention.csv"))
        save_profile(solution.equilibrium.actions, os.path.join(out, "equilibrium.csv"))
        summary.update(
            {
                "solver": "spectral",
                "mu": solution.mu,
                "factors": solution.factors,
                "similarities": solution.similarities,
                "ratios": solution.ratios,
                "eigenvalues": solution.eigen.eigenvalues,
                "welfare": solution.welfare,
                "welfare_unintervened": solution.baseline_welfare,
                "budget_used": float(np.dot(solution.factors**2, solution.component_norms**2))
                / matrix.n,
                "zero_components": int(solution.zero_components.sum()),
            }
        )
        if utility.beta != 0.0 and utility.w > 0:
            try:
                simple = simple_intervention(problem)
                summary["simple_intervention"] = {
                    "welfare_simple": simple.welfare_simple,
                    "optimal_over_simple": simple.ratio,
                    "delta_implied": simple.delta_implied,
                    "alignment": simple.alignment,
                    "extreme_eigenvalue": simple.extreme_eigenvalue,
                }
            except GraphonGamesError as exc:
                summary["simple_intervention"] = {"unavailable": str(exc)}
        render_intervention_figure(solution, os.path.join(out, "intervention_factors.png"))
    elif solver == "general":
        tol = _get(cfg, "intervention", "tol", 1e-8, float)
        solution = solve_general_intervention(problem, tol=tol)
        save_profile(solution.theta_hat, os.path.join(out, "intervention.csv"))
        save_profile(solution.equilibrium.actions, os.path.join(out, "equilibrium.csv"))
        baseline = solve_nash_lq(matrix, utility.beta, theta)
        summary.update(
            {
                "solver": f"general/{solution.method}",
                "welfare": solution.welfare,
                "welfare_unintervened": lq_closed_form_welfare(utility, baseline.actions),
                "iterations": solution.iterations,
                "residual": solution.residual,
                "gt_condition": solution.gt_condition,
                "pair_contraction": solution.pair_contraction,
                "budget_active": solution.budget_active,
            }
        )
    else:
        raise ConfigError(f"unknown intervention solver {solver!r}")
    save_json(summary, os.path.join(out, "intervention_summary.json"))
    return 0


def cmd_sample(args):
    cfg, seed, out = _prepare(args, "sample")
    graphon = _graphon(cfg)
    n = _get(cfg, "graph", "n", cast=int)
    mode = _get(cfg, "graph", "mode", "weighted")
    if mode == "weighted":
        matrix, latents = sample_weighted(graphon, n, seed)
    elif mode == "simple":
        matrix, latents = sample_simple(graphon, n, _get(cfg, "graph", "kappa", 1.0, float), seed)
    else:
        raise ConfigError(f"sample mode must be 'weighted' or 'simple', got {mode!r}")
    save_matrix(matrix, os.path.join(out, "graph.csv"))
    with open(os.path.join(out, "latents.csv"), "w") as handle:
        handle.write("node,x\n")
        for i, x in enumerate(latents):
            handle.write(f"{i},{format(float(x), '.17g')}\n")
    return 0


def cmd_converge(args):
    from .report import render_convergence_figure

    cfg, seed, out = _prepare(args, "converge")
    utility = _utility(cfg)
    graphon = _graphon(cfg)
    field = _field(cfg)
    ladder = tuple(int(v) for v in _get(cfg, "experiment", "ladder").split())
    lipschitz_raw = cfg.get("experiment", {}).get("lipschitz_l")
    exp_cfg = ExperimentConfig(
        graphon=graphon,
        utility=utility,
        field=field,
        ladder=ladder,
        replications=_get(cfg, "experiment", "replications", 5, int),
        seed=seed,
        horizon=_get(cfg, "space", "horizon", 1.0, float),
        n_steps=_get(cfg, "space", "n_steps", 4, int),
        n_scenarios=_get(cfg, "space", "n_scenarios", 2, int),
        resolution=int(cfg["experiment"]["resolution"]) if "resolution" in cfg.get("experiment", {}) else None,
        sampling=_get(cfg, "experiment", "sampling", "weighted"),
        kappa=_get(cfg, "experiment", "kappa", 1.0, float),
        theta_mode=_get(cfg, "experiment", "theta_mode", "sampled"),
        delta=_get(cfg, "experiment", "delta", 0.05, float),
        lipschitz_l=float(lipschitz_raw) if lipschitz_raw is not None else None,
        lipschitz_breaks=_get(cfg, "experiment", "lipschitz_breaks", 0, int),
        budget=_get(cfg, "experiment", "budget", 1.0, float),
    )
    metric = _get(cfg, "experiment", "metric", "equilibrium")
    if metric == "equilibrium":
        report = run_equilibrium_convergence(exp_cfg)
    elif metric == "intervention":
        report = run_intervention_convergence(exp_cfg)
    else:
        raise ConfigError(f"experiment metric must be 'equilibrium' or 'intervention'")
    write_report_csv(report, os.path.join(out, "report.csv"))
    save_json(report.summary_dict(), os.path.join(out, "summary.json"))
    save_json(
        [{"N": n, "rep": r, "seconds": s} for n, r, s in report.wall_times],
        os.path.join(out, "timings.json"),
    )
    render_convergence_figure(report, os.path.join(out, "convergence.png"))
    return 0


def cmd_spectral(args):
    from .report import render_spectrum_figure

    cfg, seed, out = _prepare(args, "spectral")
    source = _get(cfg, "graph", "source", "graphon")
    summary = {}
    if source == "matrix":
        matrix = load_matrix(_get(cfg, "graph", "path"))
        spec = spectrum(matrix)
        graphon = step_graphon(matrix)
        summary["scale"] = matrix.scale
    else:
        graphon = _graphon(cfg)
        n = _get(cfg, "graph", "n", 64, int)
        vals = np.clip(graphon.discretize(n), 0.0, 1.0)
        matrix = InteractionMatrix((vals + vals.T) / 2.0)
        spec = spectrum(matrix)
    with open(os.path.join(out, "spectrum.csv"), "w") as handle:
        handle.write("k,eigenvalue\n")
        for k, lam in enumerate(spec.eigenvalues, start=1):
            handle.write(f"{k},{format(float(lam), '.17g')}\n")
    summary["eigenvalues"] = spec.eigenvalues
    resolution = _get(cfg, "spectral", "resolution", 256, int)
    summary["lambda1_operator"] = graphon_lambda1(graphon, resolution)
    cut_mode = _get(cfg, "spectral", "cut_mode", "none")
    if cut_mode == "exact":
        value = cut_norm(graphon, mode="exact")
        summary["cut_norm"] = value
        op = op_norm_diff(graphon, Graphon.constant(0.0), resolution)
        summary["operator_norm"] = op
        summary["sandwich"] = {
            "lower": value,
            "upper": float(np.sqrt(8.0 * value)),
            "holds": bool(value <= op + 1e-9 and op <= np.sqrt(8.0 * value) + 2.0 / resolution + 1e-9),
        }
    elif cut_mode == "heuristic":
        value, flag = cut_norm(graphon, mode="heuristic")
        summary["cut_norm"] = value
        summary["cut_norm_flag"] = flag
    elif cut_mode != "none":
        raise ConfigError(f"cut_mode must be exact|heuristic|none, got {cut_mode!r}")
    save_json(summary, os.path.join(out, "spectral_summary.json"))
    render_spectrum_figure(spec.eigenvalues, os.path.join(out, "spectrum.png"))
    return 0


_COMMANDS = {
    "nash": cmd_nash,
    "intervene": cmd_intervene,
    "sample": cmd_sample,
    "converge": cmd_converge,
    "spectral": cmd_spectral,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="graphongames",
        description="Nash equilibria and targeted interventions for network/graphon games",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in _COMMANDS.items():
        p = sub.add_parser(name, help=fn.__doc__)
        p.add_argument("--config", required=True, help="path to the run config file")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        p.add_argument("--out", default=None, help="override the output directory")
        p.add_argument(
            "--override",
            action="append",
            default=[],
            metavar="SECTION.KEY=VALUE",
            help="override a single config value (repeatable)",
        )
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except TrivialInterventionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ArgumentError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except GraphonGamesError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
