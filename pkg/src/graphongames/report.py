"""Figure rendering for the CLI report paths.

Renders matplotlib figures next to the delimited outputs: log-log
convergence plots for experiment reports, factor/similarity panels for
interventions, and eigenvalue scatter for spectral reports. Uses the Agg
backend so headless runs work.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "render_convergence_figure",
    "render_intervention_figure",
    "render_spectrum_figure",
]


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)


def render_convergence_figure(report, path):
    """Scatter of per-replication values with the median line, log-log."""
    metric = "distance" if report.kind == "equilibrium" else "gap"
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    xs = [r["N"] for r in report.rows if r["metric"] == metric]
    ys = [r["value"] for r in report.rows if r["metric"] == metric]
    ax.scatter(xs, ys, s=12, alpha=0.45, color="tab:gray", label="replications")
    med = report.medians(metric)
    if med:
        ns = sorted(med)
        ax.plot(ns, [med[n] for n in ns], "o-", color="tab:blue", label="median")
    if report.rate is not None and report.rate.slope is not None:
        ax.set_title(
            f"{metric} vs N (log-log slope {report.rate.slope:.3f}, "
            f"R²={report.rate.r_squared:.3f})"
        )
    else:
        ax.set_title(f"{metric} vs N")
    positive = [y for y in ys if y > 0]
    if positive:
        ax.set_xscale("log")
        ax.set_yscale("log")
    ax.set_xlabel("players N")
    ax.set_ylabel(metric)
    ax.legend(loc="best", fontsize=8)
    ax.grid(True, which="both", alpha=0.3)
    _finish(fig, path)


def render_intervention_figure(solution, path):
    """Per-component factors and similarities of a spectral solution."""
    fig, axes = plt.subplots(1, 2, figsize=(9.0, 3.8))
    lam = solution.eigen.eigenvalues
    axes[0].axhline(0.0, color="k", lw=0.6)
    axes[0].plot(lam, solution.factors, "o", ms=4, color="tab:blue")
    axes[0].set_xlabel("eigenvalue")
    axes[0].set_ylabel("factor  w·α/(μ − w·α)")
    axes[0].set_title(f"intervention factors (μ = {solution.mu:.4g})")
    axes[0].grid(alpha=0.3)
    axes[1].axhline(0.0, color="k", lw=0.6)
    axes[1].plot(lam, solution.similarities, "s", ms=4, color="tab:orange")
    axes[1].set_xlabel("eigenvalue")
    axes[1].set_ylabel("similarity to component")
    axes[1].set_title("intervention alignment")
    axes[1].grid(alpha=0.3)
    _finish(fig, path)


def render_spectrum_figure(eigenvalues, path, title="spectrum"):
    fig, ax = plt.subplots(figsize=(6.0, 3.8))
    k = np.arange(1, len(eigenvalues) + 1)
    ax.axhline(0.0, color="k", lw=0.6)
    ax.plot(k, eigenvalues, "o", ms=4, color="tab:green")
    ax.set_xlabel("component index")
    ax.set_ylabel("eigenvalue")
    ax.set_title(title)
    ax.grid(alpha=0.3)
    _finish(fig, path)
