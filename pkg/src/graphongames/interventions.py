"""Central planner solvers: targeted interventions under a quadratic budget.

The planner perturbs the players' heterogeneity from θ to θ + θ̂ subject to
(1/N)·‖θ̂‖² ≤ C_B and maximizes average equilibrium welfare. Two routes:

* spectral (linear-quadratic): in each principal component of the
  interaction matrix the optimal perturbation is a deterministic scalar
  multiple wα_k/(μ − wα_k) of the component of θ, with the Lagrange
  multiplier μ pinned down by budget exhaustion;
* general (concave): alternate the planner's budget-ball best response with
  the players' Nash response until the pair map reaches its fixed point.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import Profile, profile_norm
from .errors import (
    ArgumentError,
    NumericError,
    PreconditionError,
    ShapeError,
    TrivialInterventionError,
)
from .games import (
    LQUtility,
    NashSolution,
    average_welfare,
    lq_closed_form_welfare,
    operator_norm_bound,
    solve_nash_fixed_point,
    solve_nash_lq,
)
from .graphs import Graphon, InteractionMatrix, group_eigenvalues, spectrum

__all__ = [
    "InterventionProblem",
    "SpectralInterventionSolution",
    "GeneralInterventionSolution",
    "amplification_factors",
    "project_components",
    "reconstruct_components",
    "solve_mu",
    "solve_spectral_lq",
    "similarity_report",
    "budget_asymptotics",
    "simple_intervention",
    "solve_general_intervention",
    "approximate_network_intervention",
]

_ZERO_COMPONENT_TOL = 1e-12


@dataclass(frozen=True)
class InterventionProblem:
    """Planner instance: utility, interaction structure, status quo θ, budget.

    A Graphon structure is discretized to the midpoint interaction matrix at
    the resolution of θ, so all solvers operate on one matrix game.
    """

    utility: object
    structure: object
    theta: Profile
    budget: float

    def __post_init__(self):
        if self.budget < 0:
            raise ArgumentError("budget must be nonnegative")
        if isinstance(self.structure, InteractionMatrix):
            if self.structure.n != self.theta.players:
                raise ShapeError("interaction matrix does not match the heterogeneity profile")
        elif not isinstance(self.structure, Graphon):
            raise ArgumentError("structure must be an InteractionMatrix or a Graphon")

    @property
    def matrix(self):
        if isinstance(self.structure, InteractionMatrix):
            return self.structure
        vals = np.clip(self.structure.discretize(self.theta.players), 0.0, 1.0)
        return InteractionMatrix((vals + vals.T) / 2.0)

    def theta_norm_sq(self):
        return profile_norm(self.theta, normalized=True) ** 2


def amplification_factors(spec_or_eigs, beta, n, scale=1.0):
    """Amplification per principal component: α_k = (1 − β·λ_k·scale/N)⁻².

    With operator eigenvalues λ·scale/N this is the continuum form
    (1 − βλ)⁻². Raises when any margin 1 − βλ·scale/N is nonpositive.
    """
    eigs = getattr(spec_or_eigs, "eigenvalues", spec_or_eigs)
    margins = 1.0 - beta * scale * np.asarray(eigs, dtype=float) / n
    if np.min(margins) <= 0:
        raise PreconditionError(
            f"spectral radius condition violated: min(1 - beta*lambda/N) = "
            f"{np.min(margins):.6g} <= 0"
        )
    return margins**-2.0


def project_components(spec, profile):
    """Project a profile onto the principal components.

    Returns (components, norms): components[k][ω,t] = Σ_i U[i,k]·values[i][ω,t]
    and norms[k] = ‖θ_k‖_A. Orthogonality gives Parseval:
    Σ_k ‖θ_k‖² = Σ_i ‖θⁱ‖².
    """
    if spec.source_n != profile.players:
        raise ShapeError("decomposition size does not match the profile")
    comps = np.einsum("ik,ist->kst", spec.eigenvectors, profile.values)
    qtable = profile.scenarios.probabilities[:, None] * profile.grid.weights[None, :]
    norms = np.sqrt(np.maximum(np.einsum("kst,st->k", comps**2, qtable), 0.0))
    return comps, norms


def reconstruct_components(spec, components, template):
    """Inverse of project_components: values[i] = Σ_k U[i,k]·components[k]."""
    values = np.einsum("ik,kst->ist", spec.eigenvectors, components)
    return template.with_values(values)


def _budget_value(mu, w_alphas, comp_norms_sq, n):
    factors = w_alphas / (mu - w_alphas)
    return float(np.dot(factors**2, comp_norms_sq)) / n


def solve_mu(alphas, w, comp_norms_sq, budget, n, budget_rtol=1e-10, max_iters=200):
    """Lagrange multiplier of the spectral intervention.

    Solves C_B = (1/N)·Σ_k (wα_k/(μ − wα_k))²·‖θ_k‖² for the unique root on
    (max_k wα_k, ∞), where the left side is strictly decreasing. Bisection
    on a bracket grown by doubling; terminates when the budget residual
    falls below budget_rtol·C_B.
    """
    alphas = np.asarray(alphas, dtype=float)
    comp_norms_sq = np.asarray(comp_norms_sq, dtype=float)
    if w == 0.0:
        raise ArgumentError("welfare weight w must be nonzero")
    if budget <= 0:
        raise ArgumentError("budget must be positive")
    if not np.any(comp_norms_sq > 0):
        raise ArgumentError("all component norms vanish; no heterogeneity to scale")
    w_alphas = w * alphas
    mu_min = float(np.max(w_alphas))
    lo = mu_min + 1e-12 * max(1.0, abs(mu_min))
    while _budget_value(lo, w_alphas, comp_norms_sq, n) <= budget:
        # the limit at mu_min is finite only when the extreme components
        # carry no heterogeneity mass; then no admissible root exists
        gap = lo - mu_min
        if gap < 1e-300:
            raise NumericError(
                "budget equation has no solution above max(w*alpha): the extreme "
                "spectral components carry zero heterogeneity mass"
            )
        lo = mu_min + gap / 2.0
        if gap < 1e-250:
            raise NumericError("bracket failure near mu_min in the budget equation")
    offset = 1.0 + 1e-6 * abs(mu_min)
    hi = mu_min + offset
    doublings = 0
    while _budget_value(hi, w_alphas, comp_norms_sq, n) > budget:
        offset *= 2.0
        hi = mu_min + offset
        doublings += 1
        if doublings > 200 or not np.isfinite(hi):
            raise NumericError("bracket failure: budget residual never changed sign")
    lo = max(lo, mu_min + 1e-12 * max(1.0, abs(mu_min)))
    mu = hi
    for _ in range(max_iters):
        mu = 0.5 * (lo + hi)
        residual = _budget_value(mu, w_alphas, comp_norms_sq, n) - budget
        if abs(residual) <= budget_rtol * budget:
            return mu
        if residual > 0:
            lo = mu
        else:
            hi = mu
        if hi - lo <= np.spacing(hi):
            break
    residual = _budget_value(mu, w_alphas, comp_norms_sq, n) - budget
    if abs(residual) <= 1e-8 * budget:
        return mu
    raise NumericError(
        f"mu bisection stalled with budget residual {residual:.3e}", residual=residual
    )


@dataclass(frozen=True)
class SpectralInterventionSolution:
    """Closed-form optimal intervention in spectral coordinates."""

    mu: float
    factors: np.ndarray
    theta_bar: Profile
    welfare: float
    baseline_welfare: float
    similarities: np.ndarray
    ratios: np.ndarray
    alphas: np.ndarray
    component_norms: np.ndarray
    zero_components: np.ndarray
    eigen: object
    equilibrium: NashSolution
    w: float
    beta: float


def _check_lq(problem):
    if not isinstance(problem.utility, LQUtility):
        raise ArgumentError("spectral interventions require a linear-quadratic utility")
    if problem.utility.action_set.kind != "unbounded":
        raise ArgumentError("spectral interventions require unbounded action sets")


def _check_nontrivial(problem):
    w = problem.utility.w
    if w == 0.0:
        raise PreconditionError("welfare weight w = 0 is excluded (degenerate planner)")
    if w < 0 and problem.theta_norm_sq() <= problem.budget:
        raise TrivialInterventionError(
            "trivial planner case: w < 0 and the budget covers ‖θ‖², so the "
            "optimal intervention is simply −θ (cancel the status quo)"
        )


def solve_spectral_lq(problem):
    """Optimal linear-quadratic intervention via spectral decomposition.

    Projects θ onto the principal components, solves the budget equation for
    μ, scales each component by wα_k/(μ − wα_k), and reconstructs θ̄ in
    player coordinates. Components whose θ-mass is numerically zero keep
    zero intervention mass (warned: the non-degeneracy assumption fails for
    them).
    """
    _check_lq(problem)
    _check_nontrivial(problem)
    if problem.budget <= 0:
        raise PreconditionError("the spectral solver needs a positive budget")
    u = problem.utility
    matrix = problem.matrix
    theta = problem.theta
    n = matrix.n
    spec = spectrum(matrix)
    alphas = amplification_factors(spec, u.beta, n, scale=matrix.scale)
    comps, comp_norms = project_components(spec, theta)
    zero_mask = comp_norms < _ZERO_COMPONENT_TOL
    if np.all(zero_mask):
        raise PreconditionError("θ vanishes in every principal component")
    if np.any(zero_mask):
        warnings.warn(
            f"{int(zero_mask.sum())} principal component(s) carry no heterogeneity "
            "mass; they receive zero intervention and are excluded from the "
            "non-degeneracy check",
            stacklevel=2,
        )
    mu = solve_mu(alphas, u.w, comp_norms**2, problem.budget, n)
    factors = u.w * alphas / (mu - u.w * alphas)
    theta_bar = reconstruct_components(spec, factors[:, None, None] * comps, theta)
    eta = theta.with_values(theta.values + theta_bar.values)
    equilibrium = solve_nash_lq(matrix, u.beta, eta)
    welfare = lq_closed_form_welfare(u, equilibrium.actions)
    baseline = solve_nash_lq(matrix, u.beta, theta)
    baseline_welfare = lq_closed_form_welfare(u, baseline.actions)
    bar_total = float(np.sqrt(np.dot(factors**2, comp_norms**2)))
    theta_total = float(np.sqrt(np.sum(comp_norms**2)))
    if bar_total > 0:
        similarities = factors * comp_norms / bar_total
        ratios = factors * theta_total / bar_total
    else:
        similarities = np.zeros_like(factors)
        ratios = np.zeros_like(factors)
    return SpectralInterventionSolution(
        mu=mu,
        factors=factors,
        theta_bar=theta_bar,
        welfare=welfare,
        baseline_welfare=baseline_welfare,
        similarities=similarities,
        ratios=ratios,
        alphas=alphas,
        component_norms=comp_norms,
        zero_components=zero_mask,
        eigen=spec,
        equilibrium=equilibrium,
        w=u.w,
        beta=u.beta,
    )


@dataclass(frozen=True)
class SimilarityReport:
    """|r_k| against the eigenvalues, with the monotonicity verdict."""

    eigenvalues: np.ndarray
    abs_ratios: np.ndarray
    beta: float
    monotone: bool
    direction: str


def similarity_report(solution, beta=None):
    """Check the similarity-ratio ordering along the spectrum.

    Complements (β > 0): |r_k| nondecreasing in λ; substitutes (β < 0):
    nonincreasing. The ratios share one positive prefactor per (ω, t)
    slice, so the scalar factor sequence decides the ordering.
    """
    if beta is None:
        beta = solution.beta
    lam = solution.eigen.eigenvalues
    abs_r = np.abs(solution.ratios)
    # eigenvalues are stored descending; flip to ascending λ
    lam_up = lam[::-1]
    r_up = abs_r[::-1]
    diffs = np.diff(r_up)
    if beta > 0:
        monotone = bool(np.all(diffs >= -1e-12))
        direction = "nondecreasing in lambda"
    elif beta < 0:
        monotone = bool(np.all(diffs <= 1e-12))
        direction = "nonincreasing in lambda"
    else:
        monotone = bool(np.all(np.abs(np.diff(abs_r)) <= 1e-12))
        direction = "constant (beta = 0)"
    return SimilarityReport(lam_up, r_up, beta, monotone, direction)


def _distinct_groups(solution):
    return group_eigenvalues(solution.eigen.eigenvalues)


def _slice_similarity_extreme(solution, comps_raw, group_idx):
    """min over (ω,t) slices of |cos(θ̄ slice, extreme eigenvector)|."""
    factors = solution.factors
    bar_comps = factors[:, None, None] * comps_raw
    k = group_idx
    denom = np.sqrt(np.sum(bar_comps**2, axis=0))
    with np.errstate(invalid="ignore", divide="ignore"):
        rho = np.abs(bar_comps[k]) / denom
    rho = np.where(denom > 0, rho, 0.0)
    return float(np.min(rho))


@dataclass(frozen=True)
class BudgetAsymptoticsReport:
    direction: str
    budgets: np.ndarray
    metrics: np.ndarray
    gaps: np.ndarray
    limit_description: str

    @property
    def final_gap(self):
        return float(self.gaps[-1])


def budget_asymptotics(problem, direction, rungs=9, small_end=1e-8, large_end=1e8):
    """Track the optimal intervention along a geometric budget ladder.

    direction 'small': worst-pair relative deviation of the similarity
    ratio r_λ/r_λ' from α_λ/α_λ' (limit 0 as C_B → 0). direction 'large':
    per-slice |cos(θ̄, extreme eigenvector)| (limit 1 as C_B → ∞; requires
    the extreme eigenvalue simple).
    """
    _check_lq(problem)
    if direction not in ("small", "large"):
        raise ArgumentError("direction must be 'small' or 'large'")
    u = problem.utility
    matrix = problem.matrix
    spec = spectrum(matrix)
    comps_raw, _ = project_components(spec, problem.theta)
    if direction == "large":
        groups = group_eigenvalues(spec.eigenvalues)
        extreme = groups[0] if u.beta > 0 else groups[-1]
        if len(extreme[1]) != 1:
            raise PreconditionError(
                f"extreme eigenvalue {extreme[0]:.6g} has multiplicity "
                f"{len(extreme[1])}; the large-budget limit needs multiplicity 1"
            )
        extreme_idx = extreme[1][0]
        budgets = np.geomspace(problem.budget, large_end, rungs)
        limit_desc = "|cos(theta_bar, extreme eigenvector)| -> 1"
    else:
        budgets = np.geomspace(problem.budget, small_end, rungs)
        limit_desc = "ratio r_l/r_l' -> alpha_l/alpha_l' (worst pair)"
    metrics, gaps = [], []
    for c_b in budgets:
        sub = InterventionProblem(u, matrix, problem.theta, float(c_b))
        sol = solve_spectral_lq(sub)
        if direction == "small":
            k_hi = int(np.argmax(sol.alphas))
            k_lo = int(np.argmin(sol.alphas))
            if sol.alphas[k_hi] == sol.alphas[k_lo]:
                dev = 0.0
            else:
                target = sol.alphas[k_hi] / sol.alphas[k_lo]
                dev = abs((sol.factors[k_hi] / sol.factors[k_lo]) / target - 1.0)
            metrics.append(dev)
            gaps.append(dev)
        else:
            rho = _slice_similarity_extreme(sol, comps_raw, extreme_idx)
            metrics.append(rho)
            gaps.append(1.0 - rho)
    return BudgetAsymptoticsReport(
        direction, budgets, np.asarray(metrics), np.asarray(gaps), limit_desc
    )


@dataclass(frozen=True)
class SimpleInterventionResult:
    theta_hat: Profile
    welfare_simple: float
    welfare_optimal: float
    ratio: float
    delta_implied: float
    alignment: float
    extreme_eigenvalue: float


def simple_intervention(problem):
    """Budget-exhausting intervention along the extreme principal component.

    θ̂ⁱ = c_t·e(x_i) with e the (simple) extreme eigenfunction and the
    scaling process c = √C_B·θ_{k*}/‖θ_{k*}‖, so ‖c‖ = √C_B exactly.
    Returns the welfare comparison against the spectral optimum and the δ
    implied by the sufficient-budget threshold.
    """
    _check_lq(problem)
    u = problem.utility
    if u.beta == 0.0:
        raise ArgumentError("simple interventions need a strategic parameter beta != 0")
    if u.w <= 0:
        raise PreconditionError("simple-intervention analysis requires w > 0 (w̃ > −1/2)")
    if problem.budget <= 0:
        raise PreconditionError("simple interventions need a positive budget")
    matrix = problem.matrix
    theta = problem.theta
    n = matrix.n
    spec = spectrum(matrix)
    alphas = amplification_factors(spec, u.beta, n, scale=matrix.scale)
    groups = group_eigenvalues(spec.eigenvalues)
    extreme = groups[0] if u.beta > 0 else groups[-1]
    if len(extreme[1]) != 1:
        raise PreconditionError(
            f"extreme eigenvalue {extreme[0]:.6g} has multiplicity {len(extreme[1])}"
        )
    k_star = extreme[1][0]
    comps, comp_norms = project_components(spec, theta)
    if comp_norms[k_star] < _ZERO_COMPONENT_TOL:
        raise PreconditionError(
            "the extreme principal component carries no heterogeneity mass"
        )
    scaling = np.sqrt(problem.budget) * comps[k_star] / comp_norms[k_star]
    eigenfunction = np.sqrt(n) * spec.eigenvectors[:, k_star]
    theta_hat = theta.with_values(eigenfunction[:, None, None] * scaling[None, :, :])
    eq_simple = solve_nash_lq(matrix, u.beta, theta.with_values(theta.values + theta_hat.values))
    welfare_simple = lq_closed_form_welfare(u, eq_simple.actions)
    optimal = solve_spectral_lq(problem)
    ratio = optimal.welfare / welfare_simple if welfare_simple > 0 else np.inf
    neighbor = groups[1] if u.beta > 0 else groups[-2]
    if len(groups) < 2:
        delta_implied = 0.0
    else:
        a_star = alphas[k_star]
        a_next = alphas[neighbor[1][0]]
        delta_implied = (
            2.0 / problem.budget * problem.theta_norm_sq() * (a_next / (a_star - a_next)) ** 2
        )
    alignment = float(
        abs(optimal.factors[k_star])
        * optimal.component_norms[k_star]
        / np.sqrt(n * problem.budget)
    )
    return SimpleInterventionResult(
        theta_hat=theta_hat,
        welfare_simple=welfare_simple,
        welfare_optimal=optimal.welfare,
        ratio=ratio,
        delta_implied=delta_implied,
        alignment=alignment,
        extreme_eigenvalue=extreme[0],
    )


@dataclass(frozen=True)
class GeneralInterventionSolution:
    theta_hat: Profile
    equilibrium: NashSolution
    welfare: float
    iterations: int
    residual: float
    converged: bool
    gt_condition: float
    pair_contraction: float
    budget_active: bool
    method: str = "pair"


def _planner_best_response(utility, actions, aggregate, theta, radius, qtable, tol, max_iters):
    """Maximize the average utility over the budget ball ‖θ̂‖ ≤ radius.

    Projected gradient ascent in the normalized profile geometry; the ball
    projection is radial scaling. Step 1/L with the model's planner
    smoothness constant.
    """
    smooth = getattr(utility, "planner_smoothness", None)
    if smooth is None:
        smooth = utility.beta_u + (utility.ell_a or 0.0) + (utility.ell_z or 0.0)
    step = 1.0 / smooth
    n = actions.shape[0]

    def project(values):
        sq = float(np.einsum("ist,st->", values**2, qtable)) / n
        nrm = np.sqrt(max(sq, 0.0))
        if nrm > radius:
            return values * (radius / nrm)
        return values

    hat = np.zeros_like(theta)
    residual = np.inf
    for _ in range(max_iters):
        grad = utility.grad_heterogeneity(actions, aggregate, theta + hat, qtable)
        hat_next = project(hat + step * grad)
        gap = (hat - hat_next) * smooth
        residual = float(np.sqrt(np.einsum("ist,st->", gap**2, qtable) / n))
        hat = hat_next
        if residual <= tol:
            return hat
    raise NumericError(
        f"planner best response stalled (gradient-map norm {residual:.3e})",
        residual=residual,
    )


def solve_general_intervention(problem, tol=1e-8, max_iters=5000):
    """Optimal intervention for concave utilities by alternating planner and
    player responses over the budget ball.

    Linear-quadratic utilities with unbounded actions use the exact reduced
    ascent: the welfare envelope gradient through the equilibrium map is
    2w·(I − (β/N)G)⁻¹·ā per slice, so projected gradient ascent on the
    budget ball converges globally to the bilevel optimum when w < 0 (the
    reduced objective is then strongly concave).

    Other utilities run the product-operator alternation: (i) planner best
    response with the current equilibrium and aggregate frozen (projected
    gradient ascent on the heterogeneity gradient), (ii) players' Nash
    response to the current intervention. The two-step composition of this
    pair map contracts whenever Lip(T)·Lip(N) < 1 with
    Lip(T) = (ℓ_a + ℓ_z·λ₁)/β_U and Lip(N) = ℓ_θ/(α_U − ℓ_U·λ₁); the
    classical max(·,·) ≤ 1 condition is reported alongside, and at the
    nonexpansive boundary the iteration is damped by ½. The frozen-aggregate
    fixed point coincides with the bilevel optimum exactly when the
    aggregate feedback vanishes (empty interactions) and is otherwise an
    O(ℓ_z·λ₁)-accurate surrogate.
    """
    u = problem.utility
    beta_u = getattr(u, "beta_u", None)
    if beta_u is None or beta_u <= 0:
        raise PreconditionError(
            "planner step requires strong concavity in the heterogeneity "
            f"(beta_U > 0, got {beta_u})"
        )
    if isinstance(u, LQUtility):
        _check_nontrivial(problem)
    matrix = problem.matrix
    theta = problem.theta
    n = theta.players
    lam1 = operator_norm_bound(matrix, exact=True)
    inner_margin = u.alpha_u - u.ell_u * lam1
    if inner_margin <= 0:
        raise PreconditionError(
            f"player game is not a certified contraction: alpha_U - ell_U*lambda1 = "
            f"{inner_margin:.6g} <= 0"
        )
    if u.ell_a is None or u.ell_z is None:
        raise ArgumentError(
            "utility model must provide the planner Lipschitz constants ell_a, ell_z"
        )
    lip_t = (u.ell_a + u.ell_z * lam1) / beta_u
    lip_n = u.ell_theta / inner_margin
    gt = max(lip_t, lip_n)
    pair = float(np.sqrt(lip_t * lip_n))
    reduced = isinstance(u, LQUtility) and u.action_set.kind == "unbounded"

    def nash(theta_total):
        if reduced:
            return solve_nash_lq(matrix, u.beta, theta_total)
        return solve_nash_fixed_point(u, matrix, theta_total, tol=tol / 10.0)

    qtable = theta.scenarios.probabilities[:, None] * theta.grid.weights[None, :]
    radius = float(np.sqrt(problem.budget))
    if problem.budget == 0.0:
        eq = nash(theta)
        welfare = average_welfare(u, matrix, eq.actions, theta)
        zero_hat = Profile.zeros(n, theta.grid, theta.scenarios)
        return GeneralInterventionSolution(
            zero_hat, eq, welfare, 0, 0.0, True, gt, pair, True,
            method="reduced" if reduced else "pair",
        )
    if reduced:
        hat, iterations, residual = _reduced_lq_ascent(problem, radius, qtable, tol, max_iters)
        method = "reduced"
    else:
        if getattr(u, "grad_heterogeneity", None) is None:
            raise ArgumentError("utility model lacks a heterogeneity gradient for the planner")
        hat, iterations, residual = _pair_alternation(
            problem, nash, radius, qtable, gt, pair, tol, max_iters
        )
        method = "pair"
    theta_hat = theta.with_values(hat)
    eta = theta.with_values(theta.values + hat)
    eq = nash(eta)
    welfare = average_welfare(u, matrix, eq.actions, eta)
    hat_norm = profile_norm(theta_hat, normalized=True)
    return GeneralInterventionSolution(
        theta_hat=theta_hat,
        equilibrium=eq,
        welfare=welfare,
        iterations=iterations,
        residual=residual,
        converged=True,
        gt_condition=gt,
        pair_contraction=pair,
        budget_active=bool(abs(hat_norm - radius) <= 100 * tol * max(1.0, radius)),
        method=method,
    )


def _reduced_lq_ascent(problem, radius, qtable, tol, max_iters):
    """Projected gradient ascent on the exact reduced LQ welfare.

    T(θ̂) = w·‖R(θ+θ̂)‖² with R = (I − (β/N)G)⁻¹ per slice; the envelope
    gradient is ∇T = 2w·R·ā (the player-FOC term vanishes at equilibrium
    and the aggregate channel folds into R). Strongly concave for w < 0;
    for w > 0 the objective is convex and the sphere-constrained ascent may
    stop at a local optimum — the spectral solver is exact there.
    """
    u = problem.utility
    matrix = problem.matrix
    theta = problem.theta
    n = matrix.n
    system = np.eye(n) - (u.beta / n) * matrix.effective()
    resolvent = np.linalg.inv(system)
    sigmas = 1.0 / np.linalg.eigvalsh(system)
    smooth = 2.0 * abs(u.w) * float(np.max(sigmas) ** 2)
    if u.w > 0:
        warnings.warn(
            "reduced LQ objective is convex for w > 0: the ascent may return a "
            "local sphere optimum; prefer solve_spectral_lq",
            stacklevel=3,
        )
    step = 1.0 / smooth

    def project(values):
        sq = float(np.einsum("ist,st->", values**2, qtable)) / n
        nrm = np.sqrt(max(sq, 0.0))
        return values * (radius / nrm) if nrm > radius else values

    flat_theta = theta.values.reshape(n, -1)
    hat = np.zeros_like(theta.values)
    residual = np.inf
    prev_actions = resolvent @ flat_theta
    for iterations in range(1, max_iters + 1):
        actions = resolvent @ (flat_theta + hat.reshape(n, -1))
        grad = (2.0 * u.w) * (resolvent @ actions).reshape(theta.values.shape)
        hat_new = project(hat + step * grad)
        d_hat = np.sqrt(np.einsum("ist,st->", (hat_new - hat) ** 2, qtable) / n)
        d_act = np.sqrt(
            np.einsum(
                "ist,st->",
                (actions - prev_actions).reshape(theta.values.shape) ** 2,
                qtable,
            )
            / n
        )
        residual = float(np.hypot(d_hat, d_act))
        hat, prev_actions = hat_new, actions
        if residual <= tol:
            return hat, iterations, residual
    raise NumericError(
        f"reduced ascent did not reach tol={tol:.3e} (residual {residual:.3e})",
        residual=residual,
    )


def _pair_alternation(problem, nash, radius, qtable, gt, pair, tol, max_iters):
    """Product-operator iteration (θ̂, a) ← (T_{z(a)}(a), N(θ̂))."""
    u = problem.utility
    matrix = problem.matrix
    theta = problem.theta
    n = theta.players
    if pair > 1.0 + 1e-9:
        raise PreconditionError(
            f"pair map is expansive: sqrt(Lip_T*Lip_N) = {pair:.6g} > 1"
        )
    damping = None
    if pair > 1.0 - 1e-9:
        warnings.warn(
            "pair contraction at the nonexpansive boundary: iterating with 1/2 "
            "damping; a fixed point exists but uniqueness is not guaranteed",
            stacklevel=3,
        )
        damping = 0.5
    if gt > 1.0:
        warnings.warn(
            f"classical condition max(Lip_T, Lip_N) = {gt:.6g} exceeds 1; relying "
            "on the sharper two-step contraction",
            stacklevel=3,
        )
    hat = np.zeros_like(theta.values)
    actions = nash(theta).actions.values
    residual = np.inf
    for iterations in range(1, max_iters + 1):
        z = np.einsum("ij,jst->ist", matrix.effective(), actions) / n
        hat_new = _planner_best_response(
            u, actions, z, theta.values, radius, qtable, tol / 10.0, max_iters=100000
        )
        actions_new = nash(theta.with_values(theta.values + hat)).actions.values
        if damping is not None:
            hat_new = (1.0 - damping) * hat + damping * hat_new
            actions_new = (1.0 - damping) * actions + damping * actions_new
        d_hat = np.sqrt(np.einsum("ist,st->", (hat_new - hat) ** 2, qtable) / n)
        d_act = np.sqrt(np.einsum("ist,st->", (actions_new - actions) ** 2, qtable) / n)
        residual = float(np.hypot(d_hat, d_act))
        hat, actions = hat_new, actions_new
        if residual <= tol:
            return hat, iterations, residual
    raise NumericError(
        f"pair iteration did not reach tol={tol:.3e} (residual {residual:.3e})",
        residual=residual,
    )


def approximate_network_intervention(theta_bar, n):
    """Project a resolution-m intervention onto an N-player network.

    Candidate i takes θ̄(i/N) — evaluated as the left limit, i.e. the value
    of the resolution cell ending at i/N, so aligned step interventions map
    back exactly — rescaled so the normalized profile norm (the budget
    functional) matches ‖θ̄‖ exactly. A zero θ̄ maps to zero.
    """
    m = theta_bar.players
    if n < 1:
        raise ArgumentError("need n >= 1 players")
    if m < n:
        raise ArgumentError(f"graphon resolution {m} must be at least the player count {n}")
    blocks = (np.arange(1, n + 1) * m + n - 1) // n - 1
    raw = theta_bar.values[blocks]
    candidate = theta_bar.with_values(raw)
    target = profile_norm(theta_bar, normalized=True)
    raw_norm = profile_norm(candidate, normalized=True)
    if target == 0.0 or raw_norm == 0.0:
        return theta_bar.with_values(np.zeros_like(raw))
    return theta_bar.with_values(raw * (target / raw_norm))
