import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from graphongames import (
    ActionSet,
    ArgumentError,
    CustomUtility,
    InteractionMatrix,
    InterventionProblem,
    LQUtility,
    PreconditionError,
    Profile,
    TrivialInterventionError,
    amplification_factors,
    approximate_network_intervention,
    budget_asymptotics,
    norm,
    profile_distance,
    profile_norm,
    project_components,
    similarity_report,
    simple_intervention,
    solve_general_intervention,
    solve_mu,
    solve_nash_lq,
    solve_spectral_lq,
    spectrum,
    step_embed,
)
from graphongames.interventions import reconstruct_components
from conftest import make_space, random_lq_instance, random_profile, random_symmetric_matrix


def _spectral_instance(rng, n_max=12, w_range=(-0.45, 0.8), budget_range=(0.05, 0.5)):
    """Random LQ intervention instance satisfying the non-triviality rule."""
    matrix, utility, theta = random_lq_instance(
        rng, n_max=n_max, spectral_cap=0.7, w_tilde_range=w_range
    )
    budget = float(rng.uniform(*budget_range))
    if utility.w < 0:
        # keep ||theta||^2 > budget so the trivial case is excluded
        nsq = profile_norm(theta, normalized=True) ** 2
        if nsq <= budget:
            theta = theta.with_values(theta.values * np.sqrt(2 * budget / nsq + 1.0))
    return InterventionProblem(utility, matrix, theta, budget)


def test_amplification_factors_examples():
    assert np.allclose(amplification_factors(np.array([0.9, 0.1]), 0.0, 4), 1.0)
    # graphon eigenvalue 1/3 with beta = 1: alpha = (1 - 1/3)^-2 = 2.25
    assert amplification_factors(np.array([1.0 / 3.0]), 1.0, 1) == pytest.approx([2.25])
    lam = np.array([0.8, 0.5, 0.1])
    alphas = amplification_factors(lam, 1.0, 1)
    assert np.all(np.diff(alphas) < 0)  # decreasing in index = increasing in lambda
    with pytest.raises(PreconditionError):
        amplification_factors(np.array([1.0]), 1.0, 1)


def test_project_components_aligned_and_parseval(unit_space):
    grid, sc = unit_space
    g = InteractionMatrix(np.array([[0.0, 1.0], [1.0, 0.0]]))
    spec = spectrum(g)
    aligned = Profile(grid, sc, np.broadcast_to(
        spec.eigenvectors[:, 0][:, None, None], (2, sc.n, grid.n_steps)).copy())
    comps, norms = project_components(spec, aligned)
    assert norms[0] > 1e-12
    assert norms[1] <= 1e-12
    rng = np.random.default_rng(1)
    p = random_profile(rng, 2, grid, sc)
    _, nn = project_components(spec, p)
    total = profile_norm(p, normalized=False) ** 2
    assert np.sum(nn**2) == pytest.approx(total, rel=1e-9)
    zeros = Profile.constant(0.0, 2, grid, sc)
    _, zn = project_components(spec, zeros)
    assert np.all(zn == 0.0)


def test_reconstruct_inverts_projection(unit_space):
    grid, sc = unit_space
    rng = np.random.default_rng(2)
    g = random_symmetric_matrix(rng, 5)
    spec = spectrum(g)
    p = random_profile(rng, 5, grid, sc)
    comps, _ = project_components(spec, p)
    back = reconstruct_components(spec, comps, p)
    assert np.allclose(back.values, p.values, atol=1e-12)


def test_solve_mu_single_component_closed_form():
    # C_B = (w/(mu-w))^2 * (||th1||^2/N); with alpha=1, w=1/2, ||th||^2/N=1:
    # mu = w (1 + 1/sqrt(C_B)); C_B = 1 -> mu = 1
    mu = solve_mu(np.array([1.0]), 0.5, np.array([1.0]), 1.0, 1)
    assert mu == pytest.approx(1.0, rel=1e-9)
    mu4 = solve_mu(np.array([1.0]), 0.5, np.array([1.0]), 0.25, 1)
    assert mu4 == pytest.approx(0.5 * (1 + 2.0), rel=1e-9)


def test_solve_mu_small_budget_diverges():
    alphas = np.array([2.0, 1.0])
    mu_small = solve_mu(alphas, 0.5, np.array([1.0, 1.0]), 1e-10, 2)
    mu_large = solve_mu(alphas, 0.5, np.array([1.0, 1.0]), 1.0, 2)
    assert mu_small > 100 * mu_large
    factors = 0.5 * alphas / (mu_small - 0.5 * alphas)
    assert np.all(np.abs(factors) < 1e-4)


@given(st.integers(min_value=0, max_value=10**6))
@settings(max_examples=25, deadline=None)
def test_solve_mu_budget_residual(seed):
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, 10))
    alphas = rng.uniform(0.5, 5.0, size=k)
    w = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.1, 2.0))
    norms_sq = rng.uniform(0.1, 2.0, size=k)
    budget = float(rng.uniform(0.01, 5.0))
    mu = solve_mu(alphas, w, norms_sq, budget, k)
    value = np.dot((w * alphas / (mu - w * alphas)) ** 2, norms_sq) / k
    assert abs(value - budget) <= 1e-8 * budget
    assert mu > np.max(w * alphas)


def test_solve_mu_argument_errors():
    with pytest.raises(ArgumentError):
        solve_mu(np.array([1.0]), 0.0, np.array([1.0]), 1.0, 1)
    with pytest.raises(ArgumentError):
        solve_mu(np.array([1.0]), 0.5, np.array([0.0]), 1.0, 1)
    with pytest.raises(ArgumentError):
        solve_mu(np.array([1.0]), 0.5, np.array([1.0]), 0.0, 1)


def test_spectral_single_player_closed_form(unit_space):
    grid, sc = unit_space
    g = InteractionMatrix(np.zeros((1, 1)))
    theta = Profile.constant(1.0, 1, grid, sc)
    budget = 0.16
    problem = InterventionProblem(LQUtility(beta=0.0, w_tilde=0.0), g, theta, budget)
    sol = solve_spectral_lq(problem)
    # theta_bar = sqrt(C_B * N) * theta / ||theta|| with ||theta|| = 1
    assert np.allclose(sol.theta_bar.values, 0.4, atol=1e-9)
    assert profile_norm(sol.theta_bar, normalized=True) ** 2 == pytest.approx(budget, rel=1e-8)


def test_spectral_eigendirection_concentrates(unit_space):
    grid, sc = unit_space
    g = InteractionMatrix(np.array([[0.0, 0.6], [0.6, 0.0]]))
    theta = Profile.constant(1.0, 2, grid, sc)  # parallel to the top eigenvector
    budget = 0.09
    problem = InterventionProblem(LQUtility(beta=0.5, w_tilde=0.1), g, theta, budget)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sol = solve_spectral_lq(problem)
    # mass concentrates in one component: theta_bar proportional to theta
    ratio = sol.theta_bar.values / theta.values
    assert np.allclose(ratio, ratio.ravel()[0])
    expected = np.sqrt(2 * budget) / profile_norm(theta, normalized=False)
    assert ratio.ravel()[0] == pytest.approx(expected, rel=1e-8)


def test_spectral_tiny_budget_vanishes(unit_space):
    grid, sc = unit_space
    rng = np.random.default_rng(3)
    g = random_symmetric_matrix(rng, 4)
    theta = random_profile(rng, 4, grid, sc, offset=1.0)
    problem = InterventionProblem(LQUtility(beta=0.4, w_tilde=0.2), g, theta, 1e-12)
    sol = solve_spectral_lq(problem)
    assert profile_norm(sol.theta_bar) <= 1e-5
    assert sol.welfare == pytest.approx(sol.baseline_welfare, rel=1e-4)


def test_spectral_trivial_case_detected(unit_space):
    grid, sc = unit_space
    g = InteractionMatrix(np.zeros((2, 2)))
    theta = Profile.constant(0.1, 2, grid, sc)  # ||theta||^2 = 0.01 <= budget
    problem = InterventionProblem(LQUtility(beta=0.0, w_tilde=-1.0), g, theta, 1.0)
    with pytest.raises(TrivialInterventionError):
        solve_spectral_lq(problem)
    with pytest.raises(TrivialInterventionError):
        solve_general_intervention(problem)


def test_spectral_zero_component_warning(unit_space):
    grid, sc = unit_space
    g = InteractionMatrix(np.array([[0.0, 0.5], [0.5, 0.0]]))
    spec = spectrum(g)
    aligned = Profile(grid, sc, np.broadcast_to(
        spec.eigenvectors[:, 0][:, None, None], (2, sc.n, grid.n_steps)).copy())
    problem = InterventionProblem(LQUtility(beta=0.3, w_tilde=0.0), g, aligned, 0.1)
    with pytest.warns(UserWarning, match="no heterogeneity mass"):
        sol = solve_spectral_lq(problem)
    assert sol.zero_components.sum() == 1


def _kkt_residual(problem, sol):
    spec = sol.eigen
    comps, _ = project_components(spec, problem.theta)
    bar_comps, _ = project_components(spec, sol.theta_bar)
    eta = comps + bar_comps
    resid = sol.w * sol.alphas[:, None, None] * eta - sol.mu * (eta - comps)
    return float(np.abs(resid).max())


@given(st.integers(min_value=0, max_value=10**6))
@settings(max_examples=25, deadline=None)
def test_spectral_kkt_budget_and_signs(seed):
    rng = np.random.default_rng(seed)
    problem = _spectral_instance(rng)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sol = solve_spectral_lq(problem)
    # budget binding
    used = profile_norm(sol.theta_bar, normalized=True) ** 2
    assert abs(used - problem.budget) <= 1e-8 * problem.budget
    # stationarity per component/scenario/time
    assert _kkt_residual(problem, sol) <= 1e-8
    # sign structure of the factors
    if sol.w > 0:
        assert np.all(sol.factors >= -1e-12)
    else:
        assert np.all(sol.factors <= 1e-12) and np.all(sol.factors >= -1.0 - 1e-12)


@given(st.integers(min_value=0, max_value=10**6))
@settings(max_examples=10, deadline=None)
def test_spectral_beats_random_feasible_perturbations(seed):
    rng = np.random.default_rng(seed)
    problem = _spectral_instance(rng, n_max=6)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sol = solve_spectral_lq(problem)
    u = problem.utility
    matrix = problem.matrix
    target = np.sqrt(problem.budget * matrix.n)
    for _ in range(100):
        noise = rng.standard_normal(sol.theta_bar.values.shape)
        cand = sol.theta_bar.values + 0.2 * noise
        cand = cand * (target / profile_norm(problem.theta.with_values(cand), normalized=False))
        eta = problem.theta.with_values(problem.theta.values + cand)
        eq = solve_nash_lq(matrix, u.beta, eta)
        welfare = u.w * profile_norm(eq.actions, normalized=True) ** 2
        assert welfare <= sol.welfare + 1e-9


@given(st.integers(min_value=0, max_value=10**6))
@settings(max_examples=15, deadline=None)
def test_cosine_similarity_identity_per_slice(seed):
    rng = np.random.default_rng(seed)
    problem = _spectral_instance(rng, n_max=8)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sol = solve_spectral_lq(problem)
    spec = sol.eigen
    theta_slices = problem.theta.values  # (N, S, T)
    bar_slices = sol.theta_bar.values
    u_mat = spec.eigenvectors
    for s in range(theta_slices.shape[1]):
        for t in range(theta_slices.shape[2]):
            th = theta_slices[:, s, t]
            bar = bar_slices[:, s, t]
            if np.linalg.norm(bar) < 1e-12 or np.linalg.norm(th) < 1e-12:
                continue
            for k in range(u_mat.shape[1]):
                lhs = (bar @ u_mat[:, k]) / np.linalg.norm(bar)
                rhs = (
                    np.linalg.norm(th)
                    / np.linalg.norm(bar)
                    * ((th @ u_mat[:, k]) / np.linalg.norm(th))
                    * sol.factors[k]
                )
                assert abs(lhs - rhs) <= 1e-8


@given(st.integers(min_value=0, max_value=10**6))
@settings(max_examples=20, deadline=None)
def test_similarity_ratio_monotonicity(seed):
    rng = np.random.default_rng(seed)
    sign = 1.0 if seed % 2 == 0 else -1.0
    matrix, utility, theta = random_lq_instance(rng, n_max=10, spectral_cap=0.7)
    beta = sign * max(abs(utility.beta), 0.05)
    adjusted = LQUtility(beta=beta, w_tilde=utility.w_tilde)
    problem = InterventionProblem(adjusted, matrix, theta, 0.2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sol = solve_spectral_lq(problem)
    report = similarity_report(sol)  # beta recovered from the solution
    assert report.monotone
    assert report.direction.startswith("nondecreasing" if beta > 0 else "nonincreasing")


def test_similarity_report_beta_zero_flat(unit_space):
    grid, sc = unit_space
    rng = np.random.default_rng(7)
    g = random_symmetric_matrix(rng, 4)
    theta = random_profile(rng, 4, grid, sc, offset=1.0)
    problem = InterventionProblem(LQUtility(beta=0.0, w_tilde=0.3), g, theta, 0.2)
    sol = solve_spectral_lq(problem)
    report = similarity_report(sol, 0.0)
    assert report.monotone
    assert np.allclose(report.abs_ratios, report.abs_ratios[0])


def test_budget_asymptotics_small(unit_space):
    grid, sc = unit_space
    rng = np.random.default_rng(9)
    g = random_symmetric_matrix(rng, 5)
    theta = random_profile(rng, 5, grid, sc, offset=1.2)
    problem = InterventionProblem(LQUtility(beta=0.6, w_tilde=0.1), g, theta, 0.5)
    report = budget_asymptotics(problem, "small", rungs=7)
    assert report.budgets[-1] == pytest.approx(1e-8)
    assert report.final_gap <= 1e-3
    assert report.gaps[-1] <= report.gaps[0] + 1e-12


def test_budget_asymptotics_large(unit_space):
    grid, sc = unit_space
    rng = np.random.default_rng(10)
    g = random_symmetric_matrix(rng, 5)
    theta = random_profile(rng, 5, grid, sc, offset=1.2)
    problem = InterventionProblem(LQUtility(beta=0.6, w_tilde=0.1), g, theta, 0.5)
    report = budget_asymptotics(problem, "large", rungs=7)
    assert report.metrics[-1] >= 0.999


def test_budget_asymptotics_beta_zero_ratios_constant(unit_space):
    grid, sc = unit_space
    rng = np.random.default_rng(11)
    g = random_symmetric_matrix(rng, 4)
    theta = random_profile(rng, 4, grid, sc, offset=1.0)
    problem = InterventionProblem(LQUtility(beta=0.0, w_tilde=0.2), g, theta, 0.3)
    report = budget_asymptotics(problem, "small", rungs=5)
    assert np.allclose(report.metrics, 0.0, atol=1e-12)


def test_budget_asymptotics_multiplicity_precondition(unit_space):
    grid, sc = unit_space
    # two identical blocks -> top eigenvalue has multiplicity 2
    g = InteractionMatrix(np.array([
        [0.0, 0.8, 0.0, 0.0],
        [0.8, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.8],
        [0.0, 0.0, 0.8, 0.0],
    ]))
    rng = np.random.default_rng(12)
    theta = random_profile(rng, 4, grid, sc, offset=1.0)
    problem = InterventionProblem(LQUtility(beta=0.5, w_tilde=0.1), g, theta, 0.2)
    with pytest.raises(PreconditionError):
        budget_asymptotics(problem, "large")


def test_simple_intervention_norm_and_degenerate_alignment(unit_space):
    grid, sc = unit_space
    g = InteractionMatrix(np.array([[0.0, 0.6], [0.6, 0.0]]))
    theta = Profile.constant(1.0, 2, grid, sc)  # exactly along the top component
    problem = InterventionProblem(LQUtility(beta=0.5, w_tilde=0.1), g, theta, 0.25)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        result = simple_intervention(problem)
    assert profile_norm(result.theta_hat, normalized=True) ** 2 == pytest.approx(0.25, rel=1e-12)
    assert result.ratio == pytest.approx(1.0, rel=1e-10)
    assert result.alignment == pytest.approx(1.0, rel=1e-10)


@given(st.integers(min_value=0, max_value=10**6))
@settings(max_examples=10, deadline=None)
def test_simple_intervention_threshold_property(seed):
    rng = np.random.default_rng(seed)
    matrix, utility, theta = random_lq_instance(
        rng, n_max=8, spectral_cap=0.7, w_tilde_range=(-0.3, 0.6)
    )
    beta = abs(utility.beta) + 0.05
    u = LQUtility(beta=beta, w_tilde=utility.w_tilde)
    spec = spectrum(matrix)
    alphas = amplification_factors(spec, beta, matrix.n, scale=matrix.scale)
    from graphongames import group_eigenvalues

    groups = group_eigenvalues(spec.eigenvalues)
    if len(groups) < 2 or len(groups[0][1]) != 1:
        return
    a1 = alphas[groups[0][1][0]]
    a2 = alphas[groups[1][1][0]]
    delta = 0.1
    threshold = 2.0 / delta * profile_norm(theta, normalized=True) ** 2 * (a2 / (a1 - a2)) ** 2
    problem = InterventionProblem(u, matrix, theta, 2.0 * threshold)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        result = simple_intervention(problem)
    assert result.ratio < 1.0 + delta
    assert result.alignment > np.sqrt(1.0 - delta)
    assert result.delta_implied == pytest.approx(delta / 2.0, rel=1e-9)


def test_general_zero_budget_returns_baseline(unit_space):
    grid, sc = unit_space
    rng = np.random.default_rng(13)
    g = random_symmetric_matrix(rng, 3)
    theta = random_profile(rng, 3, grid, sc, offset=1.0)
    problem = InterventionProblem(LQUtility(beta=0.3, w_tilde=-1.0), g, theta, 0.0)
    sol = solve_general_intervention(problem)
    assert np.all(sol.theta_hat.values == 0.0)
    baseline = solve_nash_lq(g, 0.3, theta)
    assert np.allclose(sol.equilibrium.actions.values, baseline.actions.values)


@given(st.integers(min_value=0, max_value=10**6))
@settings(max_examples=12, deadline=None)
def test_general_matches_spectral_on_lq(seed):
    rng = np.random.default_rng(seed)
    matrix, utility, theta = random_lq_instance(
        rng, n_max=8, spectral_cap=0.5, w_tilde_range=(-2.5, -1.2)
    )
    budget = float(rng.uniform(0.05, 0.3))
    nsq = profile_norm(theta, normalized=True) ** 2
    if nsq <= budget:
        theta = theta.with_values(theta.values * np.sqrt((budget + 1.0) / nsq))
    problem = InterventionProblem(utility, matrix, theta, budget)
    spec_sol = solve_spectral_lq(problem)
    gen_sol = solve_general_intervention(problem, tol=1e-11)
    assert gen_sol.method == "reduced"
    assert gen_sol.welfare >= spec_sol.welfare - 1e-4
    assert profile_distance(spec_sol.theta_bar, gen_sol.theta_hat) <= 1e-3
    assert profile_norm(gen_sol.theta_hat, normalized=True) ** 2 <= budget + 1e-10
    assert gen_sol.budget_active


def test_general_pair_route_no_interaction_matches_analytic(unit_space):
    # custom strongly concave utility, empty graph: the product-operator fixed
    # point is the true optimum -theta scaled to the sphere
    grid, sc = unit_space

    def value(a, z, th, qt):
        return np.einsum("...st,st->...", a * th, qt) - 0.5 * np.einsum(
            "...st,st->...", a * a, qt
        ) - 1.0 * np.einsum("...st,st->...", th * th, qt)

    def grad_a(a, z, th, qt):
        return th - a

    def grad_th(a, z, th, qt):
        return a - 2.0 * th

    u = CustomUtility(
        value_fn=value,
        grad_action_fn=grad_a,
        alpha_u=1.0,
        ell_u=0.0,
        ell_theta=1.0,
        smoothness=1.0,
        grad_heterogeneity_fn=grad_th,
        beta_u=2.0,
        ell_a=1.0,
        ell_z=0.0,
    )
    g = InteractionMatrix(np.zeros((3, 3)))
    theta = Profile.constant(1.0, 3, grid, sc)
    budget = 0.25
    problem = InterventionProblem(u, g, theta, budget)
    sol = solve_general_intervention(problem, tol=1e-11)
    assert sol.method == "pair"
    # optimum shrinks theta toward zero along -theta with full budget
    expected = -np.sqrt(budget) * theta.values / norm(theta.process(0))
    assert np.allclose(sol.theta_hat.values, expected, atol=1e-7)
    assert sol.budget_active


def test_general_pair_route_expansive_precondition(unit_space):
    grid, sc = unit_space

    def grad_th(a, z, th, qt):
        return a - 0.1 * th

    u = CustomUtility(
        value_fn=lambda a, z, th, qt: np.zeros(a.shape[0]),
        grad_action_fn=lambda a, z, th, qt: th - a,
        alpha_u=1.0,
        ell_u=0.0,
        ell_theta=1.0,
        smoothness=1.0,
        grad_heterogeneity_fn=grad_th,
        beta_u=0.1,
        ell_a=1.0,
        ell_z=0.0,
    )
    g = InteractionMatrix(np.zeros((2, 2)))
    theta = Profile.constant(1.0, 2, grid, sc)
    problem = InterventionProblem(u, g, theta, 0.5)
    with pytest.raises(PreconditionError, match="expansive"):
        solve_general_intervention(problem)


def test_approximate_network_intervention_constant_and_norm(unit_space):
    grid, sc = unit_space
    const = Profile.constant(0.7, 12, grid, sc)
    candidate = approximate_network_intervention(const, 4)
    assert np.allclose(candidate.values, 0.7)
    assert profile_norm(candidate, normalized=True) == pytest.approx(
        profile_norm(const, normalized=True), rel=1e-14
    )
    rng = np.random.default_rng(14)
    rich = random_profile(rng, 12, grid, sc)
    cand = approximate_network_intervention(rich, 5)
    assert cand.players == 5
    assert profile_norm(cand, normalized=True) == pytest.approx(
        profile_norm(rich, normalized=True), rel=1e-12
    )
    zero = Profile.constant(0.0, 12, grid, sc)
    assert np.all(approximate_network_intervention(zero, 4).values == 0.0)


def test_approximate_network_intervention_aligned_exact(unit_space):
    grid, sc = unit_space
    rng = np.random.default_rng(15)
    coarse = random_profile(rng, 4, grid, sc)
    fine = step_embed(coarse, 16)
    back = approximate_network_intervention(fine, 4)
    assert np.allclose(back.values, coarse.values, atol=1e-13)


def test_graphon_structure_problem_discretizes(unit_space):
    from graphongames import Graphon

    grid, sc = unit_space
    m = 24
    theta = Profile.constant(1.0, m, grid, sc)
    problem = InterventionProblem(LQUtility(beta=0.6, w_tilde=0.1), Graphon.constant(0.5), theta, 0.2)
    assert problem.matrix.n == m
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sol = solve_spectral_lq(problem)
    # constant graphon, constant theta: single active component, factor
    # sqrt(C_B)/||theta||_{A^infinity} and theta_bar proportional to theta
    expected = np.sqrt(0.2) / profile_norm(theta, normalized=True)
    assert np.allclose(sol.theta_bar.values, expected, rtol=1e-8)


def test_density_scaled_matrix_equivalent_to_scaled_beta(unit_space):
    # entries E with scale s and strategic parameter b act exactly like
    # entries E, scale 1, parameter s*b — equilibria and interventions agree
    grid, sc = unit_space
    rng = np.random.default_rng(16)
    entries = random_symmetric_matrix(rng, 5).entries
    scaled = InteractionMatrix(entries, scale=2.0)
    plain = InteractionMatrix(entries, scale=1.0)
    theta = random_profile(rng, 5, grid, sc, offset=1.0)
    beta = 0.3
    eq_scaled = solve_nash_lq(scaled, beta, theta)
    eq_plain = solve_nash_lq(plain, 2.0 * beta, theta)
    assert np.allclose(eq_scaled.actions.values, eq_plain.actions.values, atol=1e-12)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sol_scaled = solve_spectral_lq(
            InterventionProblem(LQUtility(beta=beta, w_tilde=0.2), scaled, theta, 0.2)
        )
        sol_plain = solve_spectral_lq(
            InterventionProblem(LQUtility(beta=2.0 * beta, w_tilde=0.2), plain, theta, 0.2)
        )
    assert np.allclose(sol_scaled.theta_bar.values, sol_plain.theta_bar.values, atol=1e-9)
    assert sol_scaled.mu == pytest.approx(sol_plain.mu, rel=1e-9)


def test_intervention_problem_validation(unit_space):
    grid, sc = unit_space
    g = InteractionMatrix(np.zeros((2, 2)))
    theta = Profile.constant(1.0, 2, grid, sc)
    with pytest.raises(ArgumentError):
        InterventionProblem(LQUtility(beta=0.0), g, theta, -1.0)
    with pytest.raises(ArgumentError):
        InterventionProblem(LQUtility(beta=0.0), InteractionMatrix(np.zeros((3, 3))), theta, 1.0)
    with pytest.raises(ArgumentError):
        solve_spectral_lq(
            InterventionProblem(
                LQUtility(beta=0.0, action_set=ActionSet.ball(1.0)), g, theta, 1.0
            )
        )
