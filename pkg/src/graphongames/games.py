"""Utility models, best responses, and Nash equilibrium solvers.

Players maximize U(own action, local aggregate, heterogeneity) over their
action set. Under strong concavity the best-response map composed with the
interaction operator is a contraction whenever ℓ_U·λ₁ < α_U, which drives
the fixed-point solver; linear-quadratic games additionally admit the exact
linear-solve equilibrium.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Profile, profile_distance, profile_norm
from .errors import ArgumentError, NumericError, PreconditionError, ShapeError
from .graphs import Graphon, InteractionMatrix, apply_operator, graphon_lambda1, local_aggregate

__all__ = [
    "ActionSet",
    "LQUtility",
    "CustomUtility",
    "NashSolution",
    "best_response",
    "solve_nash_fixed_point",
    "solve_nash_lq",
    "average_welfare",
    "lq_closed_form_welfare",
    "operator_norm_bound",
]

# safety margin applied to power-iteration eigenvalue estimates of analytic
# graphons before the contraction check (discretization bias)
_GRAPHON_MARGIN = 0.01


@dataclass(frozen=True)
class ActionSet:
    """Admissible action set: the whole space or a centered norm ball."""

    kind: str = "unbounded"
    radius: float = np.inf

    def __post_init__(self):
        if self.kind not in ("unbounded", "ball"):
            raise ArgumentError(f"unknown action set kind {self.kind!r}")
        if self.kind == "ball" and not self.radius > 0:
            raise ArgumentError("ball radius must be positive")

    @staticmethod
    def unbounded():
        return ActionSet("unbounded")

    @staticmethod
    def ball(radius):
        return ActionSet("ball", float(radius))

    def project(self, values, qtable):
        """Radial projection of per-player slices onto the ball (A-norm)."""
        if self.kind == "unbounded":
            return values
        sq = np.einsum("...st,st->...", values**2, qtable)
        nrm = np.sqrt(np.maximum(sq, 0.0))
        factor = np.where(nrm > self.radius, self.radius / np.maximum(nrm, 1e-300), 1.0)
        return values * factor[..., None, None]


def _qtable(obj):
    return obj.scenarios.probabilities[:, None] * obj.grid.weights[None, :]


def _pair_inner(x, y, qtable):
    return np.einsum("...st,st->...", x * y, qtable)


@dataclass(frozen=True)
class LQUtility:
    """Linear-quadratic utility with pure externalities.

    U(a, z, θ) = ⟨a, θ + β·z⟩ − ½‖a‖² + w̃·‖θ + β·z‖²

    β > 0 gives strategic complements, β < 0 substitutes. The externality
    term contributes w̃·‖ā‖² to the per-capita equilibrium welfare, so the
    welfare weight is w = w̃ + ½ and the planner's objective reduces to
    w·(normalized profile norm)² at equilibrium.
    """

    beta: float
    w_tilde: float = 0.0
    action_set: ActionSet = field(default_factory=ActionSet.unbounded)

    # strong concavity / Lipschitz constants of the gradient in (z, θ)
    @property
    def alpha_u(self):
        return 1.0

    @property
    def ell_u(self):
        return abs(self.beta)

    @property
    def ell_theta(self):
        return 1.0

    @property
    def smoothness(self):
        return 1.0

    @property
    def w(self):
        """Per-capita equilibrium welfare weight."""
        return self.w_tilde + 0.5

    # planner-side constants (strong concavity in θ requires w̃ < 0)
    @property
    def beta_u(self):
        return -2.0 * self.w_tilde

    @property
    def ell_a(self):
        return 1.0

    @property
    def ell_z(self):
        return 2.0 * abs(self.w_tilde * self.beta)

    @property
    def ell_0(self):
        return 1.0 + 2.0 * abs(self.w_tilde)

    def value(self, a, z, theta, qtable):
        ret = theta + self.beta * z
        return (
            _pair_inner(a, ret, qtable)
            - 0.5 * _pair_inner(a, a, qtable)
            + self.w_tilde * _pair_inner(ret, ret, qtable)
        )

    def grad_action(self, a, z, theta, qtable):
        return theta + self.beta * z - a

    def grad_heterogeneity(self, a, z, theta, qtable):
        return a + 2.0 * self.w_tilde * (theta + self.beta * z)

    def closed_form_best_response(self, z, theta, qtable):
        """Unconstrained maximizer θ + β·z, projected onto the action ball
        (the objective is ½‖θ+βz‖² − ½‖a − (θ+βz)‖², so projection is exact)."""
        return self.action_set.project(theta + self.beta * z, qtable)


@dataclass(frozen=True)
class CustomUtility:
    """General concave utility assembled from callables.

    Callables receive stacked value arrays (..., scenarios, steps) and the
    quadrature table; gradients are Gâteaux gradients in the A inner
    product. Planner extensions (grad_heterogeneity_fn with β_U, ℓ_a, ℓ_z)
    are optional and only needed by the general intervention solver.
    """

    value_fn: object
    grad_action_fn: object
    alpha_u: float
    ell_u: float
    ell_theta: float
    smoothness: float
    action_set: ActionSet = field(default_factory=ActionSet.unbounded)
    grad_heterogeneity_fn: object = None
    beta_u: float | None = None
    ell_a: float | None = None
    ell_z: float | None = None
    ell_0: float | None = None

    def __post_init__(self):
        if self.alpha_u <= 0:
            raise ArgumentError("strong concavity constant must be positive")
        if self.smoothness < self.alpha_u:
            raise ArgumentError("smoothness constant cannot be below the concavity constant")

    def value(self, a, z, theta, qtable):
        return self.value_fn(a, z, theta, qtable)

    def grad_action(self, a, z, theta, qtable):
        return self.grad_action_fn(a, z, theta, qtable)

    def grad_heterogeneity(self, a, z, theta, qtable):
        if self.grad_heterogeneity_fn is None:
            raise ArgumentError("utility model does not provide a heterogeneity gradient")
        return self.grad_heterogeneity_fn(a, z, theta, qtable)

    closed_form_best_response = None


def _best_response_values(utility, z, theta, qtable, tol_br, max_iters):
    """Maximize U(·, z, θ) over the action set; stacked over leading axes.

    Projected gradient ascent with step 1/L, stopping when the gradient-map
    norm drops below tol_br; linear-quadratic models short-circuit to the
    exact first-order solution.
    """
    cf = getattr(utility, "closed_form_best_response", None)
    if cf is not None:
        return cf(z, theta, qtable)
    step = 1.0 / utility.smoothness
    a = np.zeros_like(theta)
    residual = np.inf
    for _ in range(max_iters):
        grad = utility.grad_action(a, z, theta, qtable)
        a_next = utility.action_set.project(a + step * grad, qtable)
        gap = (a - a_next) / step
        residual = float(np.sqrt(np.max(_pair_inner(gap, gap, qtable))))
        a = a_next
        if residual <= tol_br:
            return a
    raise NumericError(
        f"best response did not converge (gradient-map norm {residual:.3e})",
        residual=residual,
    )


def best_response(utility, z, theta, tol_br=1e-10, max_iters=100000):
    """Best response of a single player to aggregate z and heterogeneity θ."""
    if z.values.shape != theta.values.shape:
        raise ShapeError("aggregate and heterogeneity must share a shape")
    qtable = _qtable(theta)
    values = _best_response_values(
        utility, z.values[None], theta.values[None], qtable, tol_br, max_iters
    )
    return theta.with_values(values[0])


@dataclass(frozen=True)
class NashSolution:
    """Equilibrium profile with solver diagnostics."""

    actions: Profile
    aggregate: Profile
    iterations: int
    residual: float
    contraction_factor: float
    iteration_ratios: tuple = ()

    @property
    def error_bound(self):
        """Banach a-posteriori bound ‖a_k − a*‖ ≤ q/(1−q)·residual."""
        q = self.contraction_factor
        if 0.0 <= q < 1.0:
            return self.residual * q / (1.0 - q)
        return np.inf


def operator_norm_bound(structure, exact=False):
    """Operator norm of the aggregation map a ↦ z(a).

    Matrices: scale·λ₁(G)/N (row-sum bound unless `exact`, then eigenvalues;
    Perron makes λ₁ the spectral radius for nonnegative entries). Graphons:
    power-iteration estimate inflated by a 1% discretization margin.
    """
    if isinstance(structure, InteractionMatrix):
        eff = structure.effective()
        bound = float(np.abs(eff).sum(axis=1).max()) / structure.n
        if not exact:
            return bound
        eigs = np.linalg.eigvalsh(eff)
        return float(np.max(np.abs(eigs))) / structure.n
    if isinstance(structure, Graphon):
        return graphon_lambda1(structure) * (1.0 + _GRAPHON_MARGIN)
    raise ArgumentError("structure must be an InteractionMatrix or a Graphon")


def _aggregator(structure):
    if isinstance(structure, InteractionMatrix):
        return lambda profile: local_aggregate(structure, profile)
    if isinstance(structure, Graphon):
        return lambda profile: apply_operator(structure, profile)
    raise ArgumentError("structure must be an InteractionMatrix or a Graphon")


def solve_nash_fixed_point(utility, structure, theta, tol=1e-10, max_iters=2000, tol_br=None):
    """Nash equilibrium by iterating best responses on the aggregate.

    Starts from the zero profile and iterates a ← B_θ(z(a)) until the
    successive-iterate profile distance (normalized norm) drops below tol.
    Requires the contraction condition ℓ_U·λ₁ < α_U; the iteration then
    converges geometrically at rate ℓ_U·λ₁/α_U.
    """
    if isinstance(structure, InteractionMatrix) and structure.n != theta.players:
        raise ShapeError("heterogeneity profile does not match the player count")
    lam1 = operator_norm_bound(structure)
    q = utility.ell_u * lam1 / utility.alpha_u
    if q >= 1.0 and isinstance(structure, InteractionMatrix):
        lam1 = operator_norm_bound(structure, exact=True)
        q = utility.ell_u * lam1 / utility.alpha_u
    if q >= 1.0:
        raise PreconditionError(
            f"contraction condition violated: ell_U={utility.ell_u:.6g} * "
            f"lambda1={lam1:.6g} >= alpha_U={utility.alpha_u:.6g}"
        )
    if tol_br is None:
        tol_br = tol / 10.0
    aggregate = _aggregator(structure)
    qtable = _qtable(theta)
    a = Profile.zeros(theta.players, theta.grid, theta.scenarios)
    residual = np.inf
    ratios = []
    prev_residual = None
    for k in range(1, max_iters + 1):
        z = aggregate(a)
        values = _best_response_values(
            utility, z.values, theta.values, qtable, tol_br, max_iters=100000
        )
        a_next = theta.with_values(values)
        residual = profile_distance(a_next, a, normalized=True)
        if prev_residual is not None and prev_residual > 0:
            ratios.append(residual / prev_residual)
        prev_residual = residual
        a = a_next
        if residual <= tol:
            return NashSolution(a, aggregate(a), k, residual, q, tuple(ratios))
    raise NumericError(
        f"fixed-point iteration did not reach tol={tol:.3e} "
        f"(last residual {residual:.3e})",
        residual=residual,
    )


def solve_nash_lq(matrix, beta, theta):
    """Exact linear-quadratic equilibrium: solve (I − (β/N)·G)·ā = θ.

    The system matrix is independent of scenario and time step, so one
    factorization covers every slice. Requires all eigenvalues of the
    system matrix positive (β·λ_k·scale < N for every eigenvalue λ_k).
    """
    if matrix.n != theta.players:
        raise ShapeError("heterogeneity profile does not match the player count")
    n = matrix.n
    eff = matrix.effective()
    system = np.eye(n) - (beta / n) * eff
    # cheap diagonal-dominance certificate, exact spectrum only as fallback
    off = np.abs(system).sum(axis=1) - np.abs(np.diag(system))
    if not np.all(np.diag(system) - off > 0):
        lam = np.linalg.eigvalsh(eff)
        margins = 1.0 - beta * lam / n
        if np.min(margins) <= 0:
            raise PreconditionError(
                f"spectral condition violated: min(1 - beta*lambda/N) = "
                f"{np.min(margins):.6g} <= 0 (beta={beta:.6g})"
            )
    flat = theta.values.reshape(n, -1)
    solved = np.linalg.solve(system, flat)
    actions = theta.with_values(solved.reshape(theta.values.shape))
    aggregate = local_aggregate(matrix, actions)
    defect = actions.values - theta.values - beta * aggregate.values
    residual = profile_norm(theta.with_values(defect), normalized=True)
    q = abs(beta) * operator_norm_bound(matrix)
    return NashSolution(actions, aggregate, 0, residual, q)


def average_welfare(utility, structure, actions, theta):
    """Average utility (1/N)·Σᵢ U(aⁱ, zⁱ(a), θⁱ) of a candidate profile."""
    if actions.values.shape != theta.values.shape:
        raise ShapeError("actions and heterogeneity must match")
    z = _aggregator(structure)(actions)
    qtable = _qtable(actions)
    per_player = utility.value(actions.values, z.values, theta.values, qtable)
    return float(np.mean(per_player))


def lq_closed_form_welfare(utility, actions):
    """Equilibrium welfare shortcut w·(normalized ‖ā‖)² for LQ utilities.

    Agrees with `average_welfare` exactly when `actions` is the equilibrium
    of the game it came from.
    """
    if not isinstance(utility, LQUtility):
        raise ArgumentError("closed-form welfare only applies to LQ utilities")
    return utility.w * profile_norm(actions, normalized=True) ** 2
