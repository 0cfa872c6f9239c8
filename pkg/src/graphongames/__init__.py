"""Solvers for dynamic network games, their graphon limits, and targeted
interventions: Nash equilibria by contraction or exact linear solve,
spectral and fixed-point planner solvers, and convergence experiments."""

from .core import (
    Process,
    Profile,
    ScenarioSet,
    TimeGrid,
    inner_product,
    make_heterogeneity,
    norm,
    profile_distance,
    profile_norm,
    step_embed,
    step_profile_distance,
)
from .errors import (
    ArgumentError,
    CapabilityError,
    GraphonGamesError,
    NumericError,
    PreconditionError,
    ShapeError,
    TrivialInterventionError,
)
from .games import (
    ActionSet,
    CustomUtility,
    LQUtility,
    NashSolution,
    average_welfare,
    best_response,
    lq_closed_form_welfare,
    solve_nash_fixed_point,
    solve_nash_lq,
)
from .graphs import (
    Graphon,
    InteractionMatrix,
    SpectralDecomposition,
    apply_operator,
    cut_norm,
    graphon_lambda1,
    group_eigenvalues,
    local_aggregate,
    op_norm_diff,
    sample_simple,
    sample_weighted,
    sampling_bound,
    spectrum,
    step_graphon,
)
from .interventions import (
    GeneralInterventionSolution,
    InterventionProblem,
    SpectralInterventionSolution,
    amplification_factors,
    approximate_network_intervention,
    budget_asymptotics,
    project_components,
    similarity_report,
    simple_intervention,
    solve_general_intervention,
    solve_mu,
    solve_spectral_lq,
)
from .experiments import (
    ConvergenceReport,
    ExperimentConfig,
    HeterogeneityField,
    RateEstimate,
    estimate_rate,
    run_equilibrium_convergence,
    run_intervention_convergence,
)

__version__ = "0.1.0"
