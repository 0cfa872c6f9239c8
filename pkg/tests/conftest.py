import numpy as np
import pytest

from graphongames import (
    InteractionMatrix,
    LQUtility,
    Profile,
    ScenarioSet,
    TimeGrid,
)


@pytest.fixture
def unit_space():
    return TimeGrid.uniform(1.0, 4), ScenarioSet.uniform(2)


def make_space(horizon=1.0, n_steps=4, n_scenarios=2):
    return TimeGrid.uniform(horizon, n_steps), ScenarioSet.uniform(n_scenarios)


def random_profile(rng, players, grid, scenarios, scale=1.0, offset=0.0):
    values = offset + scale * rng.standard_normal((players, scenarios.n, grid.n_steps))
    return Profile(grid, scenarios, values)


def random_symmetric_matrix(rng, n, density=1.0, hollow=True):
    raw = rng.uniform(0.0, 1.0, size=(n, n))
    mask = rng.uniform(size=(n, n)) < density
    raw = raw * mask
    sym = np.triu(raw, k=1)
    sym = sym + sym.T
    if not hollow:
        diag = rng.uniform(0.0, 1.0, size=n)
        sym = sym + np.diag(diag)
    return InteractionMatrix(sym)


def random_lq_instance(rng, n_max=50, spectral_cap=0.8, w_tilde_range=(-0.4, 1.0),
                       n_scen_max=4, n_t_max=16):
    """Random LQ game with |beta|*lambda1(G)/N bounded by spectral_cap."""
    n = int(rng.integers(2, n_max + 1))
    grid = TimeGrid.uniform(float(rng.uniform(0.5, 2.0)), int(rng.integers(1, n_t_max + 1)))
    scenarios = ScenarioSet.uniform(int(rng.integers(1, n_scen_max + 1)))
    matrix = random_symmetric_matrix(rng, n)
    lam1 = float(np.max(np.abs(np.linalg.eigvalsh(matrix.entries))))
    if lam1 <= 1e-9:
        beta = float(rng.uniform(-2.0, 2.0))
    else:
        cap = spectral_cap * n / lam1
        beta = float(rng.uniform(-cap, cap))
    w_tilde = float(rng.uniform(*w_tilde_range))
    utility = LQUtility(beta=beta, w_tilde=w_tilde)
    theta = random_profile(rng, n, grid, scenarios, scale=0.6, offset=1.0)
    return matrix, utility, theta
