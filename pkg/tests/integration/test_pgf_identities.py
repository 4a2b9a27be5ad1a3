from __future__ import annotations

import math

import numpy as np
import pytest

from src.dispersion.equilibria import nu_of_mu
from src.dispersion.meanfield import Trajectory, solve
from src.dispersion.pgf import (
    contraction_constant,
    explicit_pgf,
    lipschitz_margin,
    phi,
    phi_c,
    pgf_eval,
    v_bounds,
    v_from_trajectory,
    volterra_residual,
)
from src.dispersion.pmf import delta
from src.workflows.meanfield.pgf_check import unit_circle_shift


@pytest.fixture(scope="module")
def long_run() -> Trajectory:
    return solve(delta(2, 100), 2.0, t_end=20.0, dt=0.01)


def test_v_reaches_equilibrium_value(long_run: Trajectory) -> None:
    aux = v_from_trajectory(long_run)
    assert abs(aux.v_series[-1] - math.exp(nu_of_mu(2.0))) <= 1e-4


def test_v_bounds_hold_on_grid(long_run: Trajectory) -> None:
    aux = v_from_trajectory(long_run)
    lower, upper = v_bounds(aux.times, 2.0)
    assert np.all(aux.log_v >= lower - 1e-12)
    assert np.all(aux.log_v <= upper + 1e-12)


@pytest.mark.parametrize(("dt", "tolerance"), [(0.01, 5e-3), (0.005, 1.5e-3)])
def test_volterra_residual_shrinks_with_grid(dt: float, tolerance: float) -> None:
    traj = solve(delta(2, 100), 2.0, t_end=10.0, dt=dt)
    residual = volterra_residual(traj, v_from_trajectory(traj))
    assert residual.max() <= tolerance


@pytest.mark.parametrize("t", [1.0, 5.0])
def test_explicit_pgf_matches_direct_evaluation(long_run: Trajectory, t: float) -> None:
    aux = v_from_trajectory(long_run)
    z = unit_circle_shift(16)
    idx = long_run.index_of(t)
    assert idx is not None

    direct = np.asarray(pgf_eval(long_run.pmf(idx), 1.0 - z))
    formula = np.asarray(explicit_pgf(t, z, long_run.initial, aux))
    assert np.max(np.abs(direct - formula)) <= 1e-4


@pytest.mark.parametrize("mu", [1.5, 2.0, 3.0])
def test_squeeze_map_fixed_point_and_contraction(mu: float) -> None:
    fixed = math.exp(nu_of_mu(mu))
    assert abs(phi(fixed, mu) - fixed) <= 1e-11

    x = np.linspace(math.exp(mu - 1.0), math.exp(mu), 2001)
    slopes = np.abs(np.diff(phi(x, mu))) / np.diff(x)
    bound = contraction_constant(mu)
    assert bound < 1.0
    assert slopes.max() <= bound + 1e-6


@pytest.mark.parametrize("c", [0.2, 0.5, 0.8])
def test_weighted_squeeze_map_lipschitz(c: float) -> None:
    mu = 2.0
    eps = lipschitz_margin(mu, c)
    x = np.linspace(math.exp(nu_of_mu(mu)) - eps / mu, math.exp(mu), 101)
    h = 1e-5
    slopes = [(phi_c(xi + h, mu, c) - phi_c(xi - h, mu, c)) / (2.0 * h) for xi in x]
    assert max(slopes) <= 1.0 - eps + 1e-6
