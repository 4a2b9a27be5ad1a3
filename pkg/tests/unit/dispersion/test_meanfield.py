from __future__ import annotations

from typing import TYPE_CHECKING
from unittest.mock import MagicMock, patch

import numpy as np
import pytest

from src.dispersion.equilibria import bernoulli_equilibrium, ztp_equilibrium
from src.dispersion.exceptions import MeanMismatchError, NonUniformSamplingError, OutOfDomainError, StepUnstableError
from src.dispersion.initial_conditions import split, two_point
from src.dispersion.meanfield import (
    Trajectory,
    conservation_errors,
    energy,
    energy_decay_bound,
    energy_derivative_residual,
    generator,
    max_stable_dt,
    rk4_step,
    solve,
    uniform_spacing,
)
from src.dispersion.metrics import ell1_dist
from src.dispersion.pmf import delta, make_pmf, moment

if TYPE_CHECKING:
    from src.dispersion.pmf import Pmf


def test_generator_point_mass() -> None:
    np.testing.assert_allclose(generator(delta(2, 6), 2.0), [0.0, 2.0, -4.0, 2.0, 0.0, 0.0, 0.0])


def test_generator_bernoulli_is_zero() -> None:
    assert not np.any(generator(bernoulli_equilibrium(0.8).pmf, 0.8))


def test_generator_ztp_residual() -> None:
    assert np.max(np.abs(generator(ztp_equilibrium(2.0, 60).pmf, 2.0))) < 1e-10


@pytest.mark.parametrize("mu", [1.5, 2.0, 3.5])
def test_generator_conserves_mass_and_mean_at_the_boundary(mu: float) -> None:
    # mass sits on the last row so the closure is active
    n_max = 6
    w = np.zeros(n_max + 1)
    w[0] = 1.0 - mu / n_max
    w[n_max] = mu / n_max
    f = generator(make_pmf(w), mu)
    n = np.arange(n_max + 1)
    assert abs(f.sum()) < 1e-14
    assert abs(n @ f) < 1e-13


def test_generator_rejects_non_positive_mu() -> None:
    with pytest.raises(OutOfDomainError):
        generator(delta(1, 3), 0.0)


def test_rk4_step_keeps_equilibrium() -> None:
    p = bernoulli_equilibrium(0.8).pmf
    np.testing.assert_allclose(rk4_step(p, 0.8, 0.01).weights, p.weights, atol=1e-15)


def test_rk4_step_conserves() -> None:
    q = rk4_step(delta(2, 20), 2.0, 0.01)
    assert q.mass == pytest.approx(1.0, abs=1e-12)
    assert moment(q, 1) == pytest.approx(2.0, abs=1e-12)
    assert q[1] == pytest.approx(0.0198, abs=5e-4)


def _half_step_gap(dt: float) -> float:
    full = rk4_step(delta(2, 20), 2.0, dt)
    half = rk4_step(rk4_step(delta(2, 20), 2.0, dt / 2), 2.0, dt / 2)
    return float(np.max(np.abs(full.weights - half.weights)))


def test_rk4_step_matches_two_half_steps() -> None:
    assert _half_step_gap(0.01) < 2e-8  # noqa: PLR2004


def test_rk4_step_local_error_is_fifth_order() -> None:
    ratio = _half_step_gap(0.01) / _half_step_gap(0.005)
    assert 24.0 < ratio < 40.0  # noqa: PLR2004


def test_rk4_step_rejects_large_step() -> None:
    with pytest.raises(StepUnstableError) as exc:
        rk4_step(delta(2, 100), 2.0, 0.05)
    assert exc.value.suggested_dt == pytest.approx(0.005)


def test_max_stable_dt_admits_reference_set_up() -> None:
    assert max_stable_dt(2.0, 100) > 0.01  # noqa: PLR2004
    assert max_stable_dt(2.0, 1000) < 0.01  # noqa: PLR2004


def test_solve_records_every_k_steps_and_final_time() -> None:
    traj = solve(delta(2, 20), 2.0, t_end=1.0, dt=0.01, record_every=10)
    assert len(traj) == 11  # noqa: PLR2004
    np.testing.assert_allclose(traj.times, np.linspace(0.0, 1.0, 11), atol=1e-12)


def test_solve_shortens_the_last_step() -> None:
    traj = solve(delta(2, 20), 2.0, t_end=0.025, dt=0.01)
    np.testing.assert_allclose(traj.times, [0.0, 0.01, 0.02, 0.025])


def test_solve_conserves_and_tracks_active_particles() -> None:
    traj = solve(delta(2, 40), 2.0, t_end=2.0, dt=0.01)
    mass, mean = conservation_errors(traj)
    assert mass <= 1e-8
    assert mean <= 1e-8
    assert np.min(traj.states) >= -1e-10
    np.testing.assert_allclose(traj.a_series, 2.0 - traj.p1_series, atol=1e-12)


def test_solve_equilibrium_is_constant() -> None:
    p = bernoulli_equilibrium(0.8).pmf
    traj = solve(p, 0.8, t_end=1.0)
    np.testing.assert_array_equal(traj.states, np.tile(p.weights, (len(traj), 1)))
    assert np.all(energy_derivative_residual(traj, 0.8) < 1e-12)


def test_solve_subcritical_split_converges() -> None:
    traj = solve(split(100, 0.008, 100), 0.8, t_end=10.0)
    assert ell1_dist(traj.final, bernoulli_equilibrium(0.8).pmf) < 0.02  # noqa: PLR2004


@pytest.mark.parametrize(("p0", "mu"), [(delta(2, 100), 2.0), (split(100, 0.008, 100), 0.8)], ids=["delta", "split"])
def test_solve_halving_the_step(p0: Pmf, mu: float) -> None:
    coarse = solve(p0, mu, t_end=10.0, dt=0.01).final
    fine = solve(p0, mu, t_end=10.0, dt=0.005).final
    assert ell1_dist(coarse, fine) < 1e-9  # noqa: PLR2004


def test_solve_rejects_mean_mismatch() -> None:
    with pytest.raises(MeanMismatchError):
        solve(delta(2, 10), 2.1, t_end=1.0)


@pytest.mark.parametrize(("t_end", "record_every"), [(0.0, 1), (1.0, 0)])
def test_solve_rejects_bad_arguments(t_end: float, record_every: int) -> None:
    with pytest.raises(OutOfDomainError):
        solve(delta(2, 10), 2.0, t_end=t_end, record_every=record_every)


@patch("src.dispersion.meanfield._logger")
def test_solve_warns_about_truncated_tail(mock_logger: MagicMock) -> None:
    solve(two_point(20.0, 30), 20.0, t_end=0.01, dt=0.01)
    mock_logger.warning.assert_called_once()


def test_energy_values() -> None:
    assert energy(bernoulli_equilibrium(0.8).pmf, 0.8) == pytest.approx(0.0, abs=1e-15)
    assert energy(delta(2, 5), 2.0) == 2.0  # noqa: PLR2004


def test_energy_derivative_residual_is_second_order() -> None:
    coarse = solve(delta(2, 40), 2.0, t_end=5.0, dt=0.01, record_every=10)
    fine = solve(delta(2, 40), 2.0, t_end=5.0, dt=0.01, record_every=5)
    r_coarse = energy_derivative_residual(coarse, 2.0)[coarse.times[1:-1] >= 1.0].max()
    r_fine = energy_derivative_residual(fine, 2.0)[fine.times[1:-1] >= 1.0].max()
    assert r_coarse / r_fine > 3.0  # noqa: PLR2004


def test_uniform_spacing() -> None:
    assert uniform_spacing([0.0, 0.5, 1.0]) == 0.5  # noqa: PLR2004
    with pytest.raises(NonUniformSamplingError):
        uniform_spacing([0.0, 0.5, 1.5])
    with pytest.raises(NonUniformSamplingError):
        uniform_spacing([0.0, 0.5], min_samples=3)


def test_energy_decay_bound() -> None:
    t = np.array([0.0, 1.0])
    np.testing.assert_allclose(energy_decay_bound(t, 2.0, 0.8), [2.0, 2.0 * np.exp(-0.4)])
    critical = energy_decay_bound(t, 2.0, 1.0, p0_zero=0.5)
    assert critical[0] == pytest.approx(2.0 + 1.0 + 1.0)
    with pytest.raises(OutOfDomainError):
        energy_decay_bound(t, 2.0, 1.0)
    with pytest.raises(OutOfDomainError):
        energy_decay_bound(t, 2.0, 2.0)


def test_trajectory_accessors() -> None:
    traj = Trajectory.from_states([0.0, 1.0], [[0.2, 0.8], [0.3, 0.7]], 0.8)
    assert traj.n_max == 1
    assert traj.final[0] == pytest.approx(0.3)
    assert traj.index_of(1.0) == 1
    assert traj.index_of(0.5) is None
    np.testing.assert_allclose(traj.energy_series, [0.0, -0.1])
