"""Truncated mean-field dispersion equation: generator, RK4 stepping, trajectories and the Lyapunov energy."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from src import consts
from src.dispersion.equilibria import nu_of_mu, ztp_tail_bound
from src.dispersion.exceptions import (
    MeanMismatchError,
    NonUniformSamplingError,
    OutOfDomainError,
    StepUnstableError,
)
from src.dispersion.pmf import Pmf, make_pmf, moment
from src.utils.logging import get_logger, timed

if TYPE_CHECKING:
    import numpy.typing as npt

_logger = get_logger(__name__)


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution of the truncated mean-field equation.

    Attributes:
        times: Sample times, starting at 0 and strictly increasing.
        states: One row of weights per sample time.
        mu: Mean number of particles per site.
        a_series: Active particles per site, ``mu - p_1``.
        energy_series: Lyapunov energy ``sum n^2 p_n - mu``.

    """

    times: npt.NDArray[np.float64]
    states: npt.NDArray[np.float64]
    mu: float
    a_series: npt.NDArray[np.float64]
    energy_series: npt.NDArray[np.float64]

    def __len__(self) -> int:
        return int(self.times.size)

    @property
    def n_max(self) -> int:
        return int(self.states.shape[1] - 1)

    @property
    def p1_series(self) -> npt.NDArray[np.float64]:
        return self.states[:, 1]

    @property
    def initial(self) -> Pmf:
        return self.pmf(0)

    @property
    def final(self) -> Pmf:
        return self.pmf(-1)

    def pmf(self, i: int) -> Pmf:
        return make_pmf(self.states[i])

    def index_of(self, t: float, atol: float = 1e-9) -> int | None:
        hits = np.flatnonzero(np.abs(self.times - t) <= atol)
        return int(hits[0]) if hits.size else None

    @classmethod
    def from_states(cls, times: npt.ArrayLike, states: npt.ArrayLike, mu: float) -> Trajectory:
        times_arr = np.asarray(times, dtype=np.float64)
        states_arr = np.atleast_2d(np.asarray(states, dtype=np.float64))
        n = np.arange(states_arr.shape[1], dtype=np.float64)
        for arr in (times_arr, states_arr):
            arr.setflags(write=False)
        return cls(
            times=times_arr,
            states=states_arr,
            mu=mu,
            a_series=mu - states_arr[:, 1],
            energy_series=states_arr @ (n * n) - mu,
        )


def _generator(q: npt.NDArray[np.float64], mu: float) -> npt.NDArray[np.float64]:
    n = np.arange(q.size, dtype=np.float64)
    a = mu - q[1]
    jumping = np.where(n >= 2, n * q, 0.0)  # noqa: PLR2004

    out = np.empty_like(q)
    out[:-1] = jumping[1:] - jumping[:-1]
    out[-1] = -jumping[-1]
    out -= a * np.diff(q, prepend=0.0)

    # Arrivals at the last site class would leave the truncation. Keeping them in row n_max and taking one
    # particle back from row n_max - 1 restores both conservation sums.
    lost = a * q[-1]
    out[-1] += 2.0 * lost
    out[-2] -= lost
    return out


def generator(q: Pmf, mu: float) -> npt.NDArray[np.float64]:
    """Right-hand side of the mean-field equation with the conservative truncation closure.

    Row ``n`` reads ``(n+1) q_{n+1} 1{n+1>=2} - n q_n 1{n>=2} - (mu - q_1)(q_n - q_{n-1})``; rows ``n_max - 1``
    and ``n_max`` carry the boundary correction so that ``sum F = 0`` and ``sum n F = 0`` for every ``q`` with
    unit mass and mean ``mu``.

    Args:
        q: The current distribution.
        mu: Mean number of particles per site.

    Returns:
        The time derivative, one entry per ``n = 0..n_max``.

    """
    if not mu > 0.0:
        msg = f"mu must be positive, got {mu!r}"
        raise OutOfDomainError(msg)
    return _generator(np.asarray(q.weights, dtype=np.float64), mu)


def max_stable_dt(mu: float, n_max: int) -> float:
    """Largest RK4 step inside the real-axis stability interval for the truncated generator."""
    stiffness = n_max + mu + 2.0 * math.sqrt(mu * (n_max + 1))
    return consts.compute.RK4_STABILITY_LIMIT / stiffness


def _check_step(mu: float, n_max: int, dt: float) -> None:
    if not dt > 0.0:
        msg = f"dt must be positive, got {dt!r}"
        raise StepUnstableError(msg, suggested_dt=0.5 / n_max)
    if dt > max_stable_dt(mu, n_max):
        msg = (
            f"dt={dt!r} exceeds the RK4 stability limit {max_stable_dt(mu, n_max):.4g} "
            f"for n_max={n_max}; use dt <= {0.5 / n_max:.4g}"
        )
        raise StepUnstableError(msg, suggested_dt=0.5 / n_max)


def _rk4(q: npt.NDArray[np.float64], mu: float, dt: float) -> npt.NDArray[np.float64]:
    k1 = _generator(q, mu)
    k2 = _generator(q + 0.5 * dt * k1, mu)
    k3 = _generator(q + 0.5 * dt * k2, mu)
    k4 = _generator(q + dt * k3, mu)
    return q + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _revalidate(q: npt.NDArray[np.float64], *, time: float, n_max: int) -> npt.NDArray[np.float64]:
    low = float(q.min())
    if low < -consts.compute.NEGATIVE_WEIGHT_TOL:
        msg = f"RK4 step from t={time:.6g} produced weight {low:.3e}; use dt <= {0.5 / n_max:.4g}"
        raise StepUnstableError(msg, time=time, suggested_dt=0.5 / n_max)
    if low < 0.0:
        q = np.maximum(q, 0.0)
    drift = q.sum() - 1.0
    if abs(drift) > consts.compute.RENORMALIZE_DRIFT:
        _logger.debug("Renormalizing mass drift %.3e at t=%.6g", drift, time)
        q = q / q.sum()
    return q


def rk4_step(q: Pmf, mu: float, dt: float) -> Pmf:
    """One classical Runge-Kutta step of ``q' = F[q]``.

    Raises:
        StepUnstableError: If ``dt`` is outside the stability interval or the step goes negative.

    """
    _check_step(mu, q.n_max, dt)
    out = _revalidate(_rk4(np.asarray(q.weights, dtype=np.float64), mu, dt), time=0.0, n_max=q.n_max)
    return make_pmf(out)


@timed
def solve(
    p0: Pmf,
    mu: float,
    t_end: float,
    dt: float = consts.model.DT,
    record_every: int = consts.model.RECORD_EVERY,
) -> Trajectory:
    """Integrates the truncated mean-field equation with fixed-step RK4.

    Args:
        p0: Initial distribution with mean ``mu``.
        mu: Mean number of particles per site.
        t_end: Final time. The last step is shortened to land on it.
        dt: Step size.
        record_every: Keep every ``record_every``-th step; the final time is always kept.

    Returns:
        The sampled trajectory.

    Raises:
        MeanMismatchError: If the mean of ``p0`` is off by more than ``1e-10``.
        StepUnstableError: If ``dt`` is too large for ``p0.n_max``.

    """
    mean = moment(p0, 1)
    if abs(mean - mu) > consts.compute.TOL_MEAN_INIT:
        msg = f"Initial mean {mean!r} differs from mu={mu!r}"
        raise MeanMismatchError(msg)
    if not t_end > 0.0:
        msg = f"t_end must be positive, got {t_end!r}"
        raise OutOfDomainError(msg)
    if record_every < 1:
        msg = f"record_every must be >= 1, got {record_every}"
        raise OutOfDomainError(msg)
    _check_step(mu, p0.n_max, dt)

    if mu > 1.0:
        tail = ztp_tail_bound(nu_of_mu(mu), p0.n_max)
        if tail > consts.compute.TAIL_MASS_WARN:
            _logger.warning(
                "Equilibrium tail beyond n_max=%d may reach %.3e; results are truncation-limited", p0.n_max, tail
            )

    n_steps = max(1, math.ceil(t_end / dt - 1e-9))
    q = np.array(p0.weights, dtype=np.float64)
    times = [0.0]
    states = [q.copy()]
    for step in range(1, n_steps + 1):
        t0 = (step - 1) * dt
        h = dt if step < n_steps else t_end - t0
        q = _revalidate(_rk4(q, mu, h), time=t0, n_max=p0.n_max)
        if step % record_every == 0 or step == n_steps:
            times.append(step * dt if step < n_steps else t_end)
            states.append(q.copy())

    return Trajectory.from_states(times, np.vstack(states), mu)


def conservation_errors(traj: Trajectory) -> tuple[float, float]:
    """Largest deviation of the mass from 1 and of the mean from ``mu`` over all samples."""
    n = np.arange(traj.n_max + 1, dtype=np.float64)
    mass = float(np.max(np.abs(traj.states.sum(axis=1) - 1.0)))
    mean = float(np.max(np.abs(traj.states @ n - traj.mu)))
    return mass, mean


def energy(q: Pmf, mu: float) -> float:
    """Lyapunov energy ``sum n^2 q_n - mu``."""
    return moment(q, 2) - mu


def uniform_spacing(times: npt.ArrayLike, min_samples: int = 2) -> float:
    """Returns the common spacing of ``times``.

    Raises:
        NonUniformSamplingError: If the grid is too short or not uniform.

    """
    t = np.asarray(times, dtype=np.float64)
    if t.size < min_samples:
        msg = f"Need at least {min_samples} samples, got {t.size}"
        raise NonUniformSamplingError(msg)
    steps = np.diff(t)
    h = float(steps[0])
    if h <= 0.0 or not np.allclose(steps, h, rtol=1e-6, atol=1e-12):
        msg = f"Samples are not uniformly spaced (spacing from {steps.min():.6g} to {steps.max():.6g})"
        raise NonUniformSamplingError(msg)
    return h


def energy_derivative_residual(traj: Trajectory, mu: float) -> npt.NDArray[np.float64]:
    """Mismatch between the centered difference of the energy and ``-2E + 2 mu (mu - p_1)`` at interior samples."""
    h = uniform_spacing(traj.times, min_samples=3)
    e = traj.energy_series
    slope = (e[2:] - e[:-2]) / (2.0 * h)
    rhs = -2.0 * e[1:-1] + 2.0 * mu * (mu - traj.p1_series[1:-1])
    return np.abs(slope - rhs)


def energy_decay_bound(
    t: npt.ArrayLike, e0: float, mu: float, p0_zero: float | None = None
) -> npt.NDArray[np.float64]:
    """Upper bound on the energy in the sub-critical and critical regimes.

    For ``mu < 1`` the energy decays like ``e0 exp(-2(1 - mu) t)``. At ``mu = 1`` the bound is
    ``e0 exp(-2t) + 4 / (t + 2 / p_0(0)) + 2 p_0(0) exp(-t)`` and needs the initial empty-site fraction.

    """
    t_arr = np.asarray(t, dtype=np.float64)
    if mu < 1.0:
        return e0 * np.exp(-2.0 * (1.0 - mu) * t_arr)
    if mu == 1.0:
        if p0_zero is None or not p0_zero > 0.0:
            msg = "The critical bound needs a positive initial fraction of empty sites"
            raise OutOfDomainError(msg)
        return e0 * np.exp(-2.0 * t_arr) + 4.0 / (t_arr + 2.0 / p0_zero) + 2.0 * p0_zero * np.exp(-t_arr)
    msg = f"No energy decay bound for mu > 1, got {mu!r}"
    raise OutOfDomainError(msg)
