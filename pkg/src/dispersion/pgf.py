"""Generating-function view of the mean-field dynamics.

Covers direct evaluation of ``G(t, z) = sum p_n(t) z^n``, the auxiliary function
``v(t) = exp(int_0^t e^{-(t-s)} a(s) ds)`` reconstructed from a trajectory, the integral equation it satisfies,
the characteristic-line formula for ``G``, and the scalar maps ``phi`` and ``phi_c`` whose fixed point
``e^nu`` is the limit of ``v``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Union

import numpy as np
from scipy import integrate, signal

from src import consts
from src.dispersion.equilibria import nu_of_mu
from src.dispersion.exceptions import OffGridError, OutOfDomainError
from src.dispersion.meanfield import Trajectory, uniform_spacing
from src.utils.logging import get_logger

if TYPE_CHECKING:
    import numpy.typing as npt

    from src.dispersion.pmf import Pmf

_logger = get_logger(__name__)

ComplexLike = Union[complex, float, "npt.NDArray[np.complex128]", "npt.NDArray[np.float64]"]


@dataclass(frozen=True)
class AuxiliarySolution:
    """Auxiliary function on a trajectory grid.

    Attributes:
        times: The trajectory sample times.
        v_series: ``v(t)``.
        h_series: ``H(t) = int_0^t e^s a(s) ds``.
        log_v_integral: ``int_0^t log v(s) ds``.
        mu: Mean number of particles per site.

    """

    times: npt.NDArray[np.float64]
    v_series: npt.NDArray[np.float64]
    h_series: npt.NDArray[np.float64]
    log_v_integral: npt.NDArray[np.float64]
    mu: float

    @property
    def log_v(self) -> npt.NDArray[np.float64]:
        return np.log(self.v_series)


def _as_output(value: npt.NDArray[np.complex128]) -> ComplexLike:
    return complex(value) if value.ndim == 0 else value


def pgf_eval(q: Pmf, z: ComplexLike) -> ComplexLike:
    """Evaluates the generating function of ``q`` at ``z`` (Horner's scheme).

    Raises:
        OutOfDomainError: If ``|z| > 1``.

    """
    z_arr = np.asarray(z, dtype=np.complex128)
    if np.any(np.abs(z_arr) > 1.0 + 1e-12):  # noqa: PLR2004
        msg = "The generating function is evaluated only on the closed unit disk"
        raise OutOfDomainError(msg)
    return _as_output(np.asarray(np.polynomial.polynomial.polyval(z_arr, q.weights), dtype=np.complex128))


def equilibrium_pgf(z: ComplexLike, nu: float) -> ComplexLike:
    """Generating function of the zero-truncated Poisson law, ``(e^{nu z} - 1) / (e^nu - 1)``."""
    z_arr = np.asarray(z, dtype=np.complex128)
    return _as_output(np.expm1(nu * z_arr) / math.expm1(nu))


def v_from_trajectory(traj: Trajectory) -> AuxiliarySolution:
    """Reconstructs ``v`` from the active-particle series of a trajectory.

    ``I = log v`` obeys ``I(t + h) = e^{-h} I(t) + int_t^{t+h} e^{-(t+h-s)} a(s) ds``; the step integral is exact
    for ``a`` linear between samples.

    Raises:
        NonUniformSamplingError: If the trajectory grid is not uniform.

    """
    h = uniform_spacing(traj.times)
    decay = math.exp(-h)
    c0 = -math.expm1(-h)
    c1 = (c0 - h * decay) / h
    a = traj.a_series

    step = np.zeros_like(a)
    step[1:] = a[1:] * (c0 - c1) + a[:-1] * c1
    log_v = signal.lfilter([1.0], [1.0, -decay], step)

    return AuxiliarySolution(
        times=traj.times,
        v_series=np.exp(log_v),
        h_series=np.exp(traj.times) * log_v,
        log_v_integral=integrate.cumulative_trapezoid(log_v, traj.times, initial=0.0),
        mu=traj.mu,
    )


def v_bounds(times: npt.ArrayLike, mu: float) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """Lower and upper bounds ``(mu - 1)(1 - e^{-t})`` and ``mu (1 - e^{-t})`` on ``log v``."""
    ramp = -np.expm1(-np.asarray(times, dtype=np.float64))
    return (mu - 1.0) * ramp, mu * ramp


def recover_active_particles(aux: AuxiliarySolution) -> npt.NDArray[np.float64]:
    """Rebuilds ``a(t) = mu - p_1(t)`` as ``v'/v + log v`` with second-order differences."""
    log_v = aux.log_v
    return np.gradient(log_v, aux.times, edge_order=2) + log_v


def volterra_residual(traj: Trajectory, aux: AuxiliarySolution) -> npt.NDArray[np.float64]:
    """Residual of the integral equation satisfied by ``v`` at every grid point.

    The right-hand side is ``1 - f0(t) + f0(0) exp(-int_0^t log v) + mu int_0^t v(s)^{w} w ds`` with
    ``w = e^{-(t-s)}`` and ``f0(t) = G(0, 1 - e^{-t})``. Time integrals use the trapezoid rule on the grid.

    """
    times = aux.times
    log_v = aux.log_v
    p0 = traj.initial
    f0 = np.real(pgf_eval(p0, -np.expm1(-times)))
    empty = p0[0]

    out = np.zeros_like(times)
    for k in range(times.size):
        w = np.exp(times[: k + 1] - times[k])
        memory = integrate.trapezoid(np.exp(w * log_v[: k + 1]) * w, times[: k + 1]) if k else 0.0
        rhs = 1.0 - f0[k] + empty * math.exp(-aux.log_v_integral[k]) + aux.mu * memory
        out[k] = abs(aux.v_series[k] - rhs)
    return out


def _exprel(d: npt.NDArray[np.complex128]) -> npt.NDArray[np.complex128]:
    small = np.abs(d) < 1e-8  # noqa: PLR2004
    safe = np.where(small, 1.0, d)
    return np.where(small, 1.0 + 0.5 * d, np.expm1(safe) / safe)


def explicit_pgf(t: float, z: ComplexLike, p0: Pmf, aux: AuxiliarySolution) -> ComplexLike:
    """Characteristic-line solution ``G(t, 1 - z)`` built from the initial law and ``v``.

    Evaluates ``1 + (G(0, 1 - z e^{-t}) - 1 - mu z J) v(t)^{-z}`` where
    ``J = int_0^t v(s)^{z w} w ds = int exp(z w log v) dw`` over ``w = e^{-(t-s)}``. On each grid step the exponent
    is taken linear in ``w`` and integrated exactly.

    Args:
        t: Time, one of ``aux.times``.
        z: Point or array of points with ``|1 - z| <= 1``.
        p0: Initial distribution of the trajectory behind ``aux``.
        aux: The auxiliary function.

    Returns:
        ``G(t, 1 - z)``, complex, with the shape of ``z``.

    Raises:
        OffGridError: If ``t`` is not a grid time.
        OutOfDomainError: If some ``|1 - z| > 1``.

    """
    hits = np.flatnonzero(np.abs(aux.times - t) <= 1e-9)  # noqa: PLR2004
    if not hits.size:
        msg = f"t={t!r} is not on the auxiliary grid"
        raise OffGridError(msg)
    k = int(hits[0])

    z_arr = np.asarray(z, dtype=np.complex128)
    if np.any(np.abs(1.0 - z_arr) > 1.0 + 1e-12):  # noqa: PLR2004
        msg = "The characteristic formula holds only for |1 - z| <= 1"
        raise OutOfDomainError(msg)

    zz = z_arr.reshape(-1, 1)
    w = np.exp(aux.times[: k + 1] - aux.times[k])
    expo = zz * (w * aux.log_v[: k + 1])
    if k:
        steps = np.diff(w) * np.exp(expo[:, :-1]) * _exprel(np.diff(expo, axis=1))
        memory = steps.sum(axis=1)
    else:
        memory = np.zeros(zz.shape[0], dtype=np.complex128)

    start = np.asarray(pgf_eval(p0, 1.0 - z_arr.ravel() * math.exp(-aux.times[k])), dtype=np.complex128)
    value = 1.0 + (start - 1.0 - aux.mu * z_arr.ravel() * memory) * np.exp(-z_arr.ravel() * aux.log_v[k])
    return _as_output(value.reshape(z_arr.shape))


def phi(x: npt.ArrayLike, mu: float) -> float | npt.NDArray[np.float64]:
    """Squeeze map ``mu (x - 1) / log x`` with ``phi(1) = mu``.

    Within ``1e-6`` of ``x = 1`` the series ``mu (1 + w/2 + w^2/6)`` in ``w = log x`` replaces the quotient.

    Raises:
        OutOfDomainError: If some ``x <= 0``.

    """
    x_arr = np.asarray(x, dtype=np.float64)
    if np.any(x_arr <= 0.0):
        msg = "phi is defined for x > 0"
        raise OutOfDomainError(msg)
    w = np.log1p(x_arr - 1.0)
    near = np.abs(x_arr - 1.0) < consts.compute.PHI_SERIES_RADIUS
    quotient = (x_arr - 1.0) / np.where(near, 1.0, w)
    out = mu * np.where(near, 1.0 + w / 2.0 + w * w / 6.0, quotient)
    return float(out) if out.ndim == 0 else out


def phi_prime(x: npt.ArrayLike, mu: float) -> float | npt.NDArray[np.float64]:
    x_arr = np.asarray(x, dtype=np.float64)
    if np.any(x_arr <= 0.0):
        msg = "phi is defined for x > 0"
        raise OutOfDomainError(msg)
    w = np.log1p(x_arr - 1.0)
    near = np.abs(x_arr - 1.0) < 1e-3  # noqa: PLR2004
    safe = np.where(near, 1.0, w)
    direct = (w - (x_arr - 1.0) / x_arr) / (safe * safe)
    series = (0.5 + w / 3.0 + w * w / 8.0) / x_arr
    out = mu * np.where(near, series, direct)
    return float(out) if out.ndim == 0 else out


def contraction_constant(mu: float) -> float:
    """Lipschitz constant of ``phi`` on ``[e^{mu-1}, e^mu]``, attained at the left end."""
    if not mu > 1.0:
        msg = f"contraction constant needs mu > 1, got {mu!r}"
        raise OutOfDomainError(msg)
    return (mu * mu - 2.0 * mu + mu * math.exp(1.0 - mu)) / (mu - 1.0) ** 2


def _check_phi_c(x: float, c: float) -> None:
    if not x >= 1.0:
        msg = f"phi_c is defined for x >= 1, got {x!r}"
        raise OutOfDomainError(msg)
    if not 0.0 <= c < 1.0:
        msg = f"phi_c needs 0 <= c < 1, got {c!r}"
        raise OutOfDomainError(msg)


def _cutoff(log_x: float) -> float:
    # beyond s* the factor x^{e^{-s}} is 1 to PHI_C_TAIL_TOL
    return max(0.0, math.log(log_x / consts.compute.PHI_C_TAIL_TOL))


def phi_c(x: float, mu: float, c: float) -> float:
    """``mu int_0^inf x^{e^{-s}} e^{-(1-c) s} ds`` by adaptive quadrature up to a cutoff plus a closed-form tail."""
    _check_phi_c(x, c)
    log_x = math.log(x)
    if log_x == 0.0:
        return mu / (1.0 - c)
    cut = _cutoff(log_x)
    body, _ = integrate.quad(
        lambda s: math.exp(math.exp(-s) * log_x - (1.0 - c) * s), 0.0, cut, epsabs=1e-12, epsrel=1e-12, limit=200
    )
    tail = math.exp(-(1.0 - c) * cut) / (1.0 - c)
    return mu * (body + tail)


def phi_c_prime(x: float, mu: float, c: float) -> float:
    """Derivative ``mu int_0^inf x^{e^{-s} - 1} e^{-(2-c) s} ds``; equals ``mu / (2 - c)`` at ``x = 1``."""
    _check_phi_c(x, c)
    log_x = math.log(x)
    if log_x == 0.0:
        return mu / (2.0 - c)
    cut = _cutoff(log_x)
    body, _ = integrate.quad(
        lambda s: math.exp(math.expm1(-s) * log_x - (2.0 - c) * s), 0.0, cut, epsabs=1e-12, epsrel=1e-12, limit=200
    )
    tail = math.exp(-log_x - (2.0 - c) * cut) / (2.0 - c)
    return mu * (body + tail)


def lipschitz_margin(mu: float, c: float) -> float:
    """Margin ``eps_c = mu e^{-nu} (1 - c) / (2 (2 - c))`` of the Lipschitz bound ``1 - eps_c`` on ``phi_c``."""
    nu = nu_of_mu(mu)
    return mu * math.exp(-nu) * (1.0 - c) / (2.0 * (2.0 - c))
