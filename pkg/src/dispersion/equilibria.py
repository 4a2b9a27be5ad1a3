"""Equilibrium distributions of the mean-field dispersion equation and the Lambert W machinery behind ν."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from src import consts
from src.dispersion.exceptions import OutOfDomainError, TruncationTooSmallError
from src.dispersion.pmf import Pmf, make_pmf
from src.utils.logging import get_logger

_logger = get_logger(__name__)

_BRANCH_POINT = -math.exp(-1.0)


class EquilibriumKind(str, Enum):
    BERNOULLI = "bernoulli"
    ZERO_TRUNCATED_POISSON = "ztp"


@dataclass(frozen=True)
class Equilibrium:
    """Stationary law for a given mean occupancy.

    Attributes:
        kind: Bernoulli for ``mu <= 1``, zero-truncated Poisson otherwise.
        pmf: The truncated distribution.
        mu: Mean number of particles per site.
        nu: Poisson parameter, ``None`` for the Bernoulli case.

    """

    kind: EquilibriumKind
    pmf: Pmf
    mu: float
    nu: float | None = None


def _initial_guess(x: float) -> float:
    if x < -0.25:  # noqa: PLR2004
        # expansion around the branch point in p = sqrt(2(ex + 1))
        p = math.sqrt(max(2.0 * (math.e * x + 1.0), 0.0))
        return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p**3
    if x >= math.e:
        l1 = math.log(x)
        l2 = math.log(l1)
        return l1 - l2 + l2 / l1
    if x >= 1.0:
        lx = math.log1p(x)
        return lx * (1.0 - math.log1p(lx) / (2.0 + lx))
    return x * (1.0 - x)


def lambert_w0(x: float) -> float:
    """Principal branch of the Lambert W function.

    Solves ``y * exp(y) = x`` for ``y >= -1`` with Halley's iteration.

    Notes:
        The starting point comes from a series around the branch point for ``x < -0.25``, the asymptotic
        ``log x - log log x`` for ``x >= e``, and cheap polynomial or logarithmic guesses in between.

    Arguments:
        x: The argument, ``x >= -1/e``.

    Returns:
        The value ``W0(x)``.

    Raises:
        OutOfDomainError: If ``x < -1/e`` beyond round-off.

    """
    x = float(x)
    if math.isnan(x) or x < _BRANCH_POINT - 1e-12:  # noqa: PLR2004
        msg = f"Lambert W0 is real only for x >= -1/e, got {x!r}"
        raise OutOfDomainError(msg)
    if x <= _BRANCH_POINT:
        return -1.0
    if x == 0.0:
        return 0.0

    w = _initial_guess(x)
    for _ in range(consts.compute.LAMBERT_MAX_ITER):
        ew = math.exp(w)
        f = w * ew - x
        w1 = w + 1.0
        if w1 == 0.0:
            break
        dw = f / (ew * w1 - (w + 2.0) * f / (2.0 * w1))
        w = max(w - dw, -1.0)
        if abs(dw) <= 1e-15 * (1.0 + abs(w)):  # noqa: PLR2004
            break
    return w


def nu_of_mu(mu: float) -> float:
    """Poisson parameter of the supercritical equilibrium, ``mu + W0(-mu e^{-mu})``.

    The Lambert value is polished with Newton steps on ``nu - mu (1 - e^{-nu}) = 0``.

    Raises:
        OutOfDomainError: If ``mu <= 1``.

    """
    if not mu > 1.0:
        msg = f"nu is defined only for mu > 1, got {mu!r}"
        raise OutOfDomainError(msg)
    nu = mu + lambert_w0(-mu * math.exp(-mu))
    for _ in range(3):
        slope = 1.0 - mu * math.exp(-nu)
        if slope <= 1e-6:  # noqa: PLR2004
            break
        nu -= (nu + mu * math.expm1(-nu)) / slope
    if not 0.0 < nu < mu:
        msg = f"mu={mu!r} is too close to 1 to resolve nu in double precision"
        raise OutOfDomainError(msg)
    return nu


def mu_of_nu(nu: float) -> float:
    """Mean occupancy whose equilibrium has Poisson parameter ``nu``."""
    if not nu > 0.0:
        msg = f"nu must be positive, got {nu!r}"
        raise OutOfDomainError(msg)
    return nu / -math.expm1(-nu)


def ztp_tail_bound(nu: float, n_max: int) -> float:
    """Chernoff bound on the zero-truncated Poisson mass beyond ``n_max``."""
    x = n_max + 1
    if x <= nu:
        return 1.0
    return min(1.0, math.exp(x * (1.0 + math.log(nu) - math.log(x))) / math.expm1(nu))


def bernoulli_equilibrium(mu: float, n_max: int = consts.model.N_MAX) -> Equilibrium:
    """Absorbing law ``{1 - mu, mu, 0, ...}`` for ``0 < mu <= 1``."""
    if not 0.0 < mu <= 1.0:
        msg = f"The Bernoulli equilibrium requires 0 < mu <= 1, got {mu!r}"
        raise OutOfDomainError(msg)
    w = np.zeros(max(n_max, 1) + 1)
    w[0] = 1.0 - mu
    w[1] = mu
    return Equilibrium(kind=EquilibriumKind.BERNOULLI, pmf=make_pmf(w), mu=mu)


def ztp_equilibrium(mu: float, n_max: int = consts.model.N_MAX) -> Equilibrium:
    """Zero-truncated Poisson law ``nu^n / (n! (e^nu - 1))`` for ``mu > 1``.

    Terms come from the recurrence ``p_{n+1} = p_n nu / (n + 1)``; no renormalization is applied.

    Raises:
        OutOfDomainError: If ``mu <= 1``.
        TruncationTooSmallError: If the dropped tail may exceed ``1e-12``.

    """
    nu = nu_of_mu(mu)
    tail = ztp_tail_bound(nu, n_max)
    if tail >= consts.compute.TAIL_MASS_MAX:
        msg = f"n_max={n_max} drops up to {tail:.3e} of the equilibrium mass for mu={mu!r}; increase n_max"
        raise TruncationTooSmallError(msg)

    w = np.zeros(n_max + 1)
    w[1] = nu / math.expm1(nu)
    for n in range(1, n_max):
        w[n + 1] = w[n] * nu / (n + 1)
    return Equilibrium(kind=EquilibriumKind.ZERO_TRUNCATED_POISSON, pmf=make_pmf(w), mu=mu, nu=nu)


def equilibrium_for(mu: float, n_max: int = consts.model.N_MAX) -> Equilibrium:
    return bernoulli_equilibrium(mu, n_max) if mu <= 1.0 else ztp_equilibrium(mu, n_max)


def ztp_energy(mu: float) -> float:
    """Energy of the zero-truncated Poisson equilibrium, ``mu (1 + nu) - mu``."""
    return mu * nu_of_mu(mu)


def theory_rate(mu: float) -> tuple[float, float]:
    """Proven and conjectured exponential rates of the l1 error.

    Returns:
        ``(proven, conjectured)``. Algebraic decay at ``mu = 1`` is reported as rate 0.

    """
    if mu < 1.0:
        rate = 2.0 * (1.0 - mu)
        return rate, rate
    if mu == 1.0:
        return 0.0, 0.0
    nu = nu_of_mu(mu)
    return min(nu, 1.0), min(nu, 2.0)
