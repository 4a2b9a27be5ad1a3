"""Initial distributions for mean-field runs, addressed by a short text spec."""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from src.dispersion import io
from src.dispersion.equilibria import bernoulli_equilibrium, ztp_equilibrium
from src.dispersion.exceptions import DispersionError, InitSpecError
from src.dispersion.pmf import Pmf, delta, make_pmf

INIT_GRAMMAR = "delta:<n> | bernoulli | ztp | csv:<path> | split:<n>:<mass> | twopoint"


def split(n: int, mass: float, n_max: int) -> Pmf:
    """Puts ``mass`` on ``n`` and the remainder on 0."""
    if not 0 < n <= n_max:
        msg = f"split index {n} outside 1..{n_max}"
        raise InitSpecError(msg)
    if not 0.0 < mass <= 1.0:
        msg = f"split mass must lie in (0, 1], got {mass!r}"
        raise InitSpecError(msg)
    w = np.zeros(n_max + 1)
    w[0] = 1.0 - mass
    w[n] = mass
    return make_pmf(w)


def two_point(mu: float, n_max: int) -> Pmf:
    """Law on ``floor(mu)`` and ``floor(mu) + 1`` with mean ``mu``; a point mass when ``mu`` is an integer."""
    lo = math.floor(mu)
    upper = mu - lo
    if lo + (upper > 0.0) > n_max:
        msg = f"mu={mu!r} does not fit below n_max={n_max}"
        raise InitSpecError(msg)
    if upper == 0.0:
        return delta(lo, n_max)
    w = np.zeros(n_max + 1)
    w[lo] = 1.0 - upper
    w[lo + 1] = upper
    return make_pmf(w)


def spread(p: Pmf, n: int, mass: float) -> Pmf:
    """Moves ``mass`` from ``n`` to ``n - 1`` and ``n + 1`` in equal parts, keeping the mean."""
    if not 1 <= n < p.n_max or p[n] < mass:
        msg = f"Cannot move {mass!r} away from n={n}"
        raise InitSpecError(msg)
    w = np.array(p.weights)
    w[n] -= mass
    w[n - 1] += mass / 2.0
    w[n + 1] += mass / 2.0
    return make_pmf(w)


def initial_condition(spec: str, mu: float, n_max: int) -> Pmf:
    """Builds the initial distribution described by ``spec``.

    Args:
        spec: One of ``delta:<n>``, ``bernoulli``, ``ztp``, ``csv:<path>``, ``split:<n>:<mass>``, ``twopoint``.
        mu: Mean number of particles per site.
        n_max: Truncation index.

    Returns:
        The distribution on ``0..n_max``.

    Raises:
        InitSpecError: If the spec does not parse or does not fit the truncation.

    """
    kind, _, rest = spec.strip().partition(":")
    try:
        if kind == "delta":
            return delta(int(rest), n_max)
        if kind == "bernoulli":
            return bernoulli_equilibrium(mu, n_max).pmf
        if kind == "ztp":
            return ztp_equilibrium(mu, n_max).pmf
        if kind == "twopoint":
            return two_point(mu, n_max)
        if kind == "split":
            n, mass = rest.split(":")
            return split(int(n), float(mass), n_max)
        if kind == "csv":
            p = io.read_pmf_csv(Path(rest))
            if p.n_max > n_max:
                msg = f"{rest} has n_max={p.n_max} above the requested {n_max}"
                raise InitSpecError(msg)
            return make_pmf(p.padded(n_max))
    except DispersionError:
        raise
    except (ValueError, IndexError) as e:
        msg = f"Invalid init spec {spec!r}: {e}"
        raise InitSpecError(msg) from e
    msg = f"Unknown init spec {spec!r}; expected {INIT_GRAMMAR}"
    raise InitSpecError(msg)
