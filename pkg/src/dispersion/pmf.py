"""Truncated probability mass functions on the non-negative integers."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

import numpy as np

from src import consts
from src.dispersion.exceptions import NegativeWeightError, NonFiniteWeightError, NotNormalizedError, ZeroMassError

if TYPE_CHECKING:
    import numpy.typing as npt


@dataclass(frozen=True, eq=False)
class Pmf:
    """Distribution of the number of particles per site, stored densely on ``0..n_max``.

    Instances are built through `make_pmf`, which validates the weights. The weight array is read-only.

    Attributes:
        weights: Probabilities ``p_0 .. p_{n_max}``.

    """

    weights: npt.NDArray[np.float64]

    @property
    def n_max(self) -> int:
        return int(self.weights.size - 1)

    @property
    def mass(self) -> float:
        return float(self.weights.sum())

    @property
    def support(self) -> npt.NDArray[np.int64]:
        return np.arange(self.weights.size, dtype=np.int64)

    def __getitem__(self, n: int) -> float:
        if n < 0:
            msg = f"Index must be non-negative, got {n}"
            raise IndexError(msg)
        return float(self.weights[n]) if n <= self.n_max else 0.0

    def __len__(self) -> int:
        return int(self.weights.size)

    def padded(self, n_max: int) -> npt.NDArray[np.float64]:
        """Returns the weights zero-padded (never cut) to length ``n_max + 1``."""
        out = np.zeros(max(n_max, self.n_max) + 1)
        out[: self.weights.size] = self.weights
        return out

    def to_list(self) -> list[float]:
        return [float(w) for w in self.weights]


def make_pmf(
    weights: Sequence[float] | npt.NDArray[np.float64],
    *,
    normalize: bool = False,
    tol_mass: float = consts.compute.TOL_MASS,
) -> Pmf:
    """Validates weights and builds a `Pmf`.

    Magnitudes below ``1e-15`` are clamped to zero. A single weight is padded with a trailing zero so that
    ``n_max >= 1``.

    Args:
        weights: Probabilities indexed by particle count.
        normalize: Divide by the total mass instead of checking it.
        tol_mass: Allowed deviation of the total mass from one when not normalizing.

    Returns:
        The validated distribution.

    Raises:
        NonFiniteWeightError: If an entry is NaN or infinite.
        NegativeWeightError: If an entry is below ``-1e-15``.
        ZeroMassError: If all entries are zero.
        NotNormalizedError: If the mass is off by more than ``tol_mass`` and ``normalize`` is not set.

    """
    arr = np.array(weights, dtype=np.float64).ravel()
    if arr.size == 0:
        msg = "Cannot build a distribution from an empty sequence"
        raise ZeroMassError(msg)
    if not np.all(np.isfinite(arr)):
        idx = int(np.flatnonzero(~np.isfinite(arr))[0])
        msg = f"Non-finite weight {arr[idx]!r} at n={idx}"
        raise NonFiniteWeightError(msg)
    if arr.min() < -consts.compute.CLAMP_TOL:
        idx = int(arr.argmin())
        msg = f"Negative weight {arr[idx]!r} at n={idx}"
        raise NegativeWeightError(msg)
    arr[np.abs(arr) < consts.compute.CLAMP_TOL] = 0.0

    total = arr.sum()
    if total <= 0.0:
        msg = "All weights are zero"
        raise ZeroMassError(msg)
    if normalize:
        arr /= total
    elif abs(total - 1.0) > tol_mass:
        msg = f"Total mass {total!r} differs from 1 by more than {tol_mass}"
        raise NotNormalizedError(msg)

    if arr.size == 1:
        arr = np.append(arr, 0.0)
    arr.setflags(write=False)
    return Pmf(weights=arr)


def delta(n: int, n_max: int) -> Pmf:
    """Point mass at ``n`` on ``0..n_max``."""
    if not 0 <= n <= n_max:
        msg = f"Point mass location {n} outside 0..{n_max}"
        raise ZeroMassError(msg)
    w = np.zeros(n_max + 1)
    w[n] = 1.0
    return make_pmf(w)


def moment(p: Pmf, k: int) -> float:
    """Returns ``sum_n n**k p_n``; ``k = 0`` gives the mass."""
    if k < 0:
        msg = f"Moment order must be non-negative, got {k}"
        raise ValueError(msg)
    n = p.support.astype(np.float64)
    return float(np.sum(n**k * p.weights))


def active_particles(p: Pmf) -> float:
    """Mean number of particles on sites hosting at least two, ``sum_{n>=2} n p_n``."""
    n = p.support.astype(np.float64)
    return float(np.sum(n[2:] * p.weights[2:]))
