"""Distances between laws on the non-negative integers and decay-rate estimation."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Sequence, Union

import numpy as np

from src import consts
from src.dispersion.exceptions import AllFlooredError, OutOfDomainError, WindowTooSmallError
from src.dispersion.pmf import Pmf

if TYPE_CHECKING:
    import numpy.typing as npt

    from src.dispersion.meanfield import Trajectory

PmfLike = Union[Pmf, Sequence[float], "npt.NDArray[np.float64]"]


def _weights(p: PmfLike) -> npt.NDArray[np.float64]:
    return np.asarray(p.weights if isinstance(p, Pmf) else p, dtype=np.float64)


def _aligned(p: PmfLike, q: PmfLike) -> tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    a, b = _weights(p), _weights(q)
    size = max(a.size, b.size)
    return np.pad(a, (0, size - a.size)), np.pad(b, (0, size - b.size))


def ell1_dist(p: PmfLike, q: PmfLike) -> float:
    a, b = _aligned(p, q)
    return float(np.abs(a - b).sum())


def ell2_dist(p: PmfLike, q: PmfLike) -> float:
    a, b = _aligned(p, q)
    return float(np.sqrt(np.sum((a - b) ** 2)))


def weighted_s_norm(q: PmfLike) -> float:
    """``sum (1 + n) |q_n|``; accepts signed sequences such as generator values."""
    w = _weights(q)
    return float(np.sum((1.0 + np.arange(w.size)) * np.abs(w)))


def wasserstein1(p: PmfLike, q: PmfLike) -> float:
    """Optimal transport distance with cost ``|m - n|``, computed as the l1 distance between the CDFs."""
    a, b = _aligned(p, q)
    return float(np.abs(np.cumsum(a - b)).sum())


def distance_series(traj: Trajectory, target: PmfLike, metric: str = "l1") -> npt.NDArray[np.float64]:
    """Distance from every trajectory sample to ``target`` in ``l1``, ``l2`` or ``w1``."""
    fn = {"l1": ell1_dist, "l2": ell2_dist, "w1": wasserstein1}[metric]
    return np.array([fn(row, target) for row in traj.states])


def wasserstein_series(first: Trajectory, second: Trajectory) -> npt.NDArray[np.float64]:
    """W1 between two trajectories sampled on the same grid."""
    if first.times.shape != second.times.shape or not np.allclose(first.times, second.times):
        msg = "Trajectories must share their sample times"
        raise ValueError(msg)
    return np.array([wasserstein1(a, b) for a, b in zip(first.states, second.states)])


def gronwall_bound(w0: float, t: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Stability bound ``W1(t) <= W1(0) e^{2t}`` for two solutions with the same mean."""
    return w0 * np.exp(2.0 * np.asarray(t, dtype=np.float64))


class FitModel(str, Enum):
    PURE_EXPONENTIAL = "exp"
    EXPONENTIAL_TIMES_POWER = "exp-poly"


@dataclass(frozen=True)
class RateFit:
    """Least-squares fit of ``log value`` on a time window.

    Attributes:
        rate: Decay exponent, the negated slope in ``t``.
        log_prefactor: Intercept of the fit.
        window: ``(t_lo, t_hi)`` used for the fit.
        rmse: Root mean square residual of the log-linear fit.
        model: Fitted model.
        power: Exponent of ``t`` for `FitModel.EXPONENTIAL_TIMES_POWER`.
        n_points: Number of samples used.

    """

    rate: float
    log_prefactor: float
    window: tuple[float, float]
    rmse: float
    model: FitModel
    power: float | None = None
    n_points: int = 0


def fit_decay(
    times: npt.ArrayLike,
    values: npt.ArrayLike,
    window: tuple[float, float],
    model: FitModel = FitModel.PURE_EXPONENTIAL,
    floor: float = consts.compute.FIT_FLOOR,
) -> RateFit:
    """Fits ``value ~ C e^{-rate t}`` or ``C t^power e^{-rate t}`` by ordinary least squares on logs.

    Samples at or below ``floor`` are dropped before fitting.

    Args:
        times: Sample times.
        values: Positive series, such as a distance to equilibrium.
        window: Inclusive fit window ``(t_lo, t_hi)``.
        model: Regress on ``t`` alone or on ``(t, log t)``.
        floor: Precision floor.

    Returns:
        The fitted decay model.

    Raises:
        WindowTooSmallError: If fewer than 8 usable samples remain.
        AllFlooredError: If every sample in the window is at the floor.

    """
    t_lo, t_hi = window
    if not t_lo < t_hi:
        msg = f"Empty fit window {window}"
        raise WindowTooSmallError(msg)
    if model is FitModel.EXPONENTIAL_TIMES_POWER and t_lo <= 0.0:
        msg = "A power-law factor needs a window with t_lo > 0"
        raise OutOfDomainError(msg)

    t = np.asarray(times, dtype=np.float64)
    y = np.asarray(values, dtype=np.float64)
    inside = (t >= t_lo) & (t <= t_hi)
    if inside.sum() < consts.compute.FIT_MIN_POINTS:
        msg = f"Only {int(inside.sum())} samples in {window}; need {consts.compute.FIT_MIN_POINTS}"
        raise WindowTooSmallError(msg)
    usable = inside & (y > floor)
    if not usable.any():
        msg = f"Every sample in {window} is at the precision floor {floor}"
        raise AllFlooredError(msg)
    if usable.sum() < consts.compute.FIT_MIN_POINTS:
        msg = f"Only {int(usable.sum())} samples above {floor} in {window}"
        raise WindowTooSmallError(msg)

    tt = t[usable]
    columns = [np.ones_like(tt), tt]
    if model is FitModel.EXPONENTIAL_TIMES_POWER:
        columns.append(np.log(tt))
    design = np.column_stack(columns)
    target = np.log(y[usable])
    coef, *_ = np.linalg.lstsq(design, target, rcond=None)
    rmse = float(np.sqrt(np.mean((design @ coef - target) ** 2)))
    return RateFit(
        rate=float(-coef[1]),
        log_prefactor=float(coef[0]),
        window=(float(t_lo), float(t_hi)),
        rmse=rmse,
        model=model,
        power=float(coef[2]) if model is FitModel.EXPONENTIAL_TIMES_POWER else None,
        n_points=int(usable.sum()),
    )


def last_above_floor(
    times: npt.ArrayLike, values: npt.ArrayLike, floor: float = consts.compute.PRECISION_FLOOR
) -> float:
    """Last time before the series first drops to the precision floor, or the last sample time."""
    t = np.asarray(times, dtype=np.float64)
    below = np.flatnonzero(np.asarray(values, dtype=np.float64) <= floor)
    return float(t[below[0] - 1]) if below.size and below[0] > 0 else float(t[-1])
