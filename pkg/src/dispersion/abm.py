"""Exact stochastic simulation of the dispersion process on the complete graph.

Each particle sharing its site with at least one other particle jumps at rate one to a uniformly chosen other
site; lone particles stay put. The process is simulated event by event.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Sequence, Union

import dask.bag
import numpy as np

from src import consts
from src.dispersion.exceptions import InvalidPlacementError, StateCorruptedError
from src.dispersion.pmf import Pmf, make_pmf
from src.utils.logging import get_logger, timed

if TYPE_CHECKING:
    import numpy.typing as npt

_logger = get_logger(__name__)


@dataclass(frozen=True)
class AllAtOne:
    n_particles: int


@dataclass(frozen=True)
class Even:
    n_particles: int


@dataclass(frozen=True)
class FromCounts:
    counts: tuple[int, ...]

    @property
    def n_particles(self) -> int:
        return sum(self.counts)


Placement = Union[AllAtOne, Even, FromCounts]


def parse_placement(spec: str, n_particles: int | None = None) -> Placement:
    """Parses ``all-at-one``, ``even`` or ``counts:<c1>,<c2>,...``."""
    kind, _, rest = spec.strip().partition(":")
    if kind == "counts":
        try:
            return FromCounts(tuple(int(c) for c in rest.split(",")))
        except ValueError as e:
            msg = f"Invalid counts in placement {spec!r}"
            raise InvalidPlacementError(msg) from e
    if n_particles is None:
        msg = f"Placement {spec!r} needs a particle count"
        raise InvalidPlacementError(msg)
    if kind == "all-at-one":
        return AllAtOne(n_particles)
    if kind == "even":
        return Even(n_particles)
    msg = f"Unknown placement {spec!r}; expected all-at-one, even or counts:<list>"
    raise InvalidPlacementError(msg)


class FenwickTree:
    """Binary indexed tree over integer site rates with prefix search."""

    def __init__(self, values: Sequence[int]) -> None:
        self._n = len(values)
        self._tree = [0, *(int(v) for v in values)]
        for i in range(1, self._n + 1):
            j = i + (i & -i)
            if j <= self._n:
                self._tree[j] += self._tree[i]
        self._top = 1 << (self._n.bit_length() - 1) if self._n else 0

    def add(self, i: int, delta: int) -> None:
        i += 1
        while i <= self._n:
            self._tree[i] += delta
            i += i & -i

    def prefix(self, i: int) -> int:
        """Sum of the first ``i`` values."""
        total = 0
        while i > 0:
            total += self._tree[i]
            i -= i & -i
        return total

    def find(self, target: int) -> int:
        """Smallest index whose inclusive prefix sum exceeds ``target``."""
        pos = 0
        step = self._top
        while step:
            nxt = pos + step
            if nxt <= self._n and self._tree[nxt] <= target:
                pos = nxt
                target -= self._tree[nxt]
            step >>= 1
        return pos


def _rate(x: int) -> int:
    return x if x >= 2 else 0  # noqa: PLR2004


@dataclass
class SiteState:
    """Occupancy of every site with the cached total jump rate.

    Attributes:
        occupancy: Number of particles per site.
        n_sites: Number of sites ``N``.
        n_particles: Number of particles ``M``.
        active_total: Number of particles on sites hosting at least two.
        time: Time of the last applied event.
        rates: Per-site jump rates, ``X_i`` when ``X_i >= 2`` and 0 otherwise.
        events: Number of applied events.

    """

    occupancy: npt.NDArray[np.int64]
    n_sites: int
    n_particles: int
    active_total: int
    time: float = 0.0
    rates: npt.NDArray[np.int64] = field(default_factory=lambda: np.zeros(0, dtype=np.int64))
    events: int = 0
    tree: FenwickTree | None = None

    @property
    def terminated(self) -> bool:
        return self.active_total == 0

    @property
    def max_occupancy(self) -> int:
        return int(self.occupancy.max())

    def validate(self) -> None:
        """Recomputes the cached quantities from scratch.

        Raises:
            StateCorruptedError: If the particle count or the cached rates disagree with the occupancy.

        """
        if int(self.occupancy.sum()) != self.n_particles or self.occupancy.min() < 0:
            msg = f"Occupancy no longer holds {self.n_particles} particles"
            raise StateCorruptedError(msg)
        expected = np.where(self.occupancy >= 2, self.occupancy, 0)  # noqa: PLR2004
        if not np.array_equal(expected, self.rates) or int(expected.sum()) != self.active_total:
            msg = f"Cached active total {self.active_total} != {int(expected.sum())} after {self.events} events"
            raise StateCorruptedError(msg)
        if self.tree is not None and self.tree.prefix(self.n_sites) != self.active_total:
            msg = "Rate tree is out of sync with the cached active total"
            raise StateCorruptedError(msg)


@dataclass(frozen=True)
class Event:
    time: float
    source: int
    destination: int


@dataclass(frozen=True)
class Terminated:
    time: float


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator for one replicate stream."""
    return np.random.Generator(np.random.Philox(seed))


def init_state(n_sites: int, placement: Placement, *, use_tree: bool | None = None) -> SiteState:
    """Places the particles and fills the rate cache.

    Args:
        n_sites: Number of sites, at least two.
        placement: Initial arrangement of the particles.
        use_tree: Force or disable the binary indexed tree for source selection. By default it is used above
            ``10**4`` sites.

    Returns:
        The state at time 0.

    Raises:
        InvalidPlacementError: If the placement does not fit ``n_sites``.

    """
    if n_sites < 2:  # noqa: PLR2004
        msg = f"Need at least two sites, got {n_sites}"
        raise InvalidPlacementError(msg)

    if isinstance(placement, FromCounts):
        if len(placement.counts) != n_sites or min(placement.counts) < 0:
            msg = f"Counts must be {n_sites} non-negative integers"
            raise InvalidPlacementError(msg)
        occupancy = np.array(placement.counts, dtype=np.int64)
    elif placement.n_particles < 0:
        msg = f"Particle count must be non-negative, got {placement.n_particles}"
        raise InvalidPlacementError(msg)
    elif isinstance(placement, AllAtOne):
        occupancy = np.zeros(n_sites, dtype=np.int64)
        occupancy[0] = placement.n_particles
    else:
        if placement.n_particles % n_sites:
            msg = f"Cannot spread {placement.n_particles} particles evenly over {n_sites} sites"
            raise InvalidPlacementError(msg)
        occupancy = np.full(n_sites, placement.n_particles // n_sites, dtype=np.int64)

    rates = np.where(occupancy >= 2, occupancy, 0).astype(np.int64)  # noqa: PLR2004
    if use_tree is None:
        use_tree = n_sites > consts.compute.FENWICK_THRESHOLD
    return SiteState(
        occupancy=occupancy,
        n_sites=n_sites,
        n_particles=int(occupancy.sum()),
        active_total=int(rates.sum()),
        rates=rates,
        tree=FenwickTree(rates.tolist()) if use_tree else None,
    )


def _draw(state: SiteState, rng: np.random.Generator) -> Event | None:
    total = state.active_total
    if total == 0:
        return None
    holding = -math.log1p(-rng.random()) / total
    target = min(int(rng.random() * total), total - 1)
    if state.tree is not None:
        source = state.tree.find(target)
    else:
        source = int(np.searchsorted(np.cumsum(state.rates), target, side="right"))
    destination = source
    while destination == source:
        destination = int(rng.integers(state.n_sites))
    return Event(time=state.time + holding, source=source, destination=destination)


def _apply(state: SiteState, event: Event) -> None:
    for site, delta in ((event.source, -1), (event.destination, 1)):
        old = int(state.occupancy[site])
        state.occupancy[site] = old + delta
        change = _rate(old + delta) - _rate(old)
        if change:
            state.rates[site] += change
            state.active_total += change
            if state.tree is not None:
                state.tree.add(site, change)
    state.time = event.time
    state.events += 1
    if state.events % consts.compute.COHERENCE_CHECK_EVERY == 0 and _logger.isEnabledFor(logging.DEBUG):
        state.validate()
        _logger.debug("Cache coherent after %d events at t=%.4f", state.events, state.time)


def gillespie_step(state: SiteState, rng: np.random.Generator) -> Event | Terminated:
    """Draws and applies the next jump.

    The holding time is exponential with rate ``active_total``; the source site is chosen with probability
    proportional to its rate and the destination uniformly among the other sites.

    Returns:
        The applied event, or `Terminated` when no particle can move.

    """
    event = _draw(state, rng)
    if event is None:
        return Terminated(time=state.time)
    _apply(state, event)
    return event


def empirical_counts(state: SiteState, n_max: int) -> tuple[npt.NDArray[np.int64], bool]:
    """Number of sites hosting ``n`` particles for ``n = 0..n_max``; higher occupancies go to the last bucket.

    Returns:
        The counts and whether any site exceeded ``n_max``.

    """
    counts = np.bincount(state.occupancy, minlength=n_max + 1)
    overflow = counts.size > n_max + 1
    if overflow:
        counts = np.append(counts[:n_max], counts[n_max:].sum())
    return counts.astype(np.int64), bool(overflow)


def empirical_pmf(state: SiteState, n_max: int) -> Pmf:
    counts, overflow = empirical_counts(state, n_max)
    if overflow:
        _logger.warning("Occupancy %d exceeds n_max=%d; folded into the last bucket", state.max_occupancy, n_max)
    return make_pmf(counts / state.n_sites)


def _check_samples(t_end: float, sample_times: Sequence[float]) -> npt.NDArray[np.float64]:
    samples = np.asarray(sample_times, dtype=np.float64)
    if samples.size and (np.any(np.diff(samples) <= 0.0) or samples[-1] > t_end or samples[0] < 0.0):
        msg = "Sample times must be increasing, non-negative and not beyond t_end"
        raise ValueError(msg)
    return samples


def _run_counts(
    state: SiteState, t_end: float, sample_times: Sequence[float], rng: np.random.Generator, n_max: int
) -> tuple[list[tuple[float, npt.NDArray[np.int64]]], bool]:
    samples = _check_samples(t_end, sample_times)
    records: list[tuple[float, npt.NDArray[np.int64]]] = []
    overflowed = False
    pending = _draw(state, rng)
    for s in samples:
        while pending is not None and pending.time <= s:
            _apply(state, pending)
            pending = _draw(state, rng)
        counts, overflow = empirical_counts(state, n_max)
        overflowed |= overflow
        records.append((float(s), counts))
    while pending is not None and pending.time <= t_end:
        _apply(state, pending)
        pending = _draw(state, rng)
    if overflowed:
        _logger.warning("Some samples had occupancy above n_max=%d; folded into the last bucket", n_max)
    return records, overflowed


def run(
    state: SiteState,
    t_end: float,
    sample_times: Sequence[float],
    rng: np.random.Generator,
    n_max: int = consts.model.N_MAX,
) -> list[tuple[float, Pmf]]:
    """Simulates up to ``t_end`` and records the empirical law at each sample time.

    Once no particle can move, the remaining samples repeat the frozen state.
    """
    records, _ = _run_counts(state, t_end, sample_times, rng, n_max)
    return [(t, make_pmf(counts / state.n_sites)) for t, counts in records]


def time_averaged_pmf(samples: Sequence[tuple[float, Pmf]], window: tuple[float, float]) -> Pmf:
    """Average of the sampled laws with ``t_lo <= t <= t_hi``."""
    t_lo, t_hi = window
    chosen = [p for t, p in samples if t_lo <= t <= t_hi]
    if not chosen:
        msg = f"No samples inside {window}"
        raise ValueError(msg)
    n_max = max(p.n_max for p in chosen)
    return make_pmf(np.mean([p.padded(n_max) for p in chosen], axis=0), normalize=True)


@dataclass(frozen=True)
class ReplicateResult:
    """Output of one independent simulation.

    Attributes:
        replicate: Replicate index.
        seed: Seed of its random stream.
        samples: Sample time and site counts per occupancy.
        termination_time: Time of the last event if the process stopped before ``t_end``.
        max_occupancy: Largest occupancy at the end of the run.
        events: Number of applied events.
        n_sites: Number of sites.

    """

    replicate: int
    seed: int
    samples: list[tuple[float, npt.NDArray[np.int64]]]
    termination_time: float | None
    max_occupancy: int
    events: int
    n_sites: int

    def pmfs(self) -> list[tuple[float, Pmf]]:
        return [(t, make_pmf(counts / self.n_sites)) for t, counts in self.samples]


def run_replicate(
    replicate: int,
    *,
    n_sites: int,
    placement: Placement,
    t_end: float,
    sample_times: Sequence[float],
    seed: int,
    n_max: int = consts.model.N_MAX,
) -> ReplicateResult:
    """Runs replicate ``r`` with its own state and the stream seeded ``seed + r``."""
    state = init_state(n_sites, placement)
    stream_seed = seed + replicate
    records, _ = _run_counts(state, t_end, sample_times, make_rng(stream_seed), n_max)
    return ReplicateResult(
        replicate=replicate,
        seed=stream_seed,
        samples=records,
        termination_time=state.time if state.terminated else None,
        max_occupancy=state.max_occupancy,
        events=state.events,
        n_sites=n_sites,
    )


@timed
def run_ensemble(
    *,
    n_sites: int,
    placement: Placement,
    t_end: float,
    sample_times: Sequence[float],
    seed: int,
    replicates: int = 1,
    n_max: int = consts.model.N_MAX,
    jobs: int = 1,
) -> list[ReplicateResult]:
    """Runs independent replicates, in parallel processes when ``jobs > 1``; results keep replicate order."""
    init_state(n_sites, placement)
    _check_samples(t_end, sample_times)
    bag = dask.bag.from_sequence(list(range(replicates)), partition_size=1).map(
        run_replicate,
        n_sites=n_sites,
        placement=placement,
        t_end=t_end,
        sample_times=list(sample_times),
        seed=seed,
        n_max=n_max,
    )
    if jobs > 1:
        results: list[ReplicateResult] = bag.compute(scheduler="processes", num_workers=jobs)
    else:
        results = bag.compute(scheduler="synchronous")
    _logger.info(
        "Finished %d replicates; %d terminated before t=%s",
        replicates,
        sum(r.termination_time is not None for r in results),
        t_end,
    )
    return results
