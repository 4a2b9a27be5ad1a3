from __future__ import annotations

from typing import Any

import numpy as np
import pytest

from src.dispersion.abm import AllAtOne, Even, run_ensemble, time_averaged_pmf
from src.dispersion.equilibria import bernoulli_equilibrium, ztp_equilibrium
from src.dispersion.metrics import ell1_dist

T_END = 200.0


def test_underpopulated_runs_are_absorbed_at_bernoulli() -> None:
    results = run_ensemble(
        n_sites=1000,
        placement=AllAtOne(800),
        t_end=T_END,
        sample_times=np.linspace(0.0, T_END, 201).tolist(),
        seed=0,
        replicates=8,
    )
    bernoulli = bernoulli_equilibrium(0.8).pmf

    assert [r.replicate for r in results] == list(range(8))
    for r in results:
        assert r.max_occupancy <= 1
        assert r.termination_time is not None
        assert ell1_dist(r.pmfs()[-1][1], bernoulli) <= 0.05  # noqa: PLR2004


def test_overpopulated_time_average_is_near_truncated_poisson() -> None:
    results = run_ensemble(
        n_sites=1000,
        placement=Even(2000),
        t_end=T_END,
        sample_times=np.linspace(0.0, T_END, 401).tolist(),
        seed=0,
    )
    (only,) = results
    assert only.termination_time is None

    averaged = time_averaged_pmf(only.pmfs(), (50.0, T_END))
    assert ell1_dist(averaged, ztp_equilibrium(2.0).pmf) <= 0.08  # noqa: PLR2004


@pytest.mark.parametrize("placement", [AllAtOne(160), Even(400)])
def test_parallel_ensemble_matches_sequential(placement: AllAtOne | Even) -> None:
    kwargs: dict[str, Any] = {
        "n_sites": 200,
        "placement": placement,
        "t_end": 5.0,
        "sample_times": [0.0, 1.0, 2.5, 5.0],
        "seed": 11,
        "replicates": 3,
    }
    sequential = run_ensemble(**kwargs, jobs=1)
    parallel = run_ensemble(**kwargs, jobs=2)

    assert [r.events for r in parallel] == [r.events for r in sequential]
    for a, b in zip(parallel, sequential):
        for (ta, ca), (tb, cb) in zip(a.samples, b.samples):
            assert ta == tb
            np.testing.assert_array_equal(ca, cb)
