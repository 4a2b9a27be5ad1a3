from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np
import pytest

from src.dispersion.exceptions import DispersionError, InitSpecError
from src.dispersion.initial_conditions import initial_condition, split, spread, two_point
from src.dispersion.io import write_pmf_csv
from src.dispersion.pmf import delta, make_pmf, moment

if TYPE_CHECKING:
    from pathlib import Path


def test_split_matches_reference_set_up() -> None:
    p = split(100, 0.008, 100)
    assert p[0] == pytest.approx(0.992)
    assert p[100] == 0.008  # noqa: PLR2004
    assert moment(p, 1) == pytest.approx(0.8, abs=1e-12)


@pytest.mark.parametrize(("n", "mass"), [(0, 0.5), (11, 0.5), (3, 0.0), (3, 1.5)])
def test_split_rejects_bad_arguments(n: int, mass: float) -> None:
    with pytest.raises(InitSpecError):
        split(n, mass, 10)


@pytest.mark.parametrize("mu", [0.8, 1.2, 2.0, 3.7])
def test_two_point_has_mean_mu(mu: float) -> None:
    p = two_point(mu, 10)
    assert moment(p, 1) == pytest.approx(mu, abs=1e-12)
    assert np.count_nonzero(p.weights) <= 2  # noqa: PLR2004


def test_two_point_integer_mean_is_point_mass() -> None:
    np.testing.assert_array_equal(two_point(2.0, 5).weights, delta(2, 5).weights)


def test_two_point_needs_room() -> None:
    with pytest.raises(InitSpecError):
        two_point(5.5, 5)


def test_spread_keeps_the_mean() -> None:
    p = spread(delta(2, 5), 2, 0.01)
    assert p[1] == pytest.approx(0.005)
    assert p[3] == pytest.approx(0.005)
    assert moment(p, 1) == pytest.approx(2.0, abs=1e-15)


def test_spread_rejects_missing_mass() -> None:
    with pytest.raises(InitSpecError):
        spread(delta(2, 5), 3, 0.01)


@pytest.mark.parametrize(
    ("spec", "mu", "expected"),
    [
        ("delta:2", 2.0, [0.0, 0.0, 1.0, 0.0]),
        ("bernoulli", 0.8, [0.2, 0.8, 0.0, 0.0]),
        ("split:3:0.25", 0.75, [0.75, 0.0, 0.0, 0.25]),
        ("twopoint", 1.25, [0.0, 0.75, 0.25, 0.0]),
    ],
)
def test_initial_condition_grammar(spec: str, mu: float, expected: list[float]) -> None:
    np.testing.assert_allclose(initial_condition(spec, mu, 3).weights, expected, atol=1e-15)


def test_initial_condition_ztp() -> None:
    p = initial_condition("ztp", 2.0, 100)
    assert p[0] == 0.0
    assert moment(p, 1) == pytest.approx(2.0, abs=1e-12)


def test_initial_condition_from_csv_is_padded(tmp_path: Path) -> None:
    path = write_pmf_csv(make_pmf([0.5, 0.0, 0.5]), tmp_path / "p0.csv")
    p = initial_condition(f"csv:{path}", 1.0, 6)
    assert p.n_max == 6  # noqa: PLR2004
    assert p[2] == 0.5  # noqa: PLR2004


def test_initial_condition_csv_beyond_truncation(tmp_path: Path) -> None:
    path = write_pmf_csv(delta(5, 5), tmp_path / "p0.csv")
    with pytest.raises(InitSpecError):
        initial_condition(f"csv:{path}", 5.0, 3)


@pytest.mark.parametrize("spec", ["delta:x", "split:3", "gauss", "delta:9"])
def test_initial_condition_rejects_bad_specs(spec: str) -> None:
    with pytest.raises(DispersionError):
        initial_condition(spec, 1.0, 3)
