from __future__ import annotations

import json
from typing import Any

import click
import numpy as np
import pytest
from click.testing import CliRunner
from pydantic import Field

from src import consts
from src.core.configs.base import ConfigBase
from src.dispersion.exceptions import OutOfDomainError
from src.workflows.common import EXIT_ACCEPTANCE, EXIT_VALIDATION, check, default_output, execute
from src.workflows.meanfield.pgf_check import unit_circle_shift


class _Config(ConfigBase):
    value: float = Field(gt=0.0)


def _command(action: Any) -> click.Command:
    @click.command()
    @click.option("--value", type=float)
    def cmd(value: float | None) -> None:
        execute(_Config, {"value": value}, None, action)

    return cmd


def test_check_at_most() -> None:
    assert check("x", 0.1, 0.2)["passed"] is True
    assert check("x", 0.3, 0.2)["passed"] is False


def test_check_at_least() -> None:
    result = check("x", 0.96, 0.95, at_most=False)
    assert result["passed"] is True
    assert result["relation"] == ">="


def test_default_output_is_under_data_dir() -> None:
    assert default_output("solve", "a.csv") == consts.directories.LOCAL_DATA_DIR / "solve" / "a.csv"


def test_execute_prints_report() -> None:
    result = CliRunner().invoke(_command(lambda cfg: {"double": 2 * cfg.value}), ["--value", "1.5"])
    assert result.exit_code == 0
    assert json.loads(result.stdout)["double"] == 3.0  # noqa: PLR2004


def test_execute_maps_validation_errors() -> None:
    result = CliRunner().invoke(_command(lambda _: {}), ["--value", "-1"])
    assert result.exit_code == EXIT_VALIDATION
    assert result.stdout == ""


def test_execute_maps_domain_errors() -> None:
    def action(cfg: _Config) -> dict[str, Any]:
        raise OutOfDomainError(f"bad value {cfg.value}")

    result = CliRunner().invoke(_command(action), ["--value", "1"])
    assert result.exit_code == EXIT_VALIDATION
    assert "OutOfDomainError" in result.output


def test_execute_exits_two_on_failed_report() -> None:
    result = CliRunner().invoke(_command(lambda _: {"passed": False, "checks": []}), ["--value", "1"])
    assert result.exit_code == EXIT_ACCEPTANCE
    assert json.loads(result.stdout)["passed"] is False


@pytest.mark.parametrize("grid", [1, 4, 16])
def test_unit_circle_shift(grid: int) -> None:
    z = unit_circle_shift(grid)
    assert z.shape == (grid,)
    np.testing.assert_allclose(np.abs(1.0 - z), 1.0)
    assert z[0] == 0.0
