from __future__ import annotations

import json
from typing import TYPE_CHECKING, Any

import pandas as pd
import pytest
from click.testing import CliRunner

from src.workflows.common import check
from src.workflows.entrypoint import cli
from src.workflows.reproduce import command

if TYPE_CHECKING:
    from pathlib import Path

    from pytest_mock import MockerFixture


def _reproduce(out_dir: Path, *args: str) -> tuple[int, dict[str, Any]]:
    result = CliRunner().invoke(cli, ["reproduce", *args, "--out", str(out_dir)])
    assert result.exit_code in {0, 2}, result.output
    return result.exit_code, json.loads(result.stdout)


def test_figure_4_passes_and_writes_trajectories(tmp_path: Path) -> None:
    code, report = _reproduce(tmp_path, "4")
    assert code == 0, [c for c in report["checks"] if not c["passed"]]
    assert report["passed"] is True
    assert {"mu=0.8", "mu=2"} <= set(report["results"])
    assert (tmp_path / "solve-mu0.8.csv").exists()
    assert (tmp_path / "solve-mu2.csv").exists()
    assert json.loads((tmp_path / "report.json").read_text(encoding="utf-8"))["passed"] is True


def test_figure_5_subcritical_regime(tmp_path: Path) -> None:
    code, report = _reproduce(tmp_path, "5", "--mu", "0.8")
    assert code == 0, [c for c in report["checks"] if not c["passed"]]
    assert set(report["results"]) == {"mu=0.8"}
    assert report["results"]["mu=0.8"]["theory_rate"] == pytest.approx(0.4)


def test_figure_6_sweep(tmp_path: Path) -> None:
    code, report = _reproduce(tmp_path, "6")
    assert code == 0, [c for c in report["checks"] if not c["passed"]]
    rates = pd.read_csv(tmp_path / "rates.csv")
    assert rates["nu"].tolist() == [0.5, 1.0, 1.5, 2.0, 2.5, 3.0]
    assert (rates["rate"] > 0.0).all()
    assert "conjectured_relative_error" in report["results"]["mu=2"]


def test_figure_2_overpopulated_regime(tmp_path: Path) -> None:
    code, report = _reproduce(tmp_path, "2", "--mu", "2", "--seed", "5")
    assert code == 0, [c for c in report["checks"] if not c["passed"]]
    assert report["seed"] == 5  # noqa: PLR2004
    frame = pd.read_csv(tmp_path / "abm-mu2.csv")
    assert frame["t"].max() == 10.0  # noqa: PLR2004


def test_failed_gate_exits_with_two(tmp_path: Path, mocker: MockerFixture) -> None:
    def failing(cfg: Any, seed: int, out_dir: Path) -> tuple[list[dict[str, Any]], dict[str, Any]]:  # noqa: ARG001
        return [check("always fails", 1.0, 0.5)], {"note": "forced"}

    mocker.patch.dict(command.FIGURES, {4: failing})
    code, report = _reproduce(tmp_path, "4")

    assert code == 2  # noqa: PLR2004
    assert report["passed"] is False
    assert report["checks"][0]["relation"] == "<="
    assert (tmp_path / "report.json").exists()
