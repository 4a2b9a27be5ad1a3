from __future__ import annotations

import math
from pathlib import Path
from typing import Any

import click
import numpy as np

from src.core.configs.experiments import PgfCheckConfig
from src.dispersion.equilibria import nu_of_mu
from src.dispersion.exceptions import OffGridError
from src.dispersion.io import read_trajectory_csv
from src.dispersion.pgf import explicit_pgf, pgf_eval, v_bounds, v_from_trajectory, volterra_residual
from src.utils.logging import get_logger
from src.utils.serialization import dump_json
from src.workflows.common import config_options, execute

_logger = get_logger(__name__)


def unit_circle_shift(grid: int) -> np.ndarray:
    """Points ``z = 1 - e^{i theta}`` for which ``1 - z`` runs over ``grid`` points of the unit circle."""
    return 1.0 - np.exp(2j * np.pi * np.arange(grid) / grid)


def _pgf_check(cfg: PgfCheckConfig) -> dict[str, Any]:
    traj = read_trajectory_csv(cfg.trajectory)
    aux = v_from_trajectory(traj)
    residual = volterra_residual(traj, aux)

    z = unit_circle_shift(cfg.grid)
    per_time = {}
    for t in cfg.times:
        idx = traj.index_of(t)
        if idx is None:
            msg = f"t={t} is not a sample time of {cfg.trajectory}"
            raise OffGridError(msg)
        direct = np.asarray(pgf_eval(traj.pmf(idx), 1.0 - z))
        formula = np.asarray(explicit_pgf(t, z, traj.initial, aux))
        per_time[f"{t:g}"] = float(np.max(np.abs(direct - formula)))

    lower, upper = v_bounds(aux.times, aux.mu)
    log_v = aux.log_v
    nu = nu_of_mu(traj.mu) if traj.mu > 1.0 else None
    v_limit = float(aux.v_series[-1])
    report = {
        "command": "pgf-check",
        "mu": traj.mu,
        "nu": nu,
        "max_residual_volterra": float(residual.max()),
        "max_residual_pgf": max(per_time.values()) if per_time else None,
        "residual_pgf_by_time": per_time,
        "v_limit": v_limit,
        "v_limit_error": abs(v_limit - math.exp(nu)) if nu is not None else None,
        "v_bounds_hold": bool(np.all(log_v >= lower - 1e-12) and np.all(log_v <= upper + 1e-12)),
    }
    if cfg.out is not None:
        dump_json(report, cfg.out)
    return report


@click.command(help="Check the generating-function identities along a solved trajectory")
@click.option(
    "--trajectory",
    type=click.Path(exists=True, dir_okay=False, path_type=Path, resolve_path=True),
    help="Trajectory CSV written by the solve command, on a uniform grid",
)
@click.option("--times", type=str, help="Comma separated sample times for the explicit formula (default 1,5)")
@click.option("--grid", type=int, help="Number of unit-circle points (default 16)")
@click.option("--out", type=click.Path(path_type=Path, dir_okay=False, resolve_path=True), help="JSON report path")
@config_options
def pgf_check(
    trajectory: Path | None,
    times: str | None,
    grid: int | None,
    out: Path | None,
    config_path: Path | None,
    *,
    dump_config: bool,
) -> None:
    values = {"trajectory": trajectory, "times": times, "grid": grid, "out": out}
    execute(PgfCheckConfig, values, config_path, _pgf_check, dump_config=dump_config)
