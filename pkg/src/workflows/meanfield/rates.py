from __future__ import annotations

from pathlib import Path
from typing import Any

import click

from src.core.configs.experiments import RatesConfig
from src.dispersion.equilibria import bernoulli_equilibrium, theory_rate, ztp_equilibrium
from src.dispersion.io import read_trajectory_csv
from src.dispersion.metrics import FitModel, distance_series, fit_decay, last_above_floor
from src.utils.logging import get_logger
from src.utils.serialization import dump_json
from src.workflows.common import config_options, execute

_logger = get_logger(__name__)


def _rates(cfg: RatesConfig) -> dict[str, Any]:
    traj = read_trajectory_csv(cfg.trajectory)
    builder = bernoulli_equilibrium if cfg.target == "bernoulli" else ztp_equilibrium
    target = builder(traj.mu, traj.n_max).pmf
    errors = distance_series(traj, target, "l1")

    t_lo, t_hi = cfg.window
    t_hi = min(t_hi, last_above_floor(traj.times, errors))
    fit = fit_decay(traj.times, errors, (t_lo, t_hi), cfg.model)
    proven, conjectured = theory_rate(traj.mu)
    report = {
        "command": "rates",
        "mu": traj.mu,
        "target": cfg.target,
        "rate": fit.rate,
        "theory_rate": proven,
        "conjectured_rate": conjectured,
        "ratio": fit.rate / proven if proven > 0.0 else None,
        "rmse": fit.rmse,
        "window": fit.window,
        "model": fit.model,
        "power": fit.power,
        "n_points": fit.n_points,
    }
    if cfg.out is not None:
        dump_json(report, cfg.out)
    return report


@click.command(help="Fit the decay rate of the l1 distance between a trajectory and its equilibrium")
@click.option(
    "--trajectory",
    type=click.Path(exists=True, dir_okay=False, path_type=Path, resolve_path=True),
    help="Trajectory CSV written by the solve command",
)
@click.option("--target", type=click.Choice(["bernoulli", "ztp"]), help="Equilibrium to measure against")
@click.option("--window", type=str, help="Fit window as <t_lo>:<t_hi> (default 2:10)")
@click.option("--model", type=click.Choice([m.value for m in FitModel]), help="exp or exp-poly")
@click.option("--out", type=click.Path(path_type=Path, dir_okay=False, resolve_path=True), help="JSON report path")
@config_options
def rates(
    trajectory: Path | None,
    target: str | None,
    window: str | None,
    model: str | None,
    out: Path | None,
    config_path: Path | None,
    *,
    dump_config: bool,
) -> None:
    values = {"trajectory": trajectory, "target": target, "window": window, "model": model, "out": out}
    execute(RatesConfig, values, config_path, _rates, dump_config=dump_config)
