from __future__ import annotations

from pathlib import Path
from typing import Any

import click

from src.core.configs.experiments import SolveConfig
from src.dispersion.equilibria import equilibrium_for
from src.dispersion.exceptions import TruncationTooSmallError
from src.dispersion.initial_conditions import initial_condition
from src.dispersion.io import write_trajectory_csv
from src.dispersion.meanfield import conservation_errors, solve as solve_meanfield
from src.dispersion.metrics import ell1_dist
from src.dispersion.params import ModelParams
from src.utils.logging import get_logger
from src.utils.serialization import dump_json
from src.workflows.common import config_options, default_output, execute

_logger = get_logger(__name__)


def _solve(cfg: SolveConfig) -> dict[str, Any]:
    params = ModelParams(mu=cfg.mu, n_max=cfg.n_max, dt=cfg.dt)
    p0 = initial_condition(cfg.init, params.mu, params.n_max)
    traj = solve_meanfield(p0, params.mu, cfg.t_end, params.dt, cfg.record_every)

    out = cfg.out or default_output("solve", f"solve-mu{cfg.mu:g}.csv")
    write_trajectory_csv(traj, out)

    try:
        distance: float | None = ell1_dist(traj.final, equilibrium_for(params.mu, params.n_max).pmf)
    except TruncationTooSmallError:
        _logger.warning("n_max=%d is too small for the equilibrium at mu=%s; skipping the distance", cfg.n_max, cfg.mu)
        distance = None
    mass_error, mean_error = conservation_errors(traj)
    report = {
        "command": "solve",
        "mu": params.mu,
        "nu": params.nu,
        "init": cfg.init,
        "t_end": cfg.t_end,
        "dt": params.dt,
        "n_max": params.n_max,
        "samples": len(traj),
        "max_mass_error": mass_error,
        "max_mean_error": mean_error,
        "final_l1_to_equilibrium": distance,
        "final_energy": float(traj.energy_series[-1]),
        "csv": out,
    }
    dump_json(report, out.with_suffix(".json"))
    return report


@click.command(help="Integrate the truncated mean-field equation with RK4 and write the trajectory as CSV")
@click.option("--mu", type=float, help="Mean number of particles per site")
@click.option("--init", type=str, help="delta:<n> | bernoulli | ztp | csv:<path> | split:<n>:<mass> | twopoint")
@click.option("--t-end", "t_end", type=float, help="Final time (default 10)")
@click.option("--dt", type=float, help="RK4 step (default 0.01)")
@click.option("--nmax", "n_max", type=int, help="Truncation index (default 100)")
@click.option("--record-every", "record_every", type=int, help="Keep every k-th step (default 1)")
@click.option(
    "--out",
    type=click.Path(path_type=Path, dir_okay=False, resolve_path=True),
    help="CSV output path - will write under ./data/solve if not provided",
)
@config_options
def solve(
    mu: float | None,
    init: str | None,
    t_end: float | None,
    dt: float | None,
    n_max: int | None,
    record_every: int | None,
    out: Path | None,
    config_path: Path | None,
    *,
    dump_config: bool,
) -> None:
    values = {
        "mu": mu,
        "init": init,
        "t_end": t_end,
        "dt": dt,
        "n_max": n_max,
        "record_every": record_every,
        "out": out,
    }
    execute(SolveConfig, values, config_path, _solve, dump_config=dump_config)
