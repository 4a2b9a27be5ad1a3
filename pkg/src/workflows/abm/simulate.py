from __future__ import annotations

from pathlib import Path
from typing import Any

import click
import numpy as np

from src.core.configs.experiments import SimulateConfig
from src.core.settings import current_settings
from src.dispersion.abm import parse_placement, run_ensemble
from src.dispersion.io import write_ensemble_csv
from src.utils.logging import get_logger
from src.utils.serialization import dump_json
from src.workflows.common import config_options, default_output, execute

_logger = get_logger(__name__)


def _simulate(cfg: SimulateConfig) -> dict[str, Any]:
    placement = parse_placement(cfg.placement, cfg.particles)
    seed = cfg.seed if cfg.seed is not None else current_settings().seed
    results = run_ensemble(
        n_sites=cfg.sites,
        placement=placement,
        t_end=cfg.t_end,
        sample_times=cfg.samples or [],
        seed=seed,
        replicates=cfg.replicates,
        n_max=cfg.n_max,
        jobs=cfg.jobs,
    )

    n_particles = placement.n_particles
    out = cfg.out or default_output("simulate", f"simulate-N{cfg.sites}-M{n_particles}.csv")
    write_ensemble_csv(results, out)
    report = {
        "command": "simulate",
        "sites": cfg.sites,
        "particles": n_particles,
        "mean_occupancy": n_particles / cfg.sites,
        "placement": cfg.placement,
        "seed": seed,
        "replicates": cfg.replicates,
        "t_end": cfg.t_end,
        "termination_times": [r.termination_time for r in results],
        "events": [r.events for r in results],
        "max_occupancy": [r.max_occupancy for r in results],
        "mean_events": float(np.mean([r.events for r in results])),
        "csv": out,
    }
    dump_json(report, out.with_suffix(".json"))
    return report


@click.command(help="Run the particle system with the exact Gillespie algorithm and write sampled occupancy counts")
@click.option("--sites", type=int, help="Number of sites N (default 1000)")
@click.option("--particles", type=int, help="Number of particles M")
@click.option("--placement", type=str, help="all-at-one | even | counts:<c1>,<c2>,...")
@click.option("--t-end", "t_end", type=float, help="Final time (default 10)")
@click.option("--samples", type=str, help="Comma separated sample times or linspace:<start>:<stop>:<count>")
@click.option("--seed", type=int, help="Base seed; replicate r uses seed + r")
@click.option("--replicates", type=int, help="Number of independent runs (default 1)")
@click.option("--jobs", type=int, help="Worker processes for the replicates (default 1)")
@click.option("--nmax", "n_max", type=int, help="Largest tracked occupancy (default 100)")
@click.option(
    "--out",
    type=click.Path(path_type=Path, dir_okay=False, resolve_path=True),
    help="CSV output path - will write under ./data/simulate if not provided",
)
@config_options
def simulate(
    sites: int | None,
    particles: int | None,
    placement: str | None,
    t_end: float | None,
    samples: str | None,
    seed: int | None,
    replicates: int | None,
    jobs: int | None,
    n_max: int | None,
    out: Path | None,
    config_path: Path | None,
    *,
    dump_config: bool,
) -> None:
    values = {
        "sites": sites,
        "particles": particles,
        "placement": placement,
        "t_end": t_end,
        "samples": samples,
        "seed": seed,
        "replicates": replicates,
        "jobs": jobs,
        "n_max": n_max,
        "out": out,
    }
    execute(SimulateConfig, values, config_path, _simulate, dump_config=dump_config)
