from __future__ import annotations

from pathlib import Path
from typing import Any

import click

from src.core.configs.experiments import EquilibriumConfig
from src.dispersion.equilibria import equilibrium_for
from src.dispersion.io import write_pmf_csv
from src.dispersion.meanfield import energy
from src.dispersion.pmf import moment
from src.utils.logging import get_logger
from src.utils.serialization import dump_json
from src.workflows.common import config_options, default_output, execute

_logger = get_logger(__name__)


def _equilibrium(cfg: EquilibriumConfig) -> dict[str, Any]:
    eq = equilibrium_for(cfg.mu, cfg.n_max)
    out = cfg.out or default_output("equilibrium", f"equilibrium-mu{cfg.mu:g}.csv")
    write_pmf_csv(eq.pmf, out)
    report = {
        "command": "equilibrium",
        "kind": eq.kind,
        "mu": cfg.mu,
        "nu": eq.nu,
        "n_max": eq.pmf.n_max,
        "mass": eq.pmf.mass,
        "mean": moment(eq.pmf, 1),
        "energy": energy(eq.pmf, cfg.mu),
        "csv": out,
    }
    dump_json(report, out.with_suffix(".json"))
    _logger.info("Equilibrium written to %s", out)
    return report


@click.command(help="Write the equilibrium distribution for a mean occupancy as CSV and report nu as JSON")
@click.option("--mu", type=float, help="Mean number of particles per site")
@click.option("--nmax", "n_max", type=int, help="Truncation index (default 100)")
@click.option(
    "--out",
    type=click.Path(path_type=Path, dir_okay=False, resolve_path=True),
    help="CSV output path - will write under ./data/equilibrium if not provided",
)
@config_options
def equilibrium(
    mu: float | None,
    n_max: int | None,
    out: Path | None,
    config_path: Path | None,
    *,
    dump_config: bool,
) -> None:
    execute(
        EquilibriumConfig, {"mu": mu, "n_max": n_max, "out": out}, config_path, _equilibrium, dump_config=dump_config
    )
