from __future__ import annotations

from pathlib import Path
from typing import Any

import click

from src.core.configs.experiments import ReproduceConfig
from src.core.settings import current_settings
from src.utils.logging import get_logger
from src.utils.serialization import dump_json
from src.workflows.common import config_options, default_output, execute
from src.workflows.reproduce.figures import FIGURES

_logger = get_logger(__name__)


def _reproduce(cfg: ReproduceConfig) -> dict[str, Any]:
    out_dir = cfg.out or default_output("reproduce", f"figure-{cfg.figure}")
    out_dir.mkdir(parents=True, exist_ok=True)
    seed = cfg.seed if cfg.seed is not None else current_settings().seed

    checks, summary = FIGURES[cfg.figure](cfg, seed, out_dir)
    report = {
        "command": "reproduce",
        "figure": cfg.figure,
        "seed": seed,
        "passed": all(c["passed"] for c in checks),
        "checks": checks,
        "results": summary,
        "out_dir": out_dir,
    }
    dump_json(report, out_dir / "report.json")
    _logger.info("Figure %d data written to %s", cfg.figure, out_dir)
    return report


@click.command(help="Re-run the set-up of figure 2-6 and gate it against the acceptance thresholds")
@click.argument("figure", type=click.IntRange(2, 6), required=False)
@click.option("--mu", type=float, help="Run only the regime with this mean occupancy (figures 2, 4 and 5)")
@click.option("--sites", type=int, help="Number of sites for agent-based figures (default 1000)")
@click.option("--dt", type=float, help="RK4 step (default 0.01)")
@click.option("--nmax", "n_max", type=int, help="Truncation index (default 100)")
@click.option("--seed", type=int, help="Base seed of the agent-based figures")
@click.option("--replicates", type=int, help="Replicates per agent-based regime")
@click.option("--jobs", type=int, help="Worker processes for the replicates (default 1)")
@click.option(
    "--out",
    type=click.Path(path_type=Path, file_okay=False, resolve_path=True),
    help="Output directory - will write under ./data/reproduce if not provided",
)
@config_options
def reproduce(
    figure: int | None,
    mu: float | None,
    sites: int | None,
    dt: float | None,
    n_max: int | None,
    seed: int | None,
    replicates: int | None,
    jobs: int | None,
    out: Path | None,
    config_path: Path | None,
    *,
    dump_config: bool,
) -> None:
    values = {
        "figure": figure,
        "mu": mu,
        "sites": sites,
        "dt": dt,
        "n_max": n_max,
        "seed": seed,
        "replicates": replicates,
        "jobs": jobs,
        "out": out,
    }
    execute(ReproduceConfig, values, config_path, _reproduce, dump_config=dump_config)
