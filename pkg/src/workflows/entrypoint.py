from __future__ import annotations

import click

from src.core.settings import current_settings
from src.utils.logging import set_log_level
from src.workflows.abm.simulate import simulate
from src.workflows.meanfield.equilibrium import equilibrium
from src.workflows.meanfield.pgf_check import pgf_check
from src.workflows.meanfield.rates import rates
from src.workflows.meanfield.solve import solve
from src.workflows.reproduce.command import reproduce


@click.group()
def cli() -> None:
    """Mean-field dispersion process: equilibria, ODE solves, particle simulations and rate checks."""
    set_log_level(current_settings().log_level.upper())


cli.add_command(equilibrium, name="equilibrium")
cli.add_command(solve, name="solve")
cli.add_command(simulate, name="simulate")
cli.add_command(pgf_check, name="pgf-check")
cli.add_command(rates, name="rates")
cli.add_command(reproduce, name="reproduce")


if __name__ == "__main__":
    cli()
