from __future__ import annotations

from pathlib import Path
from typing import Any, Callable, Mapping, TypeVar

import click

from src import consts
from src.core.configs.argument_parsing import resolve_config
from src.core.configs.base import ConfigBase
from src.utils.logging import get_logger
from src.utils.serialization import to_json

_logger = get_logger(__name__)
T = TypeVar("T", bound=ConfigBase)
F = TypeVar("F", bound=Callable[..., Any])

EXIT_VALIDATION = 1
EXIT_ACCEPTANCE = 2


def config_options(func: F) -> F:
    """Adds ``--config`` and ``--dump-config`` to a command."""
    func = click.option(
        "--config",
        "config_path",
        type=click.Path(exists=True, dir_okay=False, path_type=Path, resolve_path=True),
        help="JSON file with config fields; explicit flags take precedence",
    )(func)
    return click.option("--dump-config", is_flag=True, help="Print the resolved config as JSON and exit")(func)


def default_output(*parts: str) -> Path:
    return consts.directories.LOCAL_DATA_DIR.joinpath(*parts)


def _fail(err: Exception, code: int) -> None:
    _logger.error("%s: %s", type(err).__name__, err)
    click.echo(to_json({"error": type(err).__name__, "message": str(err)}), err=True)
    raise click.exceptions.Exit(code)


def execute(
    cfg_cls: type[T],
    cli_values: Mapping[str, Any],
    config_path: Path | None,
    action: Callable[[T], dict[str, Any]],
    *,
    dump_config: bool = False,
) -> None:
    """Resolves the config, runs the command body and maps failures to exit codes.

    Invalid input exits with 1. A report whose ``passed`` field is false exits with 2 after being printed.
    """
    try:
        cfg = resolve_config(cfg_cls, cli_values, config_path)
    except (ValueError, OSError) as e:
        _fail(e, EXIT_VALIDATION)
        return
    if dump_config:
        click.echo(str(cfg))
        return

    try:
        report = action(cfg)
    except (ValueError, OSError) as e:
        _fail(e, EXIT_VALIDATION)
        return

    click.echo(to_json(report))
    if report.get("passed") is False:
        _logger.error("Acceptance checks failed: %s", [c["name"] for c in report.get("checks", []) if not c["passed"]])
        raise click.exceptions.Exit(EXIT_ACCEPTANCE)


def check(name: str, value: float, threshold: float, *, at_most: bool = True) -> dict[str, Any]:
    """One acceptance comparison, ``value <= threshold`` or ``value >= threshold``."""
    passed = value <= threshold if at_most else value >= threshold
    return {
        "name": name,
        "value": value,
        "threshold": threshold,
        "relation": "<=" if at_most else ">=",
        "passed": bool(passed),
    }
