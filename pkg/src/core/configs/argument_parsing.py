from __future__ import annotations

import json
from typing import TYPE_CHECKING, Any, Mapping, TypeVar

from src.core.configs.base import ConfigBase
from src.utils.logging import get_logger

if TYPE_CHECKING:
    from pathlib import Path

_logger = get_logger(__name__)
T = TypeVar("T", bound=ConfigBase)


def resolve_config(cfg_cls: type[T], cli_values: Mapping[str, Any], config_path: Path | None = None) -> T:
    """Builds the config of a command from defaults, a JSON config file and command line flags.

    Flags left unset (``None``) fall through to the config file, and fields missing there fall back to the
    class defaults.

    Args:
        cfg_cls: The class of the config to use.
            Anything inheriting from :class:`src.core.configs.base.ConfigBase` will work.
        cli_values: Flag values keyed by config field name.
        config_path: Optional JSON file with config fields.

    Returns:
         A config instance of type given by `cfg_cls`.

    """
    values: dict[str, Any] = {}
    if config_path is not None:
        values.update(json.loads(config_path.read_text(encoding="utf-8")))
        _logger.info("Loaded config file: %(path)s", {"path": config_path})
    overrides = {k: v for k, v in cli_values.items() if v is not None}
    ignored = sorted(set(overrides) - set(cfg_cls.model_fields))
    if ignored:
        _logger.info("Unknown args: %(unknown_args)s", {"unknown_args": ignored})
    values.update({k: v for k, v in overrides.items() if k in cfg_cls.model_fields})
    cfg = cfg_cls(**values)
    _logger.info("Running with following config: %(cfg)s", {"cfg": cfg})
    return cfg
