from __future__ import annotations

from src.core.configs.argument_parsing import resolve_config
from src.core.configs.base import ConfigBase

__all__ = ["ConfigBase", "resolve_config"]
