from __future__ import annotations

import json
from typing import TYPE_CHECKING
from unittest.mock import MagicMock, patch

import pytest
from pydantic import ValidationError

from src.core.configs.argument_parsing import resolve_config
from src.core.configs.base import ConfigBase

if TYPE_CHECKING:
    from pathlib import Path


class TestConfig(ConfigBase):
    a: int
    b: str = "default"


@patch("src.core.configs.argument_parsing._logger")
def test_resolve_config_from_flags(mock_logger: MagicMock) -> None:
    config = resolve_config(TestConfig, {"a": 123, "b": "test"})

    assert isinstance(config, TestConfig)
    assert config.a == 123  # noqa: PLR2004
    assert config.b == "test"
    mock_logger.info.assert_called_with("Running with following config: %(cfg)s", {"cfg": config})


def test_resolve_config_unset_flags_fall_back_to_defaults() -> None:
    config = resolve_config(TestConfig, {"a": 1, "b": None})
    assert config.b == "default"


@patch("src.core.configs.argument_parsing._logger")
def test_resolve_config_unknown_arguments(mock_logger: MagicMock) -> None:
    _ = resolve_config(TestConfig, {"a": 1, "unknown": "value"})
    mock_logger.info.assert_any_call("Unknown args: %(unknown_args)s", {"unknown_args": ["unknown"]})


def test_resolve_config_flags_override_config_file(tmp_path: Path) -> None:
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"a": 1, "b": "from-file"}), encoding="utf-8")

    assert resolve_config(TestConfig, {"a": None, "b": None}, path) == TestConfig(a=1, b="from-file")
    assert resolve_config(TestConfig, {"a": 7, "b": None}, path) == TestConfig(a=7, b="from-file")


def test_resolve_config_rejects_unknown_fields_in_file(tmp_path: Path) -> None:
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"a": 1, "c": 2}), encoding="utf-8")

    with pytest.raises(ValidationError):
        resolve_config(TestConfig, {}, path)
