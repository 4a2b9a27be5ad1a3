from __future__ import annotations

import json
from enum import Enum
from pathlib import Path

import numpy as np
import pytest

from src import consts
from src.utils.serialization import JsonEncoder, dump_json, to_json


class _Kind(str, Enum):
    A = "a"


def test_path_serialization() -> None:
    test_path = Path("/home/user/documents")
    expected = '"/home/user/documents"'
    assert json.dumps(test_path, cls=JsonEncoder) == expected


@pytest.mark.parametrize(
    ("value", "expected"),
    [
        (np.int64(3), "3"),
        (np.float64(0.25), "0.25"),
        (np.bool_(True), "true"),
        (np.array([1.0, 2.0]), "[1.0, 2.0]"),
        (complex(1, 2), "[1.0, 2.0]"),
        (_Kind.A, '"a"'),
    ],
)
def test_numpy_and_domain_values(value: object, expected: str) -> None:
    assert json.dumps(value, cls=JsonEncoder) == expected


def test_unsupported_type_serialization() -> None:
    with pytest.raises(TypeError):
        json.dumps({"key": object()}, cls=JsonEncoder)


def test_to_json_adds_schema_version() -> None:
    payload = json.loads(to_json({"value": np.float64(1.5)}))
    assert payload == {"schema_version": consts.serialization.SCHEMA_VERSION, "value": 1.5}


def test_dump_json_creates_parents(tmp_path: Path) -> None:
    path = dump_json({"x": 1}, tmp_path / "a" / "b.json")
    assert json.loads(path.read_text(encoding="utf-8"))["x"] == 1


def test_float_round_trip_is_exact() -> None:
    value = 0.1 + 0.2
    assert json.loads(to_json({"v": value}))["v"] == value
