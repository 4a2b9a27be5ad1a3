from __future__ import annotations

import json
from enum import Enum
from json import JSONEncoder
from pathlib import Path
from typing import Any

import numpy as np

from src import consts


class JsonEncoder(JSONEncoder):
    """Custom JSON encoder for numpy values, paths, enums and complex numbers."""

    def default(self, o: Any) -> Any:
        if isinstance(o, np.integer):
            return int(o)

        if isinstance(o, np.floating):
            return float(o)

        if isinstance(o, np.bool_):
            return bool(o)

        if isinstance(o, np.ndarray):
            return o.tolist()

        if isinstance(o, (complex, np.complexfloating)):
            return [float(o.real), float(o.imag)]

        if isinstance(o, Enum):
            return o.value

        if isinstance(o, Path):
            return o.as_posix()

        return super().default(o)


def to_json(payload: dict[str, Any]) -> str:
    """Serializes a report, stamping it with the output schema version.

    Args:
        payload: The report fields.

    Returns:
        Indented JSON text.

    """
    return json.dumps({"schema_version": consts.serialization.SCHEMA_VERSION, **payload}, indent=4, cls=JsonEncoder)


def dump_json(payload: dict[str, Any], path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(to_json(payload) + "\n", encoding="utf-8")
    return path
