from __future__ import annotations

from typing import TYPE_CHECKING

from pydantic import BaseModel, ConfigDict

if TYPE_CHECKING:
    from pathlib import Path


class ConfigBase(BaseModel):
    """A base class for all entrypoint config classes."""

    model_config = ConfigDict(extra="forbid")

    def __str__(self) -> str:
        return self.model_dump_json(indent=4)  # type: ignore[no-any-return]

    def dump(self, path: Path) -> Path:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(str(self) + "\n", encoding="utf-8")
        return path
