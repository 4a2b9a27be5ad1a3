from __future__ import annotations

from src.consts import compute, directories, logging, model, reproducibility, serialization

__all__ = ["compute", "directories", "logging", "model", "reproducibility", "serialization"]
