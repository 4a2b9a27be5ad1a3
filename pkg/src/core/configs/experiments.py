"""Configs of the command line experiments.

Defaults follow the reference numerical set-up: 1000 sites, step 0.01 and 101 retained components.
"""

from __future__ import annotations

from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import Field, field_validator, model_validator

from src import consts
from src.core.configs.base import ConfigBase
from src.dispersion.metrics import FitModel


def _split_floats(value: object, sep: str) -> object:
    if isinstance(value, str):
        return [float(v) for v in value.split(sep) if v.strip()]
    return value


class EquilibriumConfig(ConfigBase):
    mu: float = Field(gt=0.0)
    n_max: int = Field(default=consts.model.N_MAX, ge=1)
    out: Path | None = None


class SolveConfig(ConfigBase):
    mu: float = Field(gt=0.0)
    init: str = "twopoint"
    t_end: float = Field(default=consts.model.T_END, gt=0.0)
    dt: float = Field(default=consts.model.DT, gt=0.0)
    n_max: int = Field(default=consts.model.N_MAX, ge=1)
    record_every: int = Field(default=consts.model.RECORD_EVERY, ge=1)
    out: Path | None = None


class SimulateConfig(ConfigBase):
    """Agent-based run.

    ``samples`` accepts a comma separated list or ``linspace:<start>:<stop>:<count>``; by default 101 equally
    spaced times on ``[0, t_end]``.
    """

    sites: int = Field(default=consts.model.N_SITES, ge=2)
    particles: int | None = Field(default=None, ge=0)
    placement: str = "all-at-one"
    t_end: float = Field(default=consts.model.T_END, gt=0.0)
    samples: list[float] | None = None
    seed: int | None = None
    replicates: int = Field(default=1, ge=1)
    jobs: int = Field(default=1, ge=1)
    n_max: int = Field(default=consts.model.N_MAX, ge=1)
    out: Path | None = None

    @field_validator("samples", mode="before")
    @classmethod
    def _parse_samples(cls, value: object) -> object:
        if isinstance(value, str) and value.startswith("linspace:"):
            start, stop, count = value.removeprefix("linspace:").split(":")
            return np.linspace(float(start), float(stop), int(count)).tolist()
        return _split_floats(value, ",")

    @model_validator(mode="after")
    def _default_samples(self) -> SimulateConfig:
        if self.samples is None:
            self.samples = np.linspace(0.0, self.t_end, 101).tolist()
        return self


class PgfCheckConfig(ConfigBase):
    trajectory: Path
    times: list[float] = Field(default_factory=lambda: [1.0, 5.0])
    grid: int = Field(default=16, ge=1)
    out: Path | None = None

    @field_validator("times", mode="before")
    @classmethod
    def _parse_times(cls, value: object) -> object:
        return _split_floats(value, ",")


class RatesConfig(ConfigBase):
    trajectory: Path
    target: Literal["bernoulli", "ztp"]
    window: tuple[float, float] = (consts.model.FIT_WINDOW_START, consts.model.T_END)
    model: FitModel = FitModel.PURE_EXPONENTIAL
    out: Path | None = None

    @field_validator("window", mode="before")
    @classmethod
    def _parse_window(cls, value: object) -> object:
        return _split_floats(value, ":")


class ReproduceConfig(ConfigBase):
    """Re-runs the set-up behind one of the reference figures and gates it against the acceptance thresholds.

    ``mu`` restricts figures 2, 4 and 5 to one of their two regimes; unset runs both.
    """

    figure: Literal[2, 3, 4, 5, 6]
    mu: float | None = Field(default=None, gt=0.0)
    sites: int = Field(default=consts.model.N_SITES, ge=2)
    dt: float = Field(default=consts.model.DT, gt=0.0)
    n_max: int = Field(default=consts.model.N_MAX, ge=1)
    seed: int | None = None
    replicates: int | None = Field(default=None, ge=1)
    jobs: int = Field(default=1, ge=1)
    out: Path | None = None
