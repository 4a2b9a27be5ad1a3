from __future__ import annotations

import math

from pydantic import BaseModel, ConfigDict, Field, model_validator

from src import consts
from src.dispersion.equilibria import nu_of_mu


class ModelParams(BaseModel):
    """Physical and numerical parameters of one mean-field run.

    ``nu`` is derived from ``mu`` when ``mu > 1`` and left unset otherwise.
    """

    model_config = ConfigDict(frozen=True)

    mu: float = Field(gt=0.0)
    n_max: int = Field(default=consts.model.N_MAX, ge=1)
    dt: float = Field(default=consts.model.DT, gt=0.0)
    tol_mass: float = Field(default=consts.compute.TOL_MASS, gt=0.0)
    tol_fixedpoint: float = Field(default=consts.compute.TOL_FIXEDPOINT, gt=0.0)
    nu: float | None = None

    @model_validator(mode="after")
    def _derive_nu(self) -> ModelParams:
        if self.mu <= 1.0:
            object.__setattr__(self, "nu", None)
            return self
        nu = nu_of_mu(self.mu)
        residual = abs(nu - self.mu * -math.expm1(-nu))
        if residual > self.tol_fixedpoint * max(1.0, self.mu):
            msg = f"nu={nu!r} misses the fixed-point relation by {residual:.3e}"
            raise ValueError(msg)
        object.__setattr__(self, "nu", nu)
        return self

    @property
    def supercritical(self) -> bool:
        return self.mu > 1.0
