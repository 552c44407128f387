"""
Коэффициенты моделей галереи: base·(1 + amplitude·sin(frequency·t))
"""
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class Coefficient(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    base: float
    amplitude: float = 0.0
    frequency: float = 1.0

    @model_validator(mode="before")
    @classmethod
    def _from_number(cls, data):
        if isinstance(data, (int, float)):
            return {"base": float(data)}
        return data

    def value(self, t: float) -> float:
        return self.base * (1.0 + self.amplitude * np.sin(self.frequency * t))

    @property
    def minimum(self) -> float:
        return min(self.base * (1.0 - abs(self.amplitude)), self.base * (1.0 + abs(self.amplitude)))

    @property
    def positive(self) -> bool:
        return self.minimum > 0


class ThermoplasticCoefficients(BaseModel):
    """M, C, w, κ - коэффициенты; c - связь; τ₀ - релаксация; s0 - радиус насыщения"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    mass: Coefficient = Coefficient(base=1.0)
    stiffness: Coefficient = Coefficient(base=1.0)
    heat_capacity: Coefficient = Coefficient(base=1.0)
    conductivity: Coefficient = Coefficient(base=1.0)
    coupling: float = Field(default=1.0, gt=0)
    tau0: float = Field(default=1.0, gt=0)
    saturation: float = Field(default=1.0, gt=0)


class ViscoplasticCoefficients(BaseModel):
    """M, D, L - коэффициенты; B = coupling·(базис Sym(3)) на N внутренних переменных"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    mass: Coefficient = Coefficient(base=1.0)
    compliance: Coefficient = Coefficient(base=1.0)
    internal: Coefficient = Coefficient(base=1.0)
    internal_dim: int = Field(default=5, ge=1, le=6)
    coupling: float = 1.0
    b_matrix: Optional[list] = None
    relation: str = "soft_threshold"
    relation_weight: float = Field(default=1.0, gt=0)
