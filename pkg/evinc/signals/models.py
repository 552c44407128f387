"""
Модели данных: временная сетка и взвешенный сигнал
evinc/signals/models.py
"""
from enum import Enum
from typing import Callable

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from evinc.exceptions import ContractViolation


class CutoffSide(str, Enum):
    PAST = "past"
    FUTURE = "future"


class TimeGrid(BaseModel):
    """Узлы t_k = t0 + k·dt, k = 0..n-1; до t0 сигналы равны нулю"""

    model_config = ConfigDict(frozen=True)

    t0: float = 0.0
    dt: float = Field(gt=0)
    n: int = Field(ge=2)

    @classmethod
    def from_horizon(cls, t0: float, dt: float, horizon: float) -> "TimeGrid":
        """Сетка, покрывающая [t0, t0 + horizon]"""
        return cls(t0=t0, dt=dt, n=int(round(horizon / dt)) + 1)

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n, dtype=float)

    @property
    def t_end(self) -> float:
        return self.t0 + (self.n - 1) * self.dt

    def weights(self, rho: float) -> np.ndarray:
        """Квадратурные веса e^{-2ρt_k}·dt (левые прямоугольники)"""
        return np.exp(-2.0 * rho * self.times) * self.dt

    def refined(self) -> "TimeGrid":
        """Та же область с шагом dt/2"""
        return TimeGrid(t0=self.t0, dt=self.dt / 2, n=2 * (self.n - 1) + 1)


class WeightedSignal(BaseModel):
    """Вектор-функция на сетке вместе с весом ρ; значения только для чтения"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: TimeGrid
    values: np.ndarray
    rho: float

    @field_validator("values", mode="before")
    @classmethod
    def _as_matrix(cls, values):
        array = np.array(values, dtype=float)
        if array.ndim == 1:
            array = array.reshape(-1, 1)
        if array.ndim != 2 or array.shape[1] < 1:
            raise ContractViolation(f"values must be (n, dim), got shape {array.shape}")
        array.setflags(write=False)
        return array

    @field_validator("rho")
    @classmethod
    def _positive_rho(cls, rho: float) -> float:
        if not rho > 0:
            raise ContractViolation(f"rho must be > 0, got {rho}")
        return rho

    @model_validator(mode="after")
    def _check_length(self) -> "WeightedSignal":
        if self.values.shape[0] != self.grid.n:
            raise ContractViolation(
                f"values has {self.values.shape[0]} nodes, grid has {self.grid.n}"
            )
        return self

    @property
    def dim(self) -> int:
        return int(self.values.shape[1])

    @property
    def times(self) -> np.ndarray:
        return self.grid.times

    @classmethod
    def zeros(cls, grid: TimeGrid, dim: int, rho: float) -> "WeightedSignal":
        return cls(grid=grid, values=np.zeros((grid.n, dim)), rho=rho)

    @classmethod
    def from_function(
        cls, grid: TimeGrid, fn: Callable[[float], np.ndarray], rho: float
    ) -> "WeightedSignal":
        """Дискретизация функции t -> вектор в узлах сетки"""
        values = np.array([np.atleast_1d(fn(t)) for t in grid.times], dtype=float)
        return cls(grid=grid, values=values, rho=rho)

    def with_values(self, values: np.ndarray) -> "WeightedSignal":
        return WeightedSignal(grid=self.grid, values=values, rho=self.rho)

    def with_rho(self, rho: float) -> "WeightedSignal":
        return WeightedSignal(grid=self.grid, values=self.values, rho=rho)

    def __add__(self, other: "WeightedSignal") -> "WeightedSignal":
        _require_compatible(self, other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other: "WeightedSignal") -> "WeightedSignal":
        _require_compatible(self, other)
        return self.with_values(self.values - other.values)

    def scaled(self, factor: float) -> "WeightedSignal":
        return self.with_values(factor * self.values)


def _require_compatible(u: WeightedSignal, v: WeightedSignal) -> None:
    if u.grid != v.grid or u.dim != v.dim or u.rho != v.rho:
        raise ContractViolation(
            f"incompatible signals: grid {u.grid} vs {v.grid}, dim {u.dim} vs {v.dim}, "
            f"rho {u.rho} vs {v.rho}"
        )


def require_compatible(u: WeightedSignal, v: WeightedSignal) -> None:
    """Проверка одинаковых сетки, размерности и ρ"""
    _require_compatible(u, v)
