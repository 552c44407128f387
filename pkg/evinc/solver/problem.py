"""
Модели задачи и отчёта решателя
evinc/solver/problem.py
"""
from enum import Enum
from typing import List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from evinc.config import get_lambda_schedule, settings
from evinc.exceptions import ContractViolation
from evinc.materials.conditions import ConditionsReport
from evinc.materials.family import MaterialFamily, rho_zero
from evinc.relations.base import MonotoneRelation
from evinc.signals.models import WeightedSignal
from evinc.utils.helpers import format_key_values


class SolveMode(str, Enum):
    DIRECT = "direct"
    YOSIDA_PATH = "yosida_path"


class SolveStatus(str, Enum):
    CONVERGED = "converged"
    FAILED = "failed"


class InclusionProblem(BaseModel):
    """
    (u, f) ∈ ∂M₀(t) + M₁(t) + A на сетке forcing.grid.
    Прошлое до t0 нулевое.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    family: MaterialFamily
    relation: MonotoneRelation
    forcing: WeightedSignal
    rho: float = Field(gt=0)
    c_tilde: float = Field(gt=0)
    mode: SolveMode = SolveMode.DIRECT
    lambda_schedule: Tuple[float, ...] = Field(default_factory=lambda: tuple(get_lambda_schedule()))
    fp_tol: float = Field(default_factory=lambda: settings.FP_TOL, gt=0)
    fp_max_iter: int = Field(default_factory=lambda: settings.FP_MAX_ITER, ge=1)
    name: str = "problem"
    conditions: Optional[ConditionsReport] = None

    @field_validator("lambda_schedule")
    @classmethod
    def _decreasing_schedule(cls, schedule: Tuple[float, ...]) -> Tuple[float, ...]:
        if not schedule or any(lam <= 0 for lam in schedule):
            raise ContractViolation("lambda_schedule must be non-empty and positive")
        if any(b >= a for a, b in zip(schedule, schedule[1:])):
            raise ContractViolation("lambda_schedule must be strictly decreasing")
        return schedule

    @model_validator(mode="after")
    def _check_admissible(self) -> "InclusionProblem":
        if not self.relation.contains_origin:
            raise ContractViolation(f"relation {self.relation.name} must contain (0, 0)")
        if not (self.family.dim == self.relation.dim == self.forcing.dim):
            raise ContractViolation(
                f"dimension mismatch: family {self.family.dim}, relation {self.relation.dim}, forcing {self.forcing.dim}"
            )
        if self.forcing.rho != self.rho:
            raise ContractViolation(f"forcing rho {self.forcing.rho} != problem rho {self.rho}")
        threshold = rho_zero(self.family, self.c_tilde)
        if self.rho < threshold:
            raise ContractViolation(f"rho = {self.rho} below rho_zero = {threshold}")
        return self

    @property
    def grid(self):
        return self.forcing.grid

    @property
    def rho_zero(self) -> float:
        return rho_zero(self.family, self.c_tilde)

    def with_forcing(self, forcing: WeightedSignal) -> "InclusionProblem":
        return InclusionProblem(**{**self._fields(), "forcing": forcing.with_rho(self.rho)})

    def with_rho(self, rho: float) -> "InclusionProblem":
        return InclusionProblem(**{**self._fields(), "rho": rho, "forcing": self.forcing.with_rho(rho)})

    def with_mode(self, mode: SolveMode) -> "InclusionProblem":
        return InclusionProblem(**{**self._fields(), "mode": mode})

    def _fields(self) -> dict:
        return {name: getattr(self, name) for name in type(self).model_fields}


class SolveReport(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    solution: WeightedSignal
    mode: SolveMode
    status: SolveStatus
    per_step_iterations: List[int]
    max_residual: float
    lambda_trace: List[float] = []
    yosida_stage_norms: List[float] = []
    yosida_sup_norm: float = 0.0
    yosida_bound: Optional[float] = None
    failed_step: Optional[int] = None
    failure_reason: Optional[str] = None

    @property
    def converged(self) -> bool:
        return self.status is SolveStatus.CONVERGED

    @property
    def total_iterations(self) -> int:
        return int(sum(self.per_step_iterations))

    def to_text(self, extra: Optional[dict] = None) -> str:
        pairs = {
            "status": self.status,
            "mode": self.mode,
            "steps": self.solution.grid.n,
            "dim": self.solution.dim,
            "rho": self.solution.rho,
            "max_residual": self.max_residual,
            "total_iterations": self.total_iterations,
            "max_step_iterations": max(self.per_step_iterations, default=0),
        }
        if self.mode is SolveMode.YOSIDA_PATH:
            pairs["lambda_stages"] = len(self.lambda_trace)
            pairs["lambda_min"] = min(self.lambda_trace, default=0.0)
            pairs["yosida_sup_norm"] = self.yosida_sup_norm
            if self.yosida_bound is not None:
                pairs["yosida_bound"] = self.yosida_bound
        if self.status is SolveStatus.FAILED:
            pairs["failed_step"] = self.failed_step
            pairs["failure_reason"] = self.failure_reason
        pairs.update(extra or {})
        return format_key_values(pairs)
