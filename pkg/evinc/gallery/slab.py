"""
Пластина: поля зависят только от x₁, разнесённые разности первого порядка
evinc/gallery/slab.py

θ и v живут в m узлах, потоки q и напряжения T - в m ячейках.
Граница смешанная: x₁ = L закреплена (θ_m = v_m = 0), x₁ = 0 - плоскость
симметрии с нулевым потоком и нулевым напряжением (q_{-1} = T_{-1} = 0).
Это половина симметричной пластины [-L, L] с закреплёнными краями.
"""
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import sparse

from evinc.utils import mandel


class SlabGrid(BaseModel):
    model_config = ConfigDict(frozen=True)

    m: int = Field(ge=2)
    dx: float = Field(gt=0)

    @property
    def length(self) -> float:
        return self.m * self.dx

    def refined(self) -> "SlabGrid":
        return SlabGrid(m=2 * self.m, dx=self.dx / 2)


class SpatialOperators(BaseModel):
    """grad_c, div, Grad_c, Div, trace_op как разреженные матрицы"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    slab: SlabGrid
    grad_c: Any
    div: Any
    Grad_c: Any
    Div: Any
    trace_op: Any


# ∂₁u_c -> sym(e_c ⊗ e₁) по Манделю
_GRADIENT_TO_MANDEL = np.column_stack([mandel.from_matrix(np.outer(e_c, np.eye(3)[0])) for e_c in np.eye(3)])


def difference_matrix(slab: SlabGrid) -> sparse.csr_matrix:
    """(θ_{i+1} - θ_i)/dx, θ_m = 0; сопряжённое -div полагает q_{-1} = 0"""
    m = slab.m
    return sparse.diags([-np.ones(m), np.ones(m - 1)], [0, 1], format="csr") / slab.dx


def build_slab_operators(slab: SlabGrid) -> SpatialOperators:
    grad_c = difference_matrix(slab)
    Grad_c = sparse.kron(grad_c, sparse.csr_matrix(_GRADIENT_TO_MANDEL), format="csr")
    trace_op = sparse.kron(sparse.eye(slab.m), sparse.csr_matrix(mandel.IDENTITY[None, :]), format="csr")
    return SpatialOperators(
        slab=slab,
        grad_c=grad_c,
        div=(-grad_c.T).tocsr(),
        Grad_c=Grad_c,
        Div=(-Grad_c.T).tocsr(),
        trace_op=trace_op,
    )
