"""
Каузальное исчисление: обратная разность, её обратное, сдвиги, разностные отношения
evinc/signals/time_calculus.py

ρ входит только в нормы и проверки, но никогда в шаблоны разностей.
"""
import logging
from enum import Enum
from typing import Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import sparse
from scipy.signal import lfilter
from scipy.sparse.linalg import LinearOperator

from evinc.exceptions import ContractViolation, UnsupportedRegimeError
from evinc.signals.models import TimeGrid, WeightedSignal
from evinc.signals.weighted_space import weighted_norm
from evinc.utils.helpers import estimate_operator_norm

logger = logging.getLogger(__name__)


class DerivativeMode(str, Enum):
    APPLY = "apply"
    INVERT = "invert"
    ADJOINT = "adjoint"


def derivative(u: WeightedSignal) -> WeightedSignal:
    """(u_k - u_{k-1})/dt, u_{-1} = 0"""
    previous = np.vstack([np.zeros((1, u.dim)), u.values[:-1]])
    return u.with_values((u.values - previous) / u.grid.dt)


def integrate(f: WeightedSignal) -> WeightedSignal:
    """dt · Σ_{j≤k} f_j"""
    if not f.rho > 0:
        raise UnsupportedRegimeError(f"integrate requires rho > 0 (got {f.rho}); anticausal branch not implemented")
    return f.with_values(f.grid.dt * np.cumsum(f.values, axis=0))


def adjoint(u: WeightedSignal) -> WeightedSignal:
    """Сопряжённая к derivative относительно weighted_inner: (u_k - e^{-2ρdt} u_{k+1})/dt"""
    decay = np.exp(-2.0 * u.rho * u.grid.dt)
    following = np.vstack([u.values[1:], np.zeros((1, u.dim))])
    return u.with_values((u.values - decay * following) / u.grid.dt)


def translate(u: WeightedSignal, h_steps: int) -> WeightedSignal:
    """(τ_h u)_k = u_{k+h}, вне сетки нули"""
    h_steps = int(h_steps)
    if h_steps == 0:
        return u
    shifted = np.zeros_like(u.values)
    n = u.grid.n
    if abs(h_steps) < n:
        if h_steps > 0:
            shifted[: n - h_steps] = u.values[h_steps:]
        else:
            shifted[-h_steps:] = u.values[: n + h_steps]
    return u.with_values(shifted)


def difference_quotient(u: WeightedSignal, h_steps: int) -> WeightedSignal:
    if h_steps <= 0:
        raise ContractViolation(f"h_steps must be positive, got {h_steps}")
    return u.with_values((translate(u, h_steps).values - u.values) / (h_steps * u.grid.dt))


def sobolev_seminorm(u: WeightedSignal) -> float:
    """‖∂u‖_ρ"""
    return weighted_norm(derivative(u))


def sobolev_norm(u: WeightedSignal) -> float:
    """Норма графика sqrt(‖u‖² + ‖∂u‖²)"""
    return float(np.hypot(weighted_norm(u), sobolev_seminorm(u)))


class DerivativeOperator(BaseModel):
    """Оператор ∂ на фиксированной сетке в одном из режимов"""

    model_config = ConfigDict(frozen=True)

    grid: TimeGrid
    rho: float
    mode: DerivativeMode = DerivativeMode.APPLY

    def __call__(self, u: WeightedSignal) -> WeightedSignal:
        if u.grid != self.grid:
            raise ContractViolation("signal grid differs from operator grid")
        if self.mode is DerivativeMode.APPLY:
            return derivative(u)
        if self.mode is DerivativeMode.INVERT:
            return integrate(u.with_rho(self.rho))
        return adjoint(u.with_rho(self.rho))

    def matrix(self) -> Union[sparse.csr_matrix, LinearOperator]:
        """Скалярный оператор (n×n); для INVERT это LinearOperator накопленной суммы"""
        backward = backward_difference_matrix(self.grid)
        if self.mode is DerivativeMode.APPLY:
            return backward
        if self.mode is DerivativeMode.INVERT:
            return cumulative_sum_operator(self.grid)
        return weighted_adjoint_matrix(backward, self.grid, self.rho)


def cumulative_sum_operator(grid: TimeGrid) -> LinearOperator:
    """dt·Σ_{j≤k} x_j и сопряжённое dt·Σ_{j≥k} x_j без плотной матрицы"""
    n, dt = grid.n, grid.dt

    def forward(x: np.ndarray) -> np.ndarray:
        return dt * np.cumsum(x, axis=0)

    def backward(x: np.ndarray) -> np.ndarray:
        return dt * np.cumsum(x[::-1], axis=0)[::-1]

    return LinearOperator((n, n), matvec=forward, rmatvec=backward, matmat=forward, rmatmat=backward, dtype=float)


def backward_difference_matrix(grid: TimeGrid) -> sparse.csr_matrix:
    n = grid.n
    return sparse.diags([np.ones(n), -np.ones(n - 1)], [0, -1], format="csr") / grid.dt


def forward_difference_matrix(grid: TimeGrid) -> sparse.csr_matrix:
    n = grid.n
    return sparse.diags([-np.ones(n), np.ones(n - 1)], [0, 1], format="csr") / grid.dt


def weighted_adjoint_matrix(matrix: sparse.spmatrix, grid: TimeGrid, rho: float) -> sparse.csr_matrix:
    """W⁻¹ Mᵀ W, W = diag(e^{-2ρt_k}) (веса нормированы на первый узел)"""
    relative = np.exp(-2.0 * rho * (grid.times - grid.t0))
    weight = sparse.diags(relative)
    weight_inv = sparse.diags(1.0 / relative)
    return (weight_inv @ matrix.T @ weight).tocsr()


def adjoint_defect(grid: TimeGrid, rho: float, dt: Optional[float] = None) -> float:
    """
    Операторная норма (на внутренних узлах) разности между весовой сопряжённой
    к обратной разности и -D⁺ + 2ρ·τ₁. Ожидается ≈ 2ρ²dt.
    """
    if dt is not None:
        grid = TimeGrid(t0=grid.t0, dt=dt, n=grid.n)
    if rho < 0:
        raise ContractViolation(f"rho must be >= 0, got {rho}")
    n = grid.n
    if n < 3:
        return 0.0
    backward = backward_difference_matrix(grid)
    adjoint_matrix = weighted_adjoint_matrix(backward, grid, rho)
    shift = sparse.diags([np.ones(n - 1)], [1], format="csr")
    target = -forward_difference_matrix(grid) + 2.0 * rho * shift
    defect = (adjoint_matrix - target).tocsr()[1:-1, 1:-1]
    if defect.count_nonzero() == 0 or abs(defect).max() == 0.0:
        return 0.0
    value = estimate_operator_norm(
        lambda x: defect @ x, lambda y: defect.T @ y, (n - 2,), iterations=50
    )
    logger.debug(f"🔧 adjoint defect rho={rho} dt={grid.dt}: {value:.3e}")
    return value


def integrate_operator_norm(grid: TimeGrid, rho: float, iterations: int = 300, seed: int = 0) -> float:
    """
    ‖integrate‖ во взвешенной норме, степенной метод без сборки:
    после замены x_k = f_k e^{-ρt_k}√dt оператор - рекурсия y_k = e^{-ρdt}y_{k-1} + dt·x_k.
    """
    if not rho > 0:
        raise UnsupportedRegimeError(f"integrate requires rho > 0 (got {rho})")
    decay = np.exp(-rho * grid.dt)
    numerator, denominator = [grid.dt], [1.0, -decay]

    def apply(x: np.ndarray) -> np.ndarray:
        return lfilter(numerator, denominator, x)

    def apply_transpose(y: np.ndarray) -> np.ndarray:
        return lfilter(numerator, denominator, y[::-1])[::-1]

    return estimate_operator_norm(apply, apply_transpose, (grid.n,), iterations=iterations, seed=seed)
