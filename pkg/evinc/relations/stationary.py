"""
Стационарное включение S x + N(P x) ∋ b прямым-обратным расщеплением
evinc/relations/stationary.py

Нелинейная часть действует на слоте индексов P; итерация идёт по приведённому
оператору R = (P S⁻¹ Pᵀ)⁻¹, при P = I это x ← J_γ(x - γ(Sx - b)).
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from evinc.config import settings
from evinc.exceptions import ContractViolation, ConvergenceFailure
from evinc.relations.base import MonotoneRelation
from evinc.utils.helpers import spectral_norm, sym_part

logger = logging.getLogger(__name__)

# окно и порог детектора расходимости
DIVERGENCE_WINDOW = 100
DIVERGENCE_FACTOR = 10.0


@dataclass
class StationaryResult:
    x: np.ndarray
    iterations: int
    residual: float
    contraction: float
    step_size: float


@dataclass
class ForwardBackwardPlan:
    """Приведённый оператор и выбранный шаг"""

    operator: np.ndarray
    step_size: float
    contraction: float
    margin: float


def plan_forward_backward(operator: np.ndarray) -> ForwardBackwardPlan:
    """
    Шаг γ = margin/‖R‖² либо 2/(λ_min + λ_max) симметричной части,
    если он даёт меньшее ‖I - γR‖.
    """
    p = operator.shape[0]
    eigenvalues = np.linalg.eigvalsh(sym_part(operator))
    margin, top = float(eigenvalues[0]), float(eigenvalues[-1])
    if margin <= 0.0:
        raise ContractViolation(f"stationary operator is not strongly monotone (margin {margin:.3e})")
    norm = spectral_norm(operator)
    best_gamma, best_q = 0.0, float("inf")
    for gamma in (margin / norm**2, 2.0 / (margin + top)):
        q = spectral_norm(np.eye(p) - gamma * operator)
        if q < best_q:
            best_gamma, best_q = gamma, q
    if best_q >= 1.0:
        # теоретическая граница для margin/‖R‖²
        best_gamma = margin / norm**2
        best_q = float(np.sqrt(max(0.0, 1.0 - (margin / norm) ** 2)))
    return ForwardBackwardPlan(operator=operator, step_size=best_gamma, contraction=best_q, margin=margin)


def solve_stationary(
    operator: np.ndarray,
    rhs: np.ndarray,
    nonlinear: Optional[MonotoneRelation],
    indices: np.ndarray,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
    x0: Optional[np.ndarray] = None,
) -> StationaryResult:
    """
    Решает S x + Pᵀ N(P x) ∋ b.

    Args:
        operator: S (n×n), sym(S) ≻ 0
        rhs: b
        nonlinear: N на len(indices) координатах или None (линейная задача)
        indices: слот P
        x0: начальное приближение (тёплый старт)
    Returns:
        StationaryResult
    """
    tol = settings.FP_TOL if tol is None else tol
    max_iter = settings.FP_MAX_ITER if max_iter is None else max_iter
    n = operator.shape[0]

    if nonlinear is None or len(indices) == 0:
        x = np.linalg.solve(operator, rhs)
        residual = float(np.linalg.norm(operator @ x - rhs))
        return StationaryResult(x=x, iterations=1, residual=residual, contraction=0.0, step_size=0.0)

    indices = np.asarray(indices, dtype=int)
    reduced = len(indices) < n
    if reduced:
        lifted = np.linalg.solve(operator, np.eye(n)[:, indices])  # S⁻¹Pᵀ
        base = np.linalg.solve(operator, rhs)  # S⁻¹b
        r_operator = np.linalg.inv(lifted[indices])
        r_rhs = r_operator @ base[indices]
    else:
        r_operator, r_rhs = operator, rhs

    plan = plan_forward_backward(r_operator)
    gamma, q = plan.step_size, plan.contraction
    tail_factor = max(1.0, q / (1.0 - q)) if q < 1.0 else float("inf")

    y = np.zeros(len(indices)) if x0 is None else np.asarray(x0, dtype=float)[indices].copy()
    history = []
    step_norm = float("inf")
    for iteration in range(1, max_iter + 1):
        y_next = nonlinear.resolve(gamma, y - gamma * (r_operator @ y - r_rhs))
        step_norm = float(np.linalg.norm(y_next - y))
        y = y_next
        history.append(step_norm)
        if step_norm * tail_factor <= tol:
            break
        if (
            iteration > DIVERGENCE_WINDOW
            and step_norm > tol
            and step_norm > DIVERGENCE_FACTOR * history[-1 - DIVERGENCE_WINDOW]
        ):
            logger.error(f"❌ Non-monotone forward-backward iteration at {iteration}: step {step_norm:.3e}")
            raise ConvergenceFailure(
                f"non-monotone iteration detected: step grew from "
                f"{history[-1 - DIVERGENCE_WINDOW]:.3e} to {step_norm:.3e} over {DIVERGENCE_WINDOW} iterations",
                step_norm,
                iteration,
                reason="non_monotone",
            )
    else:
        logger.error(
            f"❌ Forward-backward gave up after {max_iter} iterations: step {step_norm:.3e}, "
            f"q={q:.6f}, gamma={gamma:.3e}, tail factor {tail_factor:.3e}"
        )
        raise ConvergenceFailure(
            f"forward-backward not converged in {max_iter} iterations (step {step_norm:.3e}, q={q:.6f})",
            step_norm,
            max_iter,
            contraction=q,
        )

    if reduced:
        x = base - lifted @ (r_rhs - r_operator @ y)
    else:
        x = y
    return StationaryResult(x=x, iterations=iteration, residual=step_norm, contraction=q, step_size=gamma)
