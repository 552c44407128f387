"""
Один неявный шаг: S u_k + A(u_k) ∋ b, S = M₀(t_k)/dt + M₁(t_k), b = f_k + M₀(t_{k-1})u_{k-1}/dt
evinc/solver/stepper.py
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from evinc.config import settings
from evinc.exceptions import ConvergenceFailure, ResolventFailure, StepFailure
from evinc.materials.family import MaterialFamily, step_operator
from evinc.relations.base import MonotoneRelation, RelationSplit
from evinc.relations.stationary import solve_stationary

logger = logging.getLogger(__name__)


@dataclass
class StepResult:
    u: np.ndarray
    iterations: int
    residual: float


def advance(
    family: MaterialFamily,
    relation: MonotoneRelation,
    t: float,
    dt: float,
    prev_state: np.ndarray,
    prev_m0u: np.ndarray,
    f_k: np.ndarray,
    fp_tol: float,
    fp_max_iter: int,
    margin: Optional[float] = None,
    initial_guess: Optional[np.ndarray] = None,
    split: Optional[RelationSplit] = None,
    step: int = -1,
) -> StepResult:
    """Шаг с диагностикой; линейная часть отношения входит в S"""
    split = split or relation.split()
    operator = step_operator(family, t, dt, margin=margin, extra=split.linear).matrix
    rhs = np.asarray(f_k, dtype=float) + np.asarray(prev_m0u, dtype=float) / dt
    guess = prev_state if initial_guess is None else initial_guess
    try:
        result = solve_stationary(
            operator, rhs, split.nonlinear, split.indices, tol=fp_tol, max_iter=fp_max_iter, x0=guess
        )
    except ConvergenceFailure as e:
        reason = e.reason
        logger.error(f"❌ Step {step} at t={t:.6g} failed ({reason}): residual {e.last_residual:.3e}")
        raise StepFailure(f"step {step} at t={t}: {e}", step=step, reason=reason, residual=e.last_residual) from e
    except ResolventFailure as e:
        logger.error(f"❌ Step {step} at t={t:.6g}: resolvent failure {e.diagnostics}")
        raise StepFailure(f"step {step} at t={t}: {e}", step=step, reason="resolvent") from e
    return StepResult(u=result.x, iterations=result.iterations, residual=result.residual)


def solve_step(
    family: MaterialFamily,
    relation: MonotoneRelation,
    t: float,
    dt: float,
    prev_state,
    prev_m0u,
    f_k,
    fp_tol: Optional[float] = None,
    fp_max_iter: Optional[int] = None,
    margin: Optional[float] = None,
) -> np.ndarray:
    """
    u_k из S u_k + A(u_k) ∋ b прямым-обратным расщеплением.

    Args:
        prev_state: u_{k-1} (нуль при k = 0), также начальное приближение
        prev_m0u: M₀(t_{k-1})·u_{k-1}
    """
    result = advance(
        family,
        relation,
        t,
        dt,
        np.asarray(prev_state, dtype=float),
        prev_m0u,
        f_k,
        settings.FP_TOL if fp_tol is None else fp_tol,
        settings.FP_MAX_ITER if fp_max_iter is None else fp_max_iter,
        margin=margin,
    )
    return result.u
