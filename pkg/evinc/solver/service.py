"""
Сервис решения включения: прямой марш по времени и путь через регуляризацию Йосиды
evinc/solver/service.py
"""
import logging
from typing import List, Optional, Tuple

import numpy as np

from evinc.exceptions import ContractViolation, DtTooLargeError, StepFailure
from evinc.materials.family import rho_zero, substitute_family
from evinc.relations.base import MonotoneRelation
from evinc.relations.combinators import YosidaRelation
from evinc.signals.models import WeightedSignal
from evinc.signals.time_calculus import derivative
from evinc.signals.weighted_space import weighted_norm
from evinc.solver.problem import InclusionProblem, SolveMode, SolveReport, SolveStatus
from evinc.solver.stepper import advance

logger = logging.getLogger(__name__)


class _MarchFailure(Exception):
    def __init__(self, step: int, reason: str, values: np.ndarray, iterations: List[int], cause: Exception):
        super().__init__(str(cause))
        self.step = step
        self.reason = reason
        self.values = values
        self.iterations = iterations
        self.cause = cause


def _march(
    problem: InclusionProblem,
    relation: MonotoneRelation,
    warm_start: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, List[int], float]:
    """k = 0..n-1 по порядку; узел k видит только f_0..f_k"""
    family = problem.family
    grid = problem.grid
    dt = grid.dt
    split = relation.split()
    values = np.zeros((grid.n, family.dim))
    iterations: List[int] = []
    max_residual = 0.0
    prev_state = np.zeros(family.dim)
    prev_m0u = np.zeros(family.dim)
    for k, t in enumerate(grid.times):
        guess = None if warm_start is None else warm_start[k]
        try:
            step = advance(
                family,
                relation,
                t,
                dt,
                prev_state,
                prev_m0u,
                problem.forcing.values[k],
                problem.fp_tol,
                problem.fp_max_iter,
                margin=problem.c_tilde,
                initial_guess=guess,
                split=split,
                step=k,
            )
        except StepFailure as e:
            raise _MarchFailure(k, e.reason, values, iterations, e) from e
        except DtTooLargeError as e:
            raise _MarchFailure(k, "dt_too_large", values, iterations, e) from e
        values[k] = step.u
        iterations.append(step.iterations)
        max_residual = max(max_residual, step.residual)
        prev_state = step.u
        prev_m0u = family.M0(t) @ step.u
    return values, iterations, max_residual


def yosida_delta(problem: InclusionProblem) -> float:
    """δ = 2(sup_m1 + lip_m0) + 1"""
    return 2.0 * (problem.family.sup_m1 + problem.family.lip_m0) + 1.0


def yosida_bound(problem: InclusionProblem, delta: Optional[float] = None) -> float:
    """(1 + δ/c̃)‖f‖ + (1/c̃)|M₀|_∞‖∂f‖; δ по умолчанию yosida_delta"""
    c_tilde = problem.c_tilde
    delta = yosida_delta(problem) if delta is None else delta
    sup_m0 = max(float(np.linalg.norm(problem.family.M0(t), 2)) for t in problem.grid.times[:: max(1, problem.grid.n // 64)])
    forcing = problem.forcing
    return (1.0 + delta / c_tilde) * weighted_norm(forcing) + sup_m0 / c_tilde * weighted_norm(
        derivative(forcing)
    )


def substitute_problem(problem: InclusionProblem, delta: Optional[float] = None) -> InclusionProblem:
    """
    Задача с коэффициентами (M₀, δ - M₀′) и той же нагрузкой.

    c̃ урезается до δ/2, ρ поднимается до ρ₀ подстановки (на решение ρ не влияет).
    """
    delta = yosida_delta(problem) if delta is None else delta
    family = substitute_family(problem.family, delta)
    c_tilde = min(problem.c_tilde, 0.5 * delta)
    rho = max(problem.rho, rho_zero(family, c_tilde))
    fields = problem._fields()
    fields.update(
        family=family,
        c_tilde=c_tilde,
        rho=rho,
        forcing=problem.forcing.with_rho(rho),
        name=f"{problem.name}+substitute",
        conditions=None,
    )
    logger.debug(f"🔧 Substitute problem for {problem.name}: delta={delta:.6g}, c_tilde={c_tilde:.6g}, rho={rho:.6g}")
    return InclusionProblem(**fields)


def substitute_forcing(problem: InclusionProblem, substitute: InclusionProblem, u: WeightedSignal) -> WeightedSignal:
    """
    g_k = f_k + (M₁(t_k) - M₁ˢ(t_k)) u_k = f_k + (M₁ + M₀′ - δ) u_k.

    Если u решает подстановку с нагрузкой f, то u решает исходную задачу с нагрузкой g.
    """
    if u.grid != problem.grid or u.dim != problem.family.dim:
        raise ContractViolation("u must live on the problem grid with the problem dimension")
    correction = np.array(
        [(problem.family.M1(t) - substitute.family.M1(t)) @ row for t, row in zip(problem.grid.times, u.values)]
    )
    return problem.forcing.with_values(problem.forcing.values + correction)


def _yosida_values(relation: YosidaRelation, values: np.ndarray) -> np.ndarray:
    return np.array([relation.apply(row) for row in values])


def solve(problem: InclusionProblem, raise_on_failure: bool = True) -> SolveReport:
    """
    Решение включения в выбранном режиме.

    Raises:
        StepFailure / DtTooLargeError: сбой шага (если raise_on_failure)
        ContractViolation: ρ < ρ₀
    """
    threshold = problem.rho_zero
    if problem.rho < threshold:
        raise ContractViolation(f"rho = {problem.rho} below rho_zero = {threshold}")
    logger.info(
        f"🚀 Solving {problem.name}: mode={problem.mode.value}, n={problem.grid.n}, dim={problem.family.dim}, "
        f"rho={problem.rho:.6g} (rho_zero={threshold:.6g})"
    )
    try:
        if problem.mode is SolveMode.DIRECT:
            values, iterations, residual = _march(problem, problem.relation)
            report = SolveReport(
                solution=problem.forcing.with_values(values),
                mode=problem.mode,
                status=SolveStatus.CONVERGED,
                per_step_iterations=iterations,
                max_residual=residual,
            )
        else:
            report = _solve_yosida_path(problem)
    except _MarchFailure as failure:
        if raise_on_failure:
            raise failure.cause
        logger.error(f"❌ {problem.name} failed at step {failure.step}: {failure.reason}")
        return SolveReport(
            solution=problem.forcing.with_values(failure.values),
            mode=problem.mode,
            status=SolveStatus.FAILED,
            per_step_iterations=failure.iterations,
            max_residual=float(getattr(failure.cause, "residual", float("nan"))),
            failed_step=failure.step,
            failure_reason=failure.reason,
        )
    logger.info(f"✅ {problem.name} solved: {report.total_iterations} iterations, max residual {report.max_residual:.3e}")
    return report


def _solve_yosida_path(problem: InclusionProblem) -> SolveReport:
    warm_start = None
    trace: List[float] = []
    stage_norms: List[float] = []
    iterations: List[int] = []
    residual = 0.0
    values = None
    for lam in problem.lambda_schedule:
        regularized = YosidaRelation(problem.relation, lam)
        values, stage_iterations, stage_residual = _march(problem, regularized, warm_start=warm_start)
        warm_start = values
        iterations = stage_iterations
        residual = max(residual, stage_residual)
        stage_norm = weighted_norm(problem.forcing.with_values(_yosida_values(regularized, values)))
        trace.append(lam)
        stage_norms.append(stage_norm)
        logger.debug(f"🔧 Yosida stage lambda={lam:.3e}: |A_lambda(u)| = {stage_norm:.6g}")
    return SolveReport(
        solution=problem.forcing.with_values(values),
        mode=problem.mode,
        status=SolveStatus.CONVERGED,
        per_step_iterations=iterations,
        max_residual=residual,
        lambda_trace=trace,
        yosida_stage_norms=stage_norms,
        yosida_sup_norm=max(stage_norms),
        yosida_bound=yosida_bound(problem),
    )


def lipschitz_tolerance(problem: InclusionProblem) -> float:
    """tol_dt = 20·dt·(ρ + lip_m0 + sup_m1)"""
    family = problem.family
    return 20.0 * problem.grid.dt * (problem.rho + family.lip_m0 + family.sup_m1)


def lipschitz_bound(problem: InclusionProblem) -> float:
    return (1.0 + lipschitz_tolerance(problem)) / problem.c_tilde


def lipschitz_certificate(problem: InclusionProblem, g: WeightedSignal) -> float:
    """‖u_f - u_g‖_ρ / ‖f - g‖_ρ; при f = g ноль"""
    g = g.with_rho(problem.rho)
    if g.grid != problem.grid or g.dim != problem.forcing.dim:
        raise ContractViolation("g must live on the problem grid with the problem dimension")
    gap = weighted_norm(problem.forcing - g)
    if gap == 0.0:
        return 0.0
    u_f = solve(problem).solution
    u_g = solve(problem.with_forcing(g)).solution
    return weighted_norm(u_f - u_g) / gap
