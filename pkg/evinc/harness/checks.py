"""
Проверки кампании: одна функция на свойство, каждая получает свой генератор
evinc/harness/checks.py
"""
import logging
from enum import Enum
from typing import Callable, Dict, Optional

import numpy as np
from pydantic import BaseModel

from evinc.exceptions import EvincError
from evinc.harness.forcing import prefix_pair, random_forcing
from evinc.harness.oracle import oracle_trajectory
from evinc.materials.conditions import monotonicity_bound
from evinc.solver.problem import InclusionProblem, SolveMode
from evinc.solver.service import (
    lipschitz_bound,
    lipschitz_certificate,
    solve,
    substitute_forcing,
    substitute_problem,
)

logger = logging.getLogger(__name__)


class CheckName(str, Enum):
    CAUSALITY = "causality"
    LIPSCHITZ = "lipschitz"
    MONOTONICITY_BOUND = "monotonicity_bound"
    RHO_INDEPENDENCE = "rho_independence"
    YOSIDA_AGREEMENT = "yosida_agreement"
    SUBSTITUTE_AGREEMENT = "substitute_agreement"
    ORACLE_MATCH = "oracle_match"


class CheckOutcome(BaseModel):
    """margin ≥ 0 у прошедшей проверки; для побитовых проверок - минус расхождение"""

    passed: bool
    margin: float
    detail: str = ""


def _direct(problem: InclusionProblem, forcing) -> InclusionProblem:
    return problem.with_mode(SolveMode.DIRECT).with_forcing(forcing)


def _forcing(problem: InclusionProblem, rng: np.random.Generator):
    return random_forcing(problem.grid, problem.family.dim, problem.rho, rng)


def _sup_gap(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(a - b))) if a.size else 0.0


def check_causality(problem: InclusionProblem, rng: np.random.Generator, tolerance: Optional[float] = None):
    """Одинаковые f до узла cut -> побитово одинаковые решения до cut"""
    f, g, cut = prefix_pair(problem.grid, problem.family.dim, problem.rho, rng)
    u_f = solve(_direct(problem, f)).solution.values[: cut + 1]
    u_g = solve(_direct(problem, g)).solution.values[: cut + 1]
    gap = _sup_gap(u_f, u_g)
    passed = bool(np.array_equal(u_f, u_g)) if tolerance is None else gap <= tolerance
    return CheckOutcome(passed=passed, margin=-gap, detail=f"cut={cut}")


def check_lipschitz(problem: InclusionProblem, rng: np.random.Generator, tolerance: Optional[float] = None):
    f = _forcing(problem, rng)
    g = _forcing(problem, rng)
    ratio = lipschitz_certificate(_direct(problem, f), g)
    bound = lipschitz_bound(problem) if tolerance is None else tolerance
    return CheckOutcome(passed=ratio <= bound, margin=bound - ratio, detail=f"ratio={ratio:.17g}")


def check_monotonicity_bound(problem: InclusionProblem, rng: np.random.Generator, tolerance: Optional[float] = None):
    u = _forcing(problem, rng)
    measurement = monotonicity_bound(problem.family, u, problem.c_tilde)
    allowed = measurement.allowed_c if tolerance is None else tolerance
    return CheckOutcome(
        passed=measurement.measured_c <= allowed,
        margin=allowed - measurement.measured_c,
        detail=f"C={measurement.measured_c:.17g}",
    )


def check_rho_independence(problem: InclusionProblem, rng: np.random.Generator, tolerance: Optional[float] = None):
    """Решения при ρ и 2ρ совпадают побитово"""
    f = _forcing(problem, rng)
    base = _direct(problem, f)
    u_low = solve(base).solution.values
    u_high = solve(base.with_rho(2.0 * problem.rho)).solution.values
    gap = _sup_gap(u_low, u_high)
    passed = bool(np.array_equal(u_low, u_high)) if tolerance is None else gap <= tolerance
    return CheckOutcome(passed=passed, margin=-gap, detail=f"rho2={2.0 * problem.rho:.17g}")


def stage_ratios(stage_norms) -> np.ndarray:
    """n_{i+1}/n_i; 0/0 считается 1"""
    norms = np.asarray(stage_norms, dtype=float)
    if norms.size < 2:
        return np.ones(0)
    previous, current = norms[:-1], norms[1:]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(previous > 0, current / np.where(previous > 0, previous, 1.0), np.inf)
    ratios[(previous == 0) & (current == 0)] = 1.0
    return ratios


def check_yosida_agreement(problem: InclusionProblem, rng: np.random.Generator, tolerance: Optional[float] = None):
    """Последняя стадия пути против прямого решения: ≤ 10·fp_tol + 5·λ_min, рост стадий ≤ 2"""
    f = _forcing(problem, rng)
    direct = solve(_direct(problem, f)).solution.values
    path = solve(_direct(problem, f).with_mode(SolveMode.YOSIDA_PATH))
    gap = _sup_gap(direct, path.solution.values)
    limit = 10.0 * problem.fp_tol + 5.0 * min(path.lambda_trace) if tolerance is None else tolerance
    worst_ratio = float(np.max(stage_ratios(path.yosida_stage_norms), initial=1.0))
    return CheckOutcome(
        passed=gap <= limit and worst_ratio <= 2.0,
        margin=limit - gap,
        detail=f"gap={gap:.17g};ratio={worst_ratio:.17g}",
    )


def substitute_limit(problem: InclusionProblem) -> float:
    """100·fp_tol·n/min(1, c̃): ошибки двух независимых маршей копятся по шагам"""
    return 100.0 * problem.fp_tol * problem.grid.n / min(1.0, problem.c_tilde)


def check_substitute_agreement(problem: InclusionProblem, rng: np.random.Generator, tolerance: Optional[float] = None):
    """Решение подстановки (M₀, δ - M₀′) с f решает исходную задачу с поправленной нагрузкой"""
    f = _forcing(problem, rng)
    base = _direct(problem, f)
    substitute = substitute_problem(base)
    u_substitute = solve(substitute).solution
    g = substitute_forcing(base, substitute, u_substitute)
    u_original = solve(base.with_forcing(g)).solution.values
    gap = _sup_gap(u_substitute.values, u_original)
    limit = substitute_limit(problem) if tolerance is None else tolerance
    return CheckOutcome(passed=gap <= limit, margin=limit - gap, detail=f"gap={gap:.17g};rho_s={substitute.rho:.17g}")


def check_oracle_match(problem: InclusionProblem, rng: np.random.Generator, tolerance: Optional[float] = None):
    f = _forcing(problem, rng)
    solved = solve(_direct(problem, f)).solution.values
    expected = oracle_trajectory(_direct(problem, f)).values
    gap = _sup_gap(solved, expected)
    limit = 10.0 * problem.fp_tol if tolerance is None else tolerance
    return CheckOutcome(passed=gap <= limit, margin=limit - gap, detail=f"gap={gap:.17g}")


CheckFn = Callable[[InclusionProblem, np.random.Generator, Optional[float]], CheckOutcome]

CHECKS: Dict[CheckName, CheckFn] = {
    CheckName.CAUSALITY: check_causality,
    CheckName.LIPSCHITZ: check_lipschitz,
    CheckName.MONOTONICITY_BOUND: check_monotonicity_bound,
    CheckName.RHO_INDEPENDENCE: check_rho_independence,
    CheckName.YOSIDA_AGREEMENT: check_yosida_agreement,
    CheckName.SUBSTITUTE_AGREEMENT: check_substitute_agreement,
    CheckName.ORACLE_MATCH: check_oracle_match,
}


def run_check(
    check: CheckName,
    problem: InclusionProblem,
    rng: np.random.Generator,
    tolerance: Optional[float] = None,
) -> CheckOutcome:
    """Сбой решателя внутри проверки - провал этой проверки, не исключение"""
    try:
        return CHECKS[CheckName(check)](problem, rng, tolerance)
    except EvincError as e:
        logger.error(f"❌ Check {CheckName(check).value} on {problem.name}: {type(e).__name__}: {e}")
        return CheckOutcome(passed=False, margin=float("nan"), detail=f"error={type(e).__name__}")
