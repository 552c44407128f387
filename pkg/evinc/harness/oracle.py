"""
Независимая траектория перебором ветвей (dim ≤ 2): без резольвент и без решателя шага
evinc/harness/oracle.py
"""
import itertools
import logging
from typing import List

import numpy as np
from scipy.optimize import bisect

from evinc.exceptions import ContractViolation, OracleFailure
from evinc.relations.base import MonotoneRelation
from evinc.relations.catalog import BallSaturation, LinearRelation, SoftThreshold, ZeroRelation
from evinc.solver.problem import InclusionProblem
from evinc.signals.models import WeightedSignal

logger = logging.getLogger(__name__)

ORACLE_MAX_DIM = 2
BRANCH_RESIDUAL = 1e-12
VERIFY_TOL = 1e-9


def _radial_branch(operator: np.ndarray, rhs: np.ndarray, amount: float, r_min: float) -> List[np.ndarray]:
    """S u + amount·u/|u| = b с |u| = r > r_min: бисекция по r"""
    identity = np.eye(len(rhs))

    def candidate(r: float) -> np.ndarray:
        return np.linalg.solve(operator + (amount / r) * identity, rhs)

    def gap(r: float) -> float:
        return float(np.linalg.norm(candidate(r))) - r

    lower = max(r_min, 1e-300)
    if gap(lower) <= 0:
        return []
    upper = max(2.0 * lower, 1.0)
    for _ in range(200):
        if gap(upper) < 0:
            break
        upper *= 2.0
    else:
        return []
    radius = bisect(gap, lower, upper, xtol=BRANCH_RESIDUAL * max(1.0, lower), maxiter=500)
    return [candidate(radius)]


def _l1_branches(operator: np.ndarray, rhs: np.ndarray, weight: float) -> List[np.ndarray]:
    """Знаковые образцы σ ∈ {-1, 0, 1}^d с проверкой согласованности"""
    dim = len(rhs)
    found = []
    for pattern in itertools.product((-1, 0, 1), repeat=dim):
        sigma = np.array(pattern, dtype=float)
        active = sigma != 0
        u = np.zeros(dim)
        if active.any():
            block = operator[np.ix_(active, active)]
            u[active] = np.linalg.solve(block, rhs[active] - weight * sigma[active])
            if np.any(np.sign(u[active]) != sigma[active]):
                continue
        remainder = rhs - operator @ u
        if np.all(np.abs(remainder[~active]) <= weight + BRANCH_RESIDUAL):
            found.append(u)
    return found


def _branches(relation: MonotoneRelation, operator: np.ndarray, rhs: np.ndarray) -> List[np.ndarray]:
    if isinstance(relation, ZeroRelation):
        return [np.linalg.solve(operator, rhs)]
    if isinstance(relation, LinearRelation):
        return [np.linalg.solve(operator + relation.matrix, rhs)]
    if isinstance(relation, SoftThreshold):
        if relation.norm == "l1":
            return _l1_branches(operator, rhs, relation.weight)
        if np.linalg.norm(rhs) <= relation.weight:
            return [np.zeros(len(rhs))]
        return _radial_branch(operator, rhs, relation.weight, 0.0)
    if isinstance(relation, BallSaturation):
        inner = np.linalg.solve(operator + np.eye(len(rhs)), rhs)
        if np.linalg.norm(inner) <= relation.radius:
            return [inner]
        return _radial_branch(operator, rhs, relation.radius, relation.radius)
    raise ContractViolation(f"oracle has no branch enumeration for relation {relation.name}")


def oracle_step(relation: MonotoneRelation, operator: np.ndarray, rhs: np.ndarray, step: int = -1) -> np.ndarray:
    """u с b - S u ∈ A(u), проверенное через relation.eval"""
    scale = max(1.0, float(np.linalg.norm(rhs)))
    for u in _branches(relation, operator, rhs):
        distance = relation.eval(u).distance(rhs - operator @ u)
        if distance <= VERIFY_TOL * scale:
            return u
    logger.error(f"❌ Oracle: no branch solves step {step} for {relation.name}")
    raise OracleFailure(f"no branch admits a solution at step {step} for relation {relation.name}")


def oracle_trajectory(problem: InclusionProblem) -> WeightedSignal:
    """
    Траектория по тому же неявному шагу, но с перебором ветвей на каждом узле.

    Raises:
        ContractViolation: dim > 2 или отношение без eval
        OracleFailure: ни одна ветка не подошла
    """
    family, relation = problem.family, problem.relation
    if family.dim > ORACLE_MAX_DIM:
        raise ContractViolation(f"oracle supports dim <= {ORACLE_MAX_DIM}, got {family.dim}")
    if not relation.has_eval:
        raise ContractViolation(f"relation {relation.name} provides no eval")
    grid = problem.grid
    dt = grid.dt
    values = np.zeros((grid.n, family.dim))
    carried = np.zeros(family.dim)
    for k, t in enumerate(grid.times):
        operator = family.M0(t) / dt + family.M1(t)
        rhs = problem.forcing.values[k] + carried / dt
        values[k] = oracle_step(relation, operator, rhs, step=k)
        carried = family.M0(t) @ values[k]
    logger.debug(f"🔧 Oracle trajectory for {problem.name}: {grid.n} steps")
    return problem.forcing.with_values(values)
