"""
Итерация y_{n+1} = F(x - G(y_n)) для (F⁻¹ + G)⁻¹ при Lip(F)·Lip(G) < 1
evinc/harness/fixed_point.py
"""
import logging
from typing import Callable, List, Optional

import numpy as np

from evinc.exceptions import ContractViolation

logger = logging.getLogger(__name__)

Map = Callable[[np.ndarray], np.ndarray]


def _contraction(lip_f: float, lip_g: float) -> float:
    if lip_f < 0 or lip_g < 0:
        raise ContractViolation(f"Lipschitz constants must be >= 0, got {lip_f}, {lip_g}")
    product = lip_f * lip_g
    if product >= 1.0:
        raise ContractViolation(f"Lip(F)*Lip(G) = {product} must be < 1")
    return product


def fixed_point_iterates(
    F: Map,
    G: Map,
    x,
    n_iter: int,
    lip_f: float,
    lip_g: float,
    y0=None,
) -> List[np.ndarray]:
    """
    Последовательность y_0, ..., y_{n_iter}; y_0 = 0 по умолчанию.

    Raises:
        ContractViolation: Lip(F)·Lip(G) ≥ 1 или n_iter < 1
    """
    _contraction(lip_f, lip_g)
    if n_iter < 1:
        raise ContractViolation(f"n_iter must be >= 1, got {n_iter}")
    x = np.asarray(x, dtype=float)
    y = np.zeros_like(x) if y0 is None else np.asarray(y0, dtype=float)
    iterates = [y]
    for _ in range(n_iter):
        y = np.asarray(F(x - np.asarray(G(y), dtype=float)), dtype=float)
        iterates.append(y)
    return iterates


def fixed_point_bound(lip_f: float, lip_g: float, first_step: float, n_iter: int) -> float:
    """q^n·‖y₁ - y₀‖/(1 - q) - расстояние n-й итерации до неподвижной точки"""
    q = _contraction(lip_f, lip_g)
    return q**n_iter * first_step / (1.0 - q)


def solution_lipschitz_bound(lip_f: float, lip_g: float) -> float:
    """Lip((F⁻¹ + G)⁻¹) ≤ Lip(F)/(1 - Lip(F)Lip(G))"""
    q = _contraction(lip_f, lip_g)
    return lip_f / (1.0 - q)


def tail_within_bound(iterates: List[np.ndarray], lip_f: float, lip_g: float, slack: float = 1e-12) -> bool:
    """Наблюдаемое расстояние y_n до y_N не больше априорной оценки"""
    if len(iterates) < 3:
        return True
    first_step = float(np.linalg.norm(iterates[1] - iterates[0]))
    limit = iterates[-1]
    limit_error = fixed_point_bound(lip_f, lip_g, first_step, len(iterates) - 1)
    for n, y in enumerate(iterates[:-1]):
        observed = float(np.linalg.norm(y - limit))
        if observed > fixed_point_bound(lip_f, lip_g, first_step, n) + limit_error + slack:
            logger.warning(f"⚠️ Iterate {n} is {observed:.3e} from the tail, above the a-priori bound")
            return False
    return True
