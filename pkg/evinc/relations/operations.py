"""
Операции над отношениями: резольвента, Йосида, лифт, сумма, проверка Минти
evinc/relations/operations.py
"""
import logging
from typing import Callable, Optional

import numpy as np
from pydantic import BaseModel
from scipy.spatial.distance import pdist

from evinc.config import settings
from evinc.exceptions import ContractViolation, EvincError, ResolventFailure
from evinc.relations.base import MonotoneRelation
from evinc.relations.combinators import LiftedRelation, LipschitzSum
from evinc.signals.models import TimeGrid

logger = logging.getLogger(__name__)


def resolvent(relation: MonotoneRelation, lam: float, y) -> np.ndarray:
    """Единственный x с (x, (y - x)/λ) ∈ A"""
    if not lam > 0:
        raise ContractViolation(f"lambda must be > 0, got {lam}")
    try:
        return relation.resolve(lam, y)
    except (ContractViolation, ResolventFailure):
        raise
    except EvincError as e:
        logger.error(f"❌ Resolvent of {relation!r} failed at lambda={lam}: {e}")
        raise ResolventFailure(
            f"resolvent of {relation.name} failed: {e}",
            diagnostics={"lambda": lam, "cause": type(e).__name__, **vars(e)},
        ) from e


def yosida(relation: MonotoneRelation, lam: float, y) -> np.ndarray:
    """(y - J_λ y)/λ"""
    y = np.asarray(y, dtype=float)
    return (y - resolvent(relation, lam, y)) / lam


def lift(relation: MonotoneRelation, grid: TimeGrid, rho: float) -> LiftedRelation:
    return LiftedRelation(relation, grid, rho)


def sum_with_lipschitz(
    relation: MonotoneRelation,
    b_map: Callable[[np.ndarray], np.ndarray],
    mu: float,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
) -> LipschitzSum:
    """
    A + B как отношение, заданное резольвентой.

    Args:
        mu: граница Липшица B; резольвента при λ требует λ·mu < 1
    """
    return LipschitzSum(relation, b_map, mu, tol=tol, max_iter=max_iter)


class MintyReport(BaseModel):
    relation: str
    samples: int
    inclusion_checked: bool
    inclusion_pass: int = 0
    inclusion_fail: int = 0
    max_inclusion_residual: float = 0.0
    nonexpansive_pairs: int = 0
    nonexpansive_fail: int = 0
    max_expansion: float = 0.0
    failing_targets: list = []

    @property
    def degraded(self) -> bool:
        return not self.inclusion_checked

    @property
    def passed(self) -> bool:
        return self.inclusion_fail == 0 and self.nonexpansive_fail == 0


def _ball_samples(rng: np.random.Generator, samples: int, dim: int, radius: float) -> np.ndarray:
    directions = rng.standard_normal((samples, dim))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = radius * rng.uniform(size=(samples, 1)) ** (1.0 / dim)
    return directions * radii


def minty_scan(
    relation: MonotoneRelation,
    lam: float,
    samples: int,
    radius: float,
    seed: int = 0,
    residual_tol: Optional[float] = None,
    slack: float = 1e-12,
) -> MintyReport:
    """
    Проверка сюръективности 1 + λA на выборке: включение через eval и попарная
    нерастягиваемость резольвенты.
    """
    if not lam > 0:
        raise ContractViolation(f"lambda must be > 0, got {lam}")
    residual_tol = settings.INCLUSION_RESIDUAL_TOL if residual_tol is None else residual_tol
    rng = np.random.default_rng(seed)
    targets = _ball_samples(rng, samples, relation.dim, radius)
    images = np.array([resolvent(relation, lam, y) for y in targets]).reshape(samples, relation.dim)

    report = MintyReport(relation=relation.name, samples=samples, inclusion_checked=relation.has_eval)
    if relation.has_eval:
        for y, x in zip(targets, images):
            value_set = relation.eval(x)
            residual = value_set.distance((y - x) / lam) if value_set is not None else float("inf")
            if residual <= residual_tol:
                report.inclusion_pass += 1
            else:
                report.inclusion_fail += 1
                if len(report.failing_targets) < 10:
                    report.failing_targets.append(y.tolist())
            if np.isfinite(residual):
                report.max_inclusion_residual = max(report.max_inclusion_residual, residual)
    else:
        logger.warning(f"⚠️ {relation.name}: eval unavailable, Minty scan degraded to nonexpansiveness only")

    if samples >= 2:
        input_gaps = pdist(targets)
        output_gaps = pdist(images)
        excess = output_gaps - input_gaps
        report.nonexpansive_pairs = int(excess.size)
        report.nonexpansive_fail = int(np.count_nonzero(excess > slack))
        report.max_expansion = float(max(0.0, excess.max()))
    logger.info(
        f"📊 Minty scan {relation.name}: inclusion {report.inclusion_pass}/{samples}, "
        f"nonexpansive fails {report.nonexpansive_fail}/{report.nonexpansive_pairs}"
    )
    return report
