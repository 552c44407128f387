"""
Комбинаторы отношений: лифт на сетку, Йосида, сумма с липшицевым отображением,
прямые суммы по слотам с линейной частью
evinc/relations/combinators.py
"""
import logging
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from evinc.config import settings
from evinc.exceptions import ContractViolation, ConvergenceFailure, ParameterOutOfRange
from evinc.relations.base import MonotoneRelation, RelationSplit, ValueSet
from evinc.signals.models import TimeGrid, WeightedSignal

logger = logging.getLogger(__name__)


class LiftedRelation:
    """Поузловое действие базового отношения на сигналах"""

    def __init__(self, base: MonotoneRelation, grid: TimeGrid, rho: float):
        self.base = base
        self.grid = grid
        self.rho = rho

    def _check(self, u: WeightedSignal) -> None:
        if u.grid != self.grid or u.dim != self.base.dim:
            raise ContractViolation(
                f"lifted relation expects grid {self.grid} and dim {self.base.dim}, "
                f"got {u.grid} and dim {u.dim}"
            )

    def resolve(self, lam: float, u: WeightedSignal) -> WeightedSignal:
        self._check(u)
        return u.with_values(self.base.resolve_batch(lam, u.values))

    def yosida(self, lam: float, u: WeightedSignal) -> WeightedSignal:
        return u.with_values((u.values - self.resolve(lam, u).values) / lam)


class YosidaRelation(MonotoneRelation):
    """
    A_λ = (1 - J_λ)/λ как однозначное липшицево отношение.
    Резольвента: (1 + μA_λ)⁻¹y = λ/(λ+μ)·y + μ/(λ+μ)·J_{λ+μ}(y).
    """

    name = "yosida"

    def __init__(self, base: MonotoneRelation, lam: float):
        if not lam > 0:
            raise ContractViolation(f"lambda must be > 0, got {lam}")
        super().__init__(base.dim, contains_origin=base.contains_origin, bounded=base.bounded)
        self.base = base
        self.lam = float(lam)
        self.vectorized = base.vectorized

    def apply(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return (x - self.base.resolve(self.lam, x)) / self.lam

    def _resolve(self, mu: float, y: np.ndarray) -> np.ndarray:
        total = self.lam + mu
        return (self.lam / total) * y + (mu / total) * self.base.resolve(total, y)

    def eval(self, x) -> ValueSet:
        return ValueSet.point(self.apply(x))

    def split(self) -> RelationSplit:
        inner = self.base.split()
        if inner.linear is None:
            if inner.nonlinear is None:
                return inner
            return RelationSplit(
                linear=None,
                nonlinear=YosidaRelation(inner.nonlinear, self.lam),
                indices=inner.indices,
            )
        return super().split()


class LipschitzSum(MonotoneRelation):
    """A + B, B липшицево; резольвента - итерация Пикара u ↦ J_λ(y - λB(u))"""

    name = "lipschitz_sum"

    def __init__(
        self,
        base: MonotoneRelation,
        b_map: Callable[[np.ndarray], np.ndarray],
        mu: float,
        tol: Optional[float] = None,
        max_iter: Optional[int] = None,
    ):
        if not np.isfinite(mu) or mu < 0:
            raise ContractViolation(f"Lipschitz bound of B must be finite and >= 0, got {mu}")
        super().__init__(base.dim, contains_origin=base.contains_origin, bounded=False)
        self.base = base
        self.b_map = b_map
        self.mu = float(mu)
        self.tol = settings.PICARD_TOL if tol is None else tol
        self.max_iter = settings.PICARD_MAX_ITER if max_iter is None else max_iter

    def _resolve(self, lam: float, y: np.ndarray) -> np.ndarray:
        if lam * self.mu >= 1.0:
            raise ParameterOutOfRange(f"lambda*Lip(B) = {lam * self.mu} >= 1")
        u = self.base.resolve(lam, y)
        residual = float("inf")
        for iteration in range(1, self.max_iter + 1):
            u_next = self.base.resolve(lam, y - lam * np.asarray(self.b_map(u), dtype=float))
            residual = float(np.max(np.abs(u_next - u))) if u.size else 0.0
            u = u_next
            if residual <= self.tol:
                logger.debug(f"🔧 Picard converged in {iteration} iterations")
                return u
        logger.error(f"❌ Picard iteration did not converge, residual {residual:.3e}")
        raise ConvergenceFailure(
            f"Picard iteration not converged in {self.max_iter} iterations", residual, self.max_iter
        )

    def eval(self, x) -> Optional[ValueSet]:
        inner = self.base.eval(x)
        if inner is None:
            return None
        return inner.shifted(self.b_map(np.asarray(x, dtype=float)))

    @property
    def has_eval(self) -> bool:
        return self.base.has_eval


class DirectSumRelation(MonotoneRelation):
    """A₁ ⊕ A₂ ⊕ ... на последовательных блоках координат"""

    name = "direct_sum"

    def __init__(self, parts: Sequence[MonotoneRelation]):
        if not parts:
            raise ContractViolation("direct sum needs at least one part")
        self.parts = list(parts)
        self.offsets = np.cumsum([0] + [p.dim for p in self.parts])
        super().__init__(
            int(self.offsets[-1]),
            contains_origin=all(p.contains_origin for p in self.parts),
            bounded=all(p.bounded for p in self.parts),
        )
        self.vectorized = all(p.vectorized for p in self.parts)

    def _resolve(self, lam: float, y: np.ndarray) -> np.ndarray:
        blocks = [
            part.resolve(lam, y[..., start:stop])
            for part, start, stop in zip(self.parts, self.offsets[:-1], self.offsets[1:])
        ]
        return np.concatenate(blocks, axis=-1)

    @property
    def has_eval(self) -> bool:
        return False


class NodewiseRelation(MonotoneRelation):
    """count копий базового отношения на подряд идущих блоках"""

    name = "nodewise"

    def __init__(self, base: MonotoneRelation, count: int):
        super().__init__(base.dim * count, contains_origin=base.contains_origin, bounded=base.bounded)
        self.base = base
        self.count = int(count)
        self.vectorized = True

    def _resolve(self, lam: float, y: np.ndarray) -> np.ndarray:
        blocks = y.reshape(y.shape[:-1] + (self.count, self.base.dim))
        return self.base.resolve_batch(lam, blocks.reshape(-1, self.base.dim)).reshape(y.shape)


class SlotRelation(MonotoneRelation):
    """
    A(x) = Lx + Σ_i P_iᵀ N_i(P_i x): линейная (обычно кососимметричная) часть
    плюс отношения на непересекающихся наборах индексов; остальные координаты - нуль.
    """

    name = "slot"

    def __init__(
        self,
        dim: int,
        slots: Sequence[Tuple[Sequence[int], MonotoneRelation]] = (),
        linear: Optional[np.ndarray] = None,
    ):
        slot_list = [(np.asarray(idx, dtype=int), rel) for idx, rel in slots]
        for idx, rel in slot_list:
            if len(idx) != rel.dim:
                raise ContractViolation(f"slot of {len(idx)} indices for relation of dim {rel.dim}")
        all_idx = np.concatenate([idx for idx, _ in slot_list]) if slot_list else np.zeros(0, dtype=int)
        if len(np.unique(all_idx)) != len(all_idx) or (all_idx.size and (all_idx.min() < 0 or all_idx.max() >= dim)):
            raise ContractViolation("slot indices must be distinct and inside the state")
        if linear is not None:
            linear = np.asarray(linear, dtype=float)
            if linear.shape != (dim, dim):
                raise ContractViolation(f"linear part must be {dim}x{dim}, got {linear.shape}")
            if np.linalg.eigvalsh(0.5 * (linear + linear.T))[0] < -1e-10 * max(1.0, np.abs(linear).max()):
                raise ContractViolation("linear part is not monotone")
        super().__init__(
            dim,
            contains_origin=all(rel.contains_origin for _, rel in slot_list),
            bounded=(linear is None or not np.any(linear)) and all(rel.bounded for _, rel in slot_list),
        )
        self.slots = slot_list
        self.linear = linear
        self._indices = all_idx
        self._nonlinear = None
        if slot_list:
            parts = [rel for _, rel in slot_list]
            self._nonlinear = parts[0] if len(parts) == 1 else DirectSumRelation(parts)

    def split(self) -> RelationSplit:
        return RelationSplit(linear=self.linear, nonlinear=self._nonlinear, indices=self._indices)

    def _resolve(self, lam: float, y: np.ndarray) -> np.ndarray:
        if y.ndim > 1:
            return np.array([self._resolve(lam, row) for row in y])
        if self.linear is None:
            x = y.copy()
            for idx, rel in self.slots:
                x[idx] = rel.resolve(lam, y[idx])
            return x
        # x + λ(Lx + N(x)) ∋ y  <=>  (I/λ + L)x + N(x) ∋ y/λ
        from evinc.relations.stationary import solve_stationary

        operator = np.eye(self.dim) / lam + self.linear
        result = solve_stationary(operator, y / lam, self._nonlinear, self._indices, tol=settings.PICARD_TOL)
        return result.x
