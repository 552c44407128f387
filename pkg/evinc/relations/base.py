"""
Базовый интерфейс максимально монотонного отношения.
Доступ к отношению только через резольвенту (1 + λA)⁻¹.
evinc/relations/base.py
"""
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from evinc.exceptions import ContractViolation

logger = logging.getLogger(__name__)


class ValueSet:
    """Описание множества A(x): точка, брус, шар или пустое множество"""

    def __init__(self, kind: str, center=None, lower=None, upper=None, radius: float = 0.0):
        self.kind = kind
        self.center = None if center is None else np.asarray(center, dtype=float)
        self.lower = None if lower is None else np.asarray(lower, dtype=float)
        self.upper = None if upper is None else np.asarray(upper, dtype=float)
        self.radius = float(radius)

    @classmethod
    def point(cls, value) -> "ValueSet":
        return cls("point", center=value)

    @classmethod
    def box(cls, lower, upper) -> "ValueSet":
        return cls("box", lower=lower, upper=upper)

    @classmethod
    def ball(cls, center, radius: float) -> "ValueSet":
        return cls("ball", center=center, radius=radius)

    @classmethod
    def empty(cls) -> "ValueSet":
        return cls("empty")

    def shifted(self, offset) -> "ValueSet":
        offset = np.asarray(offset, dtype=float)
        if self.kind == "empty":
            return self
        if self.kind == "box":
            return ValueSet.box(self.lower + offset, self.upper + offset)
        return ValueSet(self.kind, center=self.center + offset, radius=self.radius)

    def distance(self, v) -> float:
        """Евклидово расстояние от v до множества (inf для пустого)"""
        v = np.asarray(v, dtype=float)
        if self.kind == "empty":
            return float("inf")
        if self.kind == "point":
            return float(np.linalg.norm(v - self.center))
        if self.kind == "box":
            return float(np.linalg.norm(v - np.clip(v, self.lower, self.upper)))
        return max(0.0, float(np.linalg.norm(v - self.center)) - self.radius)


@dataclass
class RelationSplit:
    """A(x) = Lx + N(x[indices]); linear/nonlinear могут отсутствовать"""

    linear: Optional[np.ndarray]
    nonlinear: Optional["MonotoneRelation"]
    indices: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))


class MonotoneRelation(ABC):
    """
    Максимально монотонное отношение на ℝ^dim.

    Подклассы реализуют `_resolve(lam, y)` для y формы (..., dim).
    """

    name: str = "relation"

    def __init__(self, dim: int, contains_origin: bool = True, bounded: bool = False):
        if dim < 1:
            raise ContractViolation(f"dim must be positive, got {dim}")
        self.dim = int(dim)
        self.contains_origin = contains_origin
        self.bounded = bounded

    def resolve(self, lam: float, y) -> np.ndarray:
        """(1 + λA)⁻¹ y"""
        if not lam > 0:
            raise ContractViolation(f"lambda must be > 0, got {lam}")
        y = np.asarray(y, dtype=float)
        if y.shape[-1:] != (self.dim,):
            raise ContractViolation(f"{self.name}: expected trailing dim {self.dim}, got shape {y.shape}")
        return self._resolve(float(lam), y)

    @abstractmethod
    def _resolve(self, lam: float, y: np.ndarray) -> np.ndarray:
        ...

    def resolve_batch(self, lam: float, ys: np.ndarray) -> np.ndarray:
        """Резольвента для строк матрицы (узлы времени); векторизована, если _resolve это допускает"""
        ys = np.asarray(ys, dtype=float)
        if self.vectorized:
            return self.resolve(lam, ys)
        return np.array([self.resolve(lam, row) for row in ys]).reshape(ys.shape)

    # Отношения каталога работают с (..., dim)
    vectorized: bool = False

    def eval(self, x) -> Optional[ValueSet]:
        """A(x) как множество, если доступно"""
        return None

    @property
    def has_eval(self) -> bool:
        return type(self).eval is not MonotoneRelation.eval

    def split(self) -> RelationSplit:
        """Линейная часть и нелинейный остаток с индексами, на которых он действует"""
        return RelationSplit(linear=None, nonlinear=self, indices=np.arange(self.dim))

    def __repr__(self) -> str:
        return f"{type(self).__name__}(dim={self.dim})"
