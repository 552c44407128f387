"""
Каталог отношений с резольвентами в замкнутой форме
evinc/relations/catalog.py
"""
import logging
from typing import Callable, Dict, Optional

import numpy as np

from evinc.exceptions import ContractViolation
from evinc.relations.base import MonotoneRelation, RelationSplit, ValueSet
from evinc.utils import mandel

logger = logging.getLogger(__name__)


def _norms(y: np.ndarray) -> np.ndarray:
    return np.linalg.norm(y, axis=-1, keepdims=True)


def _shrink(y: np.ndarray, amount: float) -> np.ndarray:
    """y·max(0, 1 - amount/|y|) по последней оси"""
    norms = _norms(y)
    with np.errstate(divide="ignore", invalid="ignore"):
        factor = np.where(norms > amount, 1.0 - amount / np.where(norms > 0, norms, 1.0), 0.0)
    return y * factor


def _project_ball(x: np.ndarray, radius: float) -> np.ndarray:
    norms = _norms(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        factor = np.where(norms > radius, radius / np.where(norms > 0, norms, 1.0), 1.0)
    return x * factor


def _saturation_resolve(y: np.ndarray, lam: float, radius: float) -> np.ndarray:
    """Решение x + λ·P_ball(x) = y: внутри шара y/(1+λ), иначе сдвиг к центру на λs"""
    norms = _norms(y)
    inside = norms <= (1.0 + lam) * radius
    with np.errstate(divide="ignore", invalid="ignore"):
        outside = y * (1.0 - lam * radius / np.where(norms > 0, norms, 1.0))
    return np.where(inside, y / (1.0 + lam), outside)


class ZeroRelation(MonotoneRelation):
    """A(x) = {0}"""

    name = "zero"
    vectorized = True

    def __init__(self, dim: int):
        super().__init__(dim, contains_origin=True, bounded=True)

    def _resolve(self, lam: float, y: np.ndarray) -> np.ndarray:
        return y.copy()

    def eval(self, x) -> ValueSet:
        return ValueSet.point(np.zeros(self.dim))

    def split(self) -> RelationSplit:
        return RelationSplit(linear=None, nonlinear=None, indices=np.zeros(0, dtype=int))


class LinearRelation(MonotoneRelation):
    """A(x) = Lx, sym(L) ⪰ 0"""

    name = "linear"
    vectorized = True

    def __init__(self, matrix, tol: float = 1e-12):
        matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
        if matrix.shape[0] != matrix.shape[1]:
            raise ContractViolation(f"linear relation needs a square matrix, got {matrix.shape}")
        sym_min = float(np.linalg.eigvalsh(0.5 * (matrix + matrix.T))[0])
        if sym_min < -tol * max(1.0, float(np.abs(matrix).max())):
            raise ContractViolation(f"linear relation is not monotone: min sym eig {sym_min}")
        super().__init__(matrix.shape[0], contains_origin=True, bounded=not np.any(matrix))
        self.matrix = matrix
        self._inverse_cache: Dict[float, np.ndarray] = {}

    def _resolve(self, lam: float, y: np.ndarray) -> np.ndarray:
        inverse = self._inverse_cache.get(lam)
        if inverse is None:
            inverse = np.linalg.inv(np.eye(self.dim) + lam * self.matrix)
            if len(self._inverse_cache) < 64:
                self._inverse_cache[lam] = inverse
        return y @ inverse.T

    def eval(self, x) -> ValueSet:
        return ValueSet.point(self.matrix @ np.asarray(x, dtype=float))

    def split(self) -> RelationSplit:
        return RelationSplit(linear=self.matrix, nonlinear=None, indices=np.zeros(0, dtype=int))


def identity_relation(dim: int) -> LinearRelation:
    return LinearRelation(np.eye(dim))


class SoftThreshold(MonotoneRelation):
    """
    Субдифференциал weight·‖·‖: norm="l1" - покомпонентный модуль (sign в 1D),
    norm="l2" - евклидова норма (блочное сжатие).
    """

    name = "soft_threshold"
    vectorized = True

    def __init__(self, dim: int = 1, weight: float = 1.0, norm: str = "l1"):
        if weight < 0:
            raise ContractViolation(f"weight must be >= 0, got {weight}")
        if norm not in ("l1", "l2"):
            raise ContractViolation(f"norm must be 'l1' or 'l2', got {norm!r}")
        super().__init__(dim, contains_origin=True, bounded=True)
        self.weight = float(weight)
        self.norm = norm

    def _resolve(self, lam: float, y: np.ndarray) -> np.ndarray:
        amount = lam * self.weight
        if self.norm == "l1":
            return np.sign(y) * np.maximum(np.abs(y) - amount, 0.0)
        return _shrink(y, amount)

    def eval(self, x) -> ValueSet:
        x = np.asarray(x, dtype=float)
        w = self.weight
        if self.norm == "l1":
            lower = np.where(x > 0, w, -w)
            upper = np.where(x < 0, -w, w)
            return ValueSet.box(lower, upper)
        norm = float(np.linalg.norm(x))
        if norm == 0.0:
            return ValueSet.ball(np.zeros(self.dim), w)
        return ValueSet.point(w * x / norm)


class BallSaturation(MonotoneRelation):
    """A(x) = P_{ball(s)}(x)"""

    name = "ball_saturation"
    vectorized = True

    def __init__(self, dim: int = 1, radius: float = 1.0):
        if not radius > 0:
            raise ContractViolation(f"radius must be > 0, got {radius}")
        super().__init__(dim, contains_origin=True, bounded=True)
        self.radius = float(radius)

    def _resolve(self, lam: float, y: np.ndarray) -> np.ndarray:
        return _saturation_resolve(y, lam, self.radius)

    def eval(self, x) -> ValueSet:
        return ValueSet.point(_project_ball(np.asarray(x, dtype=float), self.radius))


class DeviatoricSaturation(MonotoneRelation):
    """
    T -> P_{ball(s)}(dev T) на симметричных тензорах (Мандель, dim 6).
    Выход всегда следонулевой.
    """

    name = "deviatoric_saturation"
    vectorized = True

    def __init__(self, radius: float = 1.0, dim: int = mandel.MANDEL_DIM):
        if dim != mandel.MANDEL_DIM:
            raise ContractViolation(f"deviatoric saturation acts on {mandel.MANDEL_DIM} Mandel components")
        if not radius > 0:
            raise ContractViolation(f"radius must be > 0, got {radius}")
        super().__init__(dim, contains_origin=True, bounded=True)
        self.radius = float(radius)

    def _resolve(self, lam: float, y: np.ndarray) -> np.ndarray:
        deviatoric = mandel.deviator(y)
        hydrostatic = y - deviatoric
        return hydrostatic + _saturation_resolve(deviatoric, lam, self.radius)

    def eval(self, x) -> ValueSet:
        return ValueSet.point(_project_ball(mandel.deviator(np.asarray(x, dtype=float)), self.radius))

    def on_subspace(self, basis: np.ndarray, tol: float = 1e-12) -> BallSaturation:
        """Сужение на инвариантное подпространство следонулевых тензоров (столбцы basis)"""
        basis = np.atleast_2d(np.asarray(basis, dtype=float))
        if basis.shape[0] != self.dim:
            raise ContractViolation(f"basis must have {self.dim} rows, got {basis.shape}")
        if np.abs(basis.T @ basis - np.eye(basis.shape[1])).max() > tol:
            raise ContractViolation("basis columns are not orthonormal")
        if np.abs(mandel.trace(basis.T)).max() > tol:
            raise ContractViolation("basis is not trace-free")
        return BallSaturation(dim=basis.shape[1], radius=self.radius)


RelationFactory = Callable[..., MonotoneRelation]

RELATION_REGISTRY: Dict[str, RelationFactory] = {
    "zero": lambda dim, **_: ZeroRelation(dim),
    "identity": lambda dim, scale=1.0, **_: LinearRelation(scale * np.eye(dim)),
    "linear": lambda dim, matrix=None, **_: LinearRelation(np.eye(dim) if matrix is None else matrix),
    "soft_threshold": lambda dim, weight=1.0, norm="l1", **_: SoftThreshold(dim, weight, norm),
    "ball_saturation": lambda dim, radius=1.0, **_: BallSaturation(dim, radius),
    "deviatoric_saturation": lambda dim, radius=1.0, **_: DeviatoricSaturation(radius, dim),
}


def build_relation(identifier: str, dim: int, params: Optional[dict] = None) -> MonotoneRelation:
    """Отношение каталога по идентификатору из конфига"""
    factory = RELATION_REGISTRY.get(identifier)
    if factory is None:
        raise ContractViolation(
            f"unknown relation {identifier!r}; known: {', '.join(sorted(RELATION_REGISTRY))}"
        )
    relation = factory(dim, **(params or {}))
    logger.debug(f"🔧 Built relation {identifier} (dim={dim})")
    return relation
