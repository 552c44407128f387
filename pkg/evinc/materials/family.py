"""
Семейство материальных операторов M₀(t), M₁(t)
evinc/materials/family.py

Константы c₀, c₁, lip_m0, sup_m1 - заявления пользователя, их проверяет check_conditions.
Пустое ядро M₀ означает c₁ = inf, пустой образ - c₀ = inf.
"""
import logging
import math
from typing import Callable, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from evinc.config import settings
from evinc.exceptions import ConditionViolation, ContractViolation, DtTooLargeError, InconsistentLipschitzError
from evinc.utils.helpers import min_sym_eig, spectral_norm, sym_part

logger = logging.getLogger(__name__)

MatrixFn = Callable[[float], np.ndarray]


class MaterialFamily(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    dim: int = Field(ge=1)
    m0_at: MatrixFn
    m1_at: MatrixFn
    lip_m0: float = Field(ge=0)
    sup_m1: float = Field(ge=0)
    c0: float = Field(gt=0)
    c1: float = Field(gt=0)
    kernel_basis: np.ndarray
    name: str = "family"

    @model_validator(mode="after")
    def _check_kernel_basis(self) -> "MaterialFamily":
        basis = np.asarray(self.kernel_basis, dtype=float)
        if basis.ndim != 2 or basis.shape[0] != self.dim:
            raise ContractViolation(f"kernel_basis must be ({self.dim}, k), got {basis.shape}")
        return self

    def M0(self, t: float) -> np.ndarray:
        return np.asarray(self.m0_at(float(t)), dtype=float).reshape(self.dim, self.dim)

    def M1(self, t: float) -> np.ndarray:
        return np.asarray(self.m1_at(float(t)), dtype=float).reshape(self.dim, self.dim)

    @property
    def kernel_dim(self) -> int:
        return int(self.kernel_basis.shape[1])

    @property
    def range_basis(self) -> np.ndarray:
        """Ортонормированное дополнение kernel_basis"""
        return _complement(self.kernel_basis, self.dim)

    def with_claims(self, **claims) -> "MaterialFamily":
        return self.model_copy(update=claims)


def _complement(basis: np.ndarray, dim: int) -> np.ndarray:
    if basis.shape[1] == 0:
        return np.eye(dim)
    if basis.shape[1] == dim:
        return np.zeros((dim, 0))
    projector = np.eye(dim) - basis @ basis.T
    eigenvalues, vectors = np.linalg.eigh(projector)
    return vectors[:, eigenvalues > 0.5]


def kernel_decompose(m0_sample: np.ndarray, tol: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Ортонормированные базисы ядра и образа симметричной матрицы.

    Собственные значения с |σ| ≤ tol·σ_max относятся к ядру.
    """
    tol = settings.KERNEL_TOL if tol is None else tol
    matrix = np.asarray(m0_sample, dtype=float)
    scale = max(1.0, float(np.abs(matrix).max())) if matrix.size else 1.0
    asymmetry = float(np.abs(matrix - matrix.T).max()) if matrix.size else 0.0
    if asymmetry > max(tol, settings.SYMMETRY_TOL) * scale:
        raise ConditionViolation(f"M0 sample is not symmetric (defect {asymmetry:.3e})", condition="a")
    eigenvalues, vectors = np.linalg.eigh(sym_part(matrix))
    sigma_max = float(np.abs(eigenvalues).max()) if eigenvalues.size else 0.0
    in_kernel = np.abs(eigenvalues) <= tol * sigma_max
    return vectors[:, in_kernel], vectors[:, ~in_kernel]


def _measured_claims(m0: np.ndarray, m1: np.ndarray, kernel: np.ndarray, range_: np.ndarray) -> dict:
    c0 = float(np.linalg.eigvalsh(range_.T @ m0 @ range_)[0]) if range_.shape[1] else math.inf
    c1 = min_sym_eig(kernel.T @ m1 @ kernel) if kernel.shape[1] else math.inf
    return {"c0": c0, "c1": c1, "sup_m1": spectral_norm(m1)}


def _coefficient_pair(m0, m1) -> Tuple[np.ndarray, np.ndarray]:
    """M₀ и M₁ как квадратные матрицы одного размера; M₁ по умолчанию нулевая"""
    m0 = np.atleast_2d(np.asarray(m0, dtype=float))
    if m0.ndim != 2 or m0.shape[0] != m0.shape[1] or m0.size == 0:
        raise ContractViolation(f"M0 must be a non-empty square matrix, got shape {m0.shape}")
    dim = m0.shape[0]
    m1 = np.zeros((dim, dim)) if m1 is None else np.atleast_2d(np.asarray(m1, dtype=float))
    if m1.shape != m0.shape:
        raise ContractViolation(f"M1 shape {m1.shape} does not match M0 shape {m0.shape}")
    return m0, m1


def constant_family(
    m0,
    m1=None,
    c0: Optional[float] = None,
    c1: Optional[float] = None,
    lip_m0: float = 0.0,
    sup_m1: Optional[float] = None,
    name: str = "constant",
) -> MaterialFamily:
    """
    Постоянные M₀, M₁. Незаданные заявления берутся из самих матриц;
    c₁ ≤ 0 на ядре заменяется на заявленное значение и ловится проверкой условий.
    """
    m0, m1 = _coefficient_pair(m0, m1)
    dim = m0.shape[0]
    kernel, range_ = kernel_decompose(m0)
    measured = _measured_claims(m0, m1, kernel, range_)
    claims = {
        "c0": c0 if c0 is not None else measured["c0"],
        "c1": c1 if c1 is not None else measured["c1"],
        "sup_m1": sup_m1 if sup_m1 is not None else measured["sup_m1"],
        "lip_m0": lip_m0,
    }
    if claims["c1"] <= 0:
        logger.warning(f"⚠️ {name}: kernel block of M1 has no positive lower bound ({claims['c1']:.3e})")
        claims["c1"] = 1e-300
    m0_frozen, m1_frozen = m0.copy(), m1.copy()
    return MaterialFamily(
        dim=dim,
        m0_at=lambda t: m0_frozen,
        m1_at=lambda t: m1_frozen,
        kernel_basis=kernel,
        name=name,
        **claims,
    )


def sinusoidal_family(
    m0,
    m1=None,
    amplitude: float = 0.5,
    frequency: float = 1.0,
    c0: Optional[float] = None,
    c1: Optional[float] = None,
    lip_m0: Optional[float] = None,
    sup_m1: Optional[float] = None,
    name: str = "sinusoidal",
) -> MaterialFamily:
    """M₀(t) = (1 + amplitude·sin(frequency·t))·M₀, M₁ постоянна; |amplitude| < 1"""
    if not abs(amplitude) < 1:
        raise ContractViolation(f"|amplitude| must be < 1, got {amplitude}")
    m0, m1 = _coefficient_pair(m0, m1)
    dim = m0.shape[0]
    kernel, range_ = kernel_decompose(m0)
    measured = _measured_claims(m0, m1, kernel, range_)
    claims = {
        "c0": c0 if c0 is not None else (1 - abs(amplitude)) * measured["c0"],
        "c1": c1 if c1 is not None else measured["c1"],
        "sup_m1": sup_m1 if sup_m1 is not None else measured["sup_m1"],
        "lip_m0": lip_m0 if lip_m0 is not None else abs(amplitude * frequency) * spectral_norm(m0),
    }
    if claims["c1"] <= 0:
        claims["c1"] = 1e-300
    m0_frozen, m1_frozen = m0.copy(), m1.copy()
    return MaterialFamily(
        dim=dim,
        m0_at=lambda t: (1.0 + amplitude * np.sin(frequency * t)) * m0_frozen,
        m1_at=lambda t: m1_frozen,
        kernel_basis=kernel,
        name=name,
        **claims,
    )


def m0_prime(family: MaterialFamily, t: float, h: float = 1e-5) -> np.ndarray:
    """Центральная разность (M₀(t+h) - M₀(t-h))/(2h), симметризованная"""
    if not h > 0:
        raise ContractViolation(f"h must be > 0, got {h}")
    forward, centre, backward = family.M0(t + h), family.M0(t), family.M0(t - h)
    prime = sym_part((forward - backward) / (2.0 * h))
    second = spectral_norm(forward - 2.0 * centre + backward) / h**2
    rounding = 10.0 * np.finfo(float).eps * max(1.0, spectral_norm(centre)) / h
    tol_fd = 10.0 * h * second + rounding
    norm = spectral_norm(prime)
    if norm > family.lip_m0 + tol_fd:
        logger.error(f"❌ {family.name}: |M0'({t})| = {norm:.6e} exceeds lip_m0 = {family.lip_m0:.6e}")
        raise InconsistentLipschitzError(
            f"|M0'({t})| = {norm:.6e} > lip_m0 + tol_fd = {family.lip_m0 + tol_fd:.6e}"
        )
    return prime


def rho_zero(family: MaterialFamily, c_tilde: float) -> float:
    """(1/c₀)(c̃ + ½lip + sup + sup²/(c₁ - c̃))"""
    if not 0 < c_tilde < family.c1:
        raise ContractViolation(f"c_tilde must lie in (0, c1={family.c1}), got {c_tilde}")
    if math.isinf(family.c0):
        return 0.0
    return _perturbation(family, c_tilde) / family.c0


def _perturbation(family: MaterialFamily, c_tilde: float) -> float:
    coupling = 0.0 if math.isinf(family.c1) else family.sup_m1**2 / (family.c1 - c_tilde)
    return c_tilde + 0.5 * family.lip_m0 + family.sup_m1 + coupling


def dt_max(family: MaterialFamily, c_tilde: float) -> float:
    """Наибольший шаг, при котором sym(M₀/dt + M₁) ⪰ c̃ гарантированно"""
    if not 0 < c_tilde < family.c1:
        raise ContractViolation(f"c_tilde must lie in (0, c1={family.c1}), got {c_tilde}")
    if math.isinf(family.c0):
        return math.inf
    return family.c0 / _perturbation(family, c_tilde)


class StepOperator(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    matrix: np.ndarray
    min_sym_eig: float


def step_operator(
    family: MaterialFamily,
    t: float,
    dt: float,
    margin: Optional[float] = None,
    extra: Optional[np.ndarray] = None,
) -> StepOperator:
    """
    S(t) = M₀(t)/dt + M₁(t) (+ extra, линейная часть отношения).

    Raises:
        DtTooLargeError: min eig sym(S) < margin (или ≤ 0 без margin)
    """
    if not dt > 0:
        raise ContractViolation(f"dt must be > 0, got {dt}")
    matrix = family.M0(t) / dt + family.M1(t)
    if extra is not None:
        matrix = matrix + extra
    smallest = min_sym_eig(matrix)
    required = 0.0 if margin is None else margin
    if smallest < required or smallest <= 0.0:
        c_tilde = required if 0 < required < family.c1 else 0.5 * min(family.c1, 1.0)
        suggested = dt_max(family, c_tilde)
        logger.error(f"❌ Step operator at t={t}: min sym eig {smallest:.3e} < {required:.3e}, suggested dt {suggested:.3e}")
        raise DtTooLargeError(
            f"min eig of sym(M0/dt + M1) = {smallest:.6e} below margin {required:.6e} at t={t}; "
            f"suggested dt <= {suggested:.6e}",
            suggested_dt=suggested,
        )
    return StepOperator(matrix=matrix, min_sym_eig=smallest)


def substitute_family(family: MaterialFamily, delta: float, h: float = 1e-5) -> MaterialFamily:
    """Семейство (M₀, δ - M₀′) из доказательства существования; на ядре c₁ = δ"""
    if not delta > 0:
        raise ContractViolation(f"delta must be > 0, got {delta}")
    identity = np.eye(family.dim)

    def m1_at(t: float) -> np.ndarray:
        return delta * identity - m0_prime(family, t, h)

    return family.model_copy(
        update={
            "m1_at": m1_at,
            "sup_m1": delta + family.lip_m0,
            "c1": delta if family.kernel_dim else math.inf,
            "name": f"{family.name}+substitute",
        }
    )
