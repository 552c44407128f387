"""
Проверка условий на семейство (симметрия, Липшиц, постоянное ядро, положительность)
и дискретная оценка монотонности
evinc/materials/conditions.py
"""
import logging
import math
from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel

from evinc.config import settings
from evinc.exceptions import ConditionViolation, ContractViolation
from evinc.materials.family import MaterialFamily
from evinc.signals.models import WeightedSignal
from evinc.utils.helpers import format_key_values, min_sym_eig, spectral_norm

logger = logging.getLogger(__name__)

LIPSCHITZ_SLACK = 1e-6
CLAIM_SLACK = 1e-10


class ConditionsReport(BaseModel):
    family: str
    samples: int
    dim: int
    kernel_dim: int
    symmetric: bool
    max_asymmetry: float
    lipschitz_ok: bool
    measured_lip_m0: float
    claimed_lip_m0: float
    kernel_constant: bool
    max_kernel_defect: float
    range_positive: bool
    measured_c0: float
    claimed_c0: float
    kernel_positive: bool
    measured_c1: float
    claimed_c1: float
    sup_ok: bool
    measured_sup_m1: float
    claimed_sup_m1: float
    sup_m0: float

    @property
    def failures(self) -> List[str]:
        checks = {
            "a": self.symmetric,
            "lipschitz": self.lipschitz_ok,
            "c": self.kernel_constant,
            "d0": self.range_positive,
            "d1": self.kernel_positive,
            "sup_m1": self.sup_ok,
        }
        return [name for name, ok in checks.items() if not ok]

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_text(self) -> str:
        pairs = self.model_dump()
        pairs["passed"] = self.passed
        pairs["failures"] = ",".join(self.failures) or "none"
        return format_key_values(pairs)

    def raise_for_failure(self) -> None:
        if self.failures:
            condition = self.failures[0]
            raise ConditionViolation(
                f"{self.family}: condition(s) {', '.join(self.failures)} failed", condition=condition, report=self
            )


def check_conditions(family: MaterialFamily, t_samples: Sequence[float]) -> ConditionsReport:
    """
    Проверяет условия на выборке времён и возвращает измеренные константы.
    Отчёт содержит pass/fail по каждому условию, исключений нет.
    """
    times = np.sort(np.asarray(list(t_samples), dtype=float))
    if times.size == 0:
        raise ContractViolation("check_conditions needs at least one sample time")
    kernel = family.kernel_basis
    range_ = family.range_basis

    max_asymmetry = 0.0
    max_kernel_defect = 0.0
    measured_c0 = math.inf
    measured_c1 = math.inf
    measured_sup = 0.0
    sup_m0 = 0.0
    m0_samples = []
    for t in times:
        m0, m1 = family.M0(t), family.M1(t)
        m0_samples.append(m0)
        scale = max(1.0, float(np.abs(m0).max()))
        max_asymmetry = max(max_asymmetry, float(np.abs(m0 - m0.T).max()) / scale)
        if kernel.shape[1]:
            max_kernel_defect = max(max_kernel_defect, spectral_norm(m0 @ kernel) / scale)
            measured_c1 = min(measured_c1, min_sym_eig(kernel.T @ m1 @ kernel))
        if range_.shape[1]:
            block = range_.T @ m0 @ range_
            measured_c0 = min(measured_c0, float(np.linalg.eigvalsh(0.5 * (block + block.T))[0]))
        measured_sup = max(measured_sup, spectral_norm(m1))
        sup_m0 = max(sup_m0, spectral_norm(m0))

    measured_lip = 0.0
    for (t_a, m_a), (t_b, m_b) in zip(zip(times[:-1], m0_samples[:-1]), zip(times[1:], m0_samples[1:])):
        if t_b > t_a:
            measured_lip = max(measured_lip, spectral_norm(m_b - m_a) / (t_b - t_a))

    report = ConditionsReport(
        family=family.name,
        samples=int(times.size),
        dim=family.dim,
        kernel_dim=family.kernel_dim,
        symmetric=max_asymmetry <= settings.SYMMETRY_TOL,
        max_asymmetry=max_asymmetry,
        lipschitz_ok=measured_lip <= family.lip_m0 * (1 + LIPSCHITZ_SLACK) + CLAIM_SLACK,
        measured_lip_m0=measured_lip,
        claimed_lip_m0=family.lip_m0,
        kernel_constant=max_kernel_defect <= settings.SYMMETRY_TOL,
        max_kernel_defect=max_kernel_defect,
        range_positive=measured_c0 >= family.c0 - CLAIM_SLACK * max(1.0, family.c0 if math.isfinite(family.c0) else 1.0),
        measured_c0=measured_c0,
        claimed_c0=family.c0,
        kernel_positive=measured_c1 > 0 and measured_c1 >= family.c1 - CLAIM_SLACK * max(1.0, family.c1 if math.isfinite(family.c1) else 1.0),
        measured_c1=measured_c1,
        claimed_c1=family.c1,
        sup_ok=measured_sup <= family.sup_m1 * (1 + LIPSCHITZ_SLACK) + CLAIM_SLACK,
        measured_sup_m1=measured_sup,
        claimed_sup_m1=family.sup_m1,
        sup_m0=sup_m0,
    )
    if report.passed:
        logger.info(f"✅ Conditions hold for {family.name}: c0={measured_c0:.6g}, c1={measured_c1:.6g}")
    else:
        logger.warning(f"⚠️ Conditions failed for {family.name}: {', '.join(report.failures)}")
    return report


class MonotonicityMeasurement(BaseModel):
    lhs: float
    rhs: float
    deficit: float
    measured_c: float
    allowed_c: float
    epsilon: float

    @property
    def passed(self) -> bool:
        return self.measured_c <= self.allowed_c


def monotonicity_bound(
    family: MaterialFamily,
    u: WeightedSignal,
    c_tilde: float,
    epsilon: Optional[float] = None,
) -> MonotonicityMeasurement:
    """
    Дискретная оценка ⟨(∂M₀ + M₁)u, u⟩_ρ ≥ (ρc₀ - ½lip - sup - sup²/ε)‖ι₁*u‖² + (c₁ - ε)‖ι₀*u‖² - C·dt·‖u‖².
    Возвращает наименьшее C ≥ 0, замыкающее неравенство, и допустимое 10(ρ² + lip)·max(1, sup‖M₀‖).
    """
    if u.dim != family.dim:
        raise ContractViolation(f"signal dim {u.dim} != family dim {family.dim}")
    rho, grid = u.rho, u.grid
    dt = grid.dt
    times = grid.times
    weights = grid.weights(rho)
    kernel, range_ = family.kernel_basis, family.range_basis
    has_kernel, has_range = kernel.shape[1] > 0, range_.shape[1] > 0
    if epsilon is None:
        epsilon = (family.c1 - c_tilde) / 2.0 if math.isfinite(family.c1) else 1.0

    lhs = 0.0
    sup_m0 = 0.0
    previous_m0u = np.zeros(family.dim)
    for k, t in enumerate(times):
        m0 = family.M0(t)
        sup_m0 = max(sup_m0, spectral_norm(m0))
        m0u = m0 @ u.values[k]
        flux = (m0u - previous_m0u) / dt + family.M1(t) @ u.values[k]
        lhs += weights[k] * float(flux @ u.values[k])
        previous_m0u = m0u

    range_norm2 = float(np.dot(weights, np.sum((u.values @ range_) ** 2, axis=1))) if has_range else 0.0
    kernel_norm2 = float(np.dot(weights, np.sum((u.values @ kernel) ** 2, axis=1))) if has_kernel else 0.0
    total_norm2 = float(np.dot(weights, np.sum(u.values**2, axis=1)))

    rhs = 0.0
    if has_range:
        coupling = family.sup_m1**2 / epsilon if has_kernel else 0.0
        rhs += (rho * family.c0 - 0.5 * family.lip_m0 - family.sup_m1 - coupling) * range_norm2
    if has_kernel:
        rhs += (family.c1 - epsilon) * kernel_norm2

    deficit = rhs - lhs
    measured_c = max(0.0, deficit) / (dt * total_norm2) if total_norm2 > 0 else 0.0
    allowed_c = 10.0 * (rho**2 + family.lip_m0) * max(1.0, sup_m0)
    result = MonotonicityMeasurement(
        lhs=lhs, rhs=rhs, deficit=deficit, measured_c=measured_c, allowed_c=allowed_c, epsilon=epsilon
    )
    logger.debug(f"📊 Monotonicity bound {family.name}: C={measured_c:.3e} (allowed {allowed_c:.3e})")
    return result

