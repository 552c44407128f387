"""
Собранная система галереи и её превращение в InclusionProblem
evinc/gallery/system.py
"""
import logging
import math
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from evinc.exceptions import ConditionViolation
from evinc.materials.conditions import ConditionsReport, check_conditions
from evinc.materials.family import MaterialFamily, kernel_decompose, rho_zero
from evinc.relations.combinators import SlotRelation
from evinc.signals.models import TimeGrid, WeightedSignal
from evinc.solver.problem import InclusionProblem, SolveMode
from evinc.utils.helpers import format_key_values, min_sym_eig, spectral_norm

logger = logging.getLogger(__name__)

# запасы для заявленных констант относительно выборки
CLAIM_LOWER = 0.9
CLAIM_UPPER = 1.1
CLAIM_SAMPLES = 257


class GalleryLoad(BaseModel):
    """Импульс нагрузки на [start, stop]: объёмная сила по x₁ и источник тепла"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    body_force: float = 0.0
    heat_source: float = 0.0
    start: float = 0.0
    stop: float = 0.5


class GallerySystem(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str
    family: MaterialFamily
    relation: SlotRelation
    skew: np.ndarray
    slots: Dict[str, Tuple[int, int]]
    conditions: ConditionsReport
    dx: float = Field(gt=0)

    @property
    def dim(self) -> int:
        return self.family.dim

    def slot(self, name: str) -> slice:
        start, stop = self.slots[name]
        return slice(start, stop)

    def summary(self) -> Dict[str, Any]:
        pairs: Dict[str, Any] = {"model": self.name, "dim": self.dim}
        for slot_name, (start, stop) in self.slots.items():
            pairs[f"slot_{slot_name}"] = f"{start}:{stop}"
        pairs.update(
            {
                "kernel_dim": self.family.kernel_dim,
                "c0": self.family.c0,
                "c1": self.family.c1,
                "lip_m0": self.family.lip_m0,
                "sup_m1": self.family.sup_m1,
                "skew_defect": float(np.abs(self.skew + self.skew.T).max()),
                "conditions_passed": self.conditions.passed,
            }
        )
        return pairs

    def summary_text(self) -> str:
        return format_key_values(self.summary())

    def spatial_norm_scale(self) -> float:
        """√dx для дискретной L₂-нормы по пространству"""
        return math.sqrt(self.dx)


def _lower_claim(measured: float) -> float:
    """Нижняя оценка с запасом; неположительное значение провалит проверку условий"""
    if measured <= 0:
        return 1e-300
    return CLAIM_LOWER * measured if math.isfinite(measured) else measured


def derive_family(
    name: str,
    dim: int,
    m0_at: Callable[[float], np.ndarray],
    m1_at: Callable[[float], np.ndarray],
    horizon: Tuple[float, float],
) -> MaterialFamily:
    """Заявленные константы по плотной выборке с запасом 10%"""
    times = np.linspace(horizon[0], horizon[1], CLAIM_SAMPLES)
    kernel, range_ = kernel_decompose(m0_at(times[0]))
    c0, c1, sup_m1, lip = math.inf, math.inf, 0.0, 0.0
    previous = None
    for t in times:
        m0, m1 = m0_at(t), m1_at(t)
        if range_.shape[1]:
            c0 = min(c0, float(np.linalg.eigvalsh(range_.T @ m0 @ range_)[0]))
        if kernel.shape[1]:
            c1 = min(c1, min_sym_eig(kernel.T @ m1 @ kernel))
        sup_m1 = max(sup_m1, spectral_norm(m1))
        if previous is not None and t > previous[0]:
            lip = max(lip, spectral_norm(m0 - previous[1]) / (t - previous[0]))
        previous = (t, m0)
    return MaterialFamily(
        dim=dim,
        m0_at=m0_at,
        m1_at=m1_at,
        lip_m0=CLAIM_UPPER * lip,
        sup_m1=CLAIM_UPPER * sup_m1,
        c0=_lower_claim(c0),
        c1=_lower_claim(c1),
        kernel_basis=kernel,
        name=name,
    )


def verify_family(family: MaterialFamily, horizon: Tuple[float, float], samples: int = 65) -> ConditionsReport:
    """Проверка условий; при провале сборка отклоняется"""
    report = check_conditions(family, np.linspace(horizon[0], horizon[1], samples))
    if not report.passed:
        logger.error(f"❌ {family.name}: assembly rejected, failed {', '.join(report.failures)}")
        report.raise_for_failure()
    return report


def require_positive(name: str, **coefficients) -> None:
    for label, coefficient in coefficients.items():
        if not coefficient.positive:
            logger.error(f"❌ {name}: coefficient {label} is not uniformly positive ({coefficient.minimum})")
            raise ConditionViolation(
                f"{name}: coefficient {label} has minimum {coefficient.minimum} <= 0", condition="positivity"
            )


def gallery_forcing(
    system: GallerySystem,
    grid: TimeGrid,
    rho: float,
    load: GalleryLoad,
    heat_scale: float = 1.0,
) -> WeightedSignal:
    values = np.zeros((grid.n, system.dim))
    active = (grid.times >= load.start) & (grid.times <= load.stop)
    velocity = system.slot("v")
    values[np.ix_(active, np.arange(velocity.start, velocity.stop, 3))] = load.body_force
    if "theta" in system.slots and load.heat_source:
        values[active, system.slot("theta")] = heat_scale * load.heat_source
    return WeightedSignal(grid=grid, values=values, rho=rho)


def to_problem(
    system: GallerySystem,
    forcing: WeightedSignal,
    c_tilde: Optional[float] = None,
    mode: SolveMode = SolveMode.DIRECT,
    **solver_options,
) -> InclusionProblem:
    """c̃ по умолчанию min(1, c₁)/2; ρ из forcing должно быть ≥ ρ₀"""
    family = system.family
    if c_tilde is None:
        c_tilde = 0.5 * min(1.0, family.c1)
    return InclusionProblem(
        family=family,
        relation=system.relation,
        forcing=forcing,
        rho=forcing.rho,
        c_tilde=c_tilde,
        mode=mode,
        name=system.name,
        conditions=system.conditions,
        **solver_options,
    )


def default_rho(system: GallerySystem, c_tilde: Optional[float] = None) -> float:
    """max(1, ρ₀)"""
    family = system.family
    if c_tilde is None:
        c_tilde = 0.5 * min(1.0, family.c1)
    return max(1.0, rho_zero(family, c_tilde))
