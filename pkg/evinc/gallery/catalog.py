"""
Малые эталонные задачи: скалярное ОДУ, вырожденная, знаковая, алгебраическая,
насыщение на плоскости и обе модели галереи при m = 2
evinc/gallery/catalog.py
"""
import logging
from typing import Callable, Dict, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from evinc.exceptions import ConfigError
from evinc.gallery.slab import SlabGrid
from evinc.gallery.system import GalleryLoad
from evinc.gallery.thermoplasticity import build_thermoplasticity
from evinc.gallery.viscoplasticity import build_viscoplasticity
from evinc.materials.family import MaterialFamily, constant_family, rho_zero
from evinc.relations.base import MonotoneRelation
from evinc.relations.catalog import DeviatoricSaturation, SoftThreshold, ZeroRelation, identity_relation
from evinc.signals.models import TimeGrid, WeightedSignal
from evinc.solver.problem import InclusionProblem, SolveMode
from evinc.utils import mandel

logger = logging.getLogger(__name__)

PLANAR_RADIUS = 0.5


class CatalogEntry(BaseModel):
    """
    Эталонная задача.

    Args:
        horizon: длина интервала по умолчанию
        oracle: пригодна для перебора ветвей (dim ≤ 2)
        exact: точное решение непрерывной задачи, если известно
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    name: str
    horizon: float
    dt: float = 0.01
    oracle: bool = True
    family: Optional[Callable[[], MaterialFamily]] = None
    relation: Optional[Callable[[], MonotoneRelation]] = None
    forcing: Optional[Callable[[float], np.ndarray]] = None
    exact: Optional[Callable[[np.ndarray], np.ndarray]] = None


def _planar_relation() -> MonotoneRelation:
    return DeviatoricSaturation(PLANAR_RADIUS).on_subspace(mandel.deviatoric_basis()[:, :2])


CATALOG: Dict[str, CatalogEntry] = {
    "scalar_ode": CatalogEntry(
        name="scalar_ode",
        horizon=2.0,
        family=lambda: constant_family([[1.0]], name="scalar_ode"),
        relation=lambda: identity_relation(1),
        forcing=lambda t: np.array([1.0]),
        exact=lambda times: (1.0 - np.exp(-times))[:, None],
    ),
    "degenerate": CatalogEntry(
        name="degenerate",
        horizon=1.0,
        family=lambda: constant_family(np.diag([1.0, 0.0]), np.diag([0.0, 1.0]), name="degenerate"),
        relation=lambda: ZeroRelation(2),
        forcing=lambda t: np.array([1.0, np.cos(t)]),
        exact=lambda times: np.column_stack([times, np.cos(times)]),
    ),
    "sign_ramp": CatalogEntry(
        name="sign_ramp",
        horizon=3.0,
        family=lambda: constant_family([[1.0]], name="sign_ramp"),
        relation=lambda: SoftThreshold(1, weight=1.0),
        forcing=lambda t: np.array([2.0 if 0.0 <= t <= 1.0 else 0.0]),
        exact=lambda times: np.clip(np.minimum(times, 2.0 - times), 0.0, None)[:, None],
    ),
    "algebraic": CatalogEntry(
        name="algebraic",
        horizon=1.0,
        family=lambda: constant_family([[0.0]], [[1.0]], name="algebraic"),
        relation=lambda: ZeroRelation(1),
        forcing=lambda t: np.array([np.sin(3.0 * t)]),
        exact=lambda times: np.sin(3.0 * times)[:, None],
    ),
    "planar_saturation": CatalogEntry(
        name="planar_saturation",
        horizon=2.0,
        family=lambda: constant_family(np.eye(2), name="planar_saturation"),
        relation=_planar_relation,
        forcing=lambda t: np.array([1.0, -0.5]) if t <= 1.0 else np.zeros(2),
    ),
    "thermoplasticity_m2": CatalogEntry(name="thermoplasticity_m2", horizon=0.2, oracle=False),
    "viscoplasticity_m2": CatalogEntry(name="viscoplasticity_m2", horizon=0.2, oracle=False),
}

GALLERY_LOAD = GalleryLoad(body_force=1.0, heat_source=1.0, start=0.0, stop=0.1)


def catalog_names(oracle_only: bool = False):
    return [name for name, entry in CATALOG.items() if entry.oracle or not oracle_only]


def catalog_problem(
    name: str,
    dt: Optional[float] = None,
    horizon: Optional[float] = None,
    rho: Optional[float] = None,
    c_tilde: Optional[float] = None,
    mode: SolveMode = SolveMode.DIRECT,
    **solver_options,
) -> InclusionProblem:
    """
    Собирает эталонную задачу на [0, horizon].

    ρ по умолчанию max(1, ρ₀), c̃ по умолчанию min(1, c₁)/2.
    """
    entry = CATALOG.get(name)
    if entry is None:
        raise ConfigError(f"unknown catalog problem {name!r}, expected one of {', '.join(CATALOG)}")
    grid = TimeGrid.from_horizon(0.0, dt or entry.dt, horizon or entry.horizon)
    if name == "thermoplasticity_m2":
        return build_thermoplasticity(
            SlabGrid(m=2, dx=0.5), grid, load=GALLERY_LOAD, rho=rho, c_tilde=c_tilde, mode=mode, **solver_options
        )
    if name == "viscoplasticity_m2":
        return build_viscoplasticity(
            SlabGrid(m=2, dx=0.5), grid, load=GALLERY_LOAD, rho=rho, c_tilde=c_tilde, mode=mode, **solver_options
        )
    family = entry.family()
    if c_tilde is None:
        c_tilde = 0.5 * min(1.0, family.c1)
    if rho is None:
        rho = max(1.0, rho_zero(family, c_tilde))
    logger.debug(f"🔧 Catalog problem {name}: n={grid.n}, rho={rho}")
    return InclusionProblem(
        family=family,
        relation=entry.relation(),
        forcing=WeightedSignal.from_function(grid, entry.forcing, rho),
        rho=rho,
        c_tilde=c_tilde,
        mode=mode,
        name=name,
        **solver_options,
    )


def exact_solution(name: str, times: np.ndarray) -> Optional[np.ndarray]:
    entry = CATALOG.get(name)
    if entry is None or entry.exact is None:
        return None
    return entry.exact(np.asarray(times, dtype=float))
