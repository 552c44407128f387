"""
Термопластичность на пластине: состояние (v, T, θ, q)
evinc/gallery/thermoplasticity.py

M₀(t) = [[M, 0, 0, 0],
         [0, C⁻¹, C⁻¹c·trace*, 0],
         [0, c·trace·C⁻¹, cτ₀⁻¹w + c²·trace·C⁻¹·trace*, 0],
         [0, 0, 0, 0]]
M₁(t) = diag(0, 0, 0, κ⁻¹c⁻¹τ₀)
A = кососимметричный блок (-Div, -Grad_c, -div, -grad_c) + 𝕀 в слоте T.
"""
import logging
from typing import Dict, Optional, Tuple

import numpy as np
from scipy import sparse

from evinc.gallery.coefficients import ThermoplasticCoefficients
from evinc.gallery.slab import SlabGrid, SpatialOperators, build_slab_operators
from evinc.gallery.system import (
    GalleryLoad,
    GallerySystem,
    default_rho,
    derive_family,
    gallery_forcing,
    require_positive,
    to_problem,
    verify_family,
)
from evinc.relations.catalog import DeviatoricSaturation
from evinc.relations.combinators import NodewiseRelation, SlotRelation
from evinc.signals.models import TimeGrid
from evinc.solver.problem import InclusionProblem, SolveMode
from evinc.utils import mandel

logger = logging.getLogger(__name__)


def thermoplastic_slots(slab: SlabGrid) -> Dict[str, Tuple[int, int]]:
    m = slab.m
    sizes = (("v", 3 * m), ("T", mandel.MANDEL_DIM * m), ("theta", m), ("q", m))
    slots, offset = {}, 0
    for name, size in sizes:
        slots[name] = (offset, offset + size)
        offset += size
    return slots


def _embed(block, rows: Tuple[int, int], cols: Tuple[int, int], dim: int) -> np.ndarray:
    matrix = np.zeros((dim, dim))
    matrix[rows[0] : rows[1], cols[0] : cols[1]] = sparse.csr_matrix(block).toarray()
    return matrix


def thermoplastic_skew(operators: SpatialOperators) -> np.ndarray:
    """K = [[0, -Div, 0, 0], [-Grad_c, 0, 0, 0], [0, 0, 0, -div], [0, 0, -grad_c, 0]]"""
    blocks = [
        [None, -operators.Div, None, None],
        [-operators.Grad_c, None, None, None],
        [None, None, None, -operators.div],
        [None, None, -operators.grad_c, None],
    ]
    return sparse.bmat(blocks, format="csr").toarray()


def thermoplastic_matrices(slab: SlabGrid, coeffs: ThermoplasticCoefficients):
    """Функции t -> M₀(t), t -> M₁(t) на плотных матрицах"""
    operators = build_slab_operators(slab)
    slots = thermoplastic_slots(slab)
    dim = slots["q"][1]
    trace_adjoint = operators.trace_op.T
    unit_v = _embed(sparse.eye(3 * slab.m), slots["v"], slots["v"], dim)
    unit_t = _embed(sparse.eye(mandel.MANDEL_DIM * slab.m), slots["T"], slots["T"], dim)
    unit_theta = _embed(sparse.eye(slab.m), slots["theta"], slots["theta"], dim)
    unit_q = _embed(sparse.eye(slab.m), slots["q"], slots["q"], dim)
    cross = _embed(trace_adjoint, slots["T"], slots["theta"], dim)
    cross = cross + cross.T
    trace_trace = _embed(operators.trace_op @ trace_adjoint, slots["theta"], slots["theta"], dim)
    c, tau0 = coeffs.coupling, coeffs.tau0

    def m0_at(t: float) -> np.ndarray:
        inverse_stiffness = 1.0 / coeffs.stiffness.value(t)
        return (
            coeffs.mass.value(t) * unit_v
            + inverse_stiffness * (unit_t + c * cross + c**2 * trace_trace)
            + (c / tau0) * coeffs.heat_capacity.value(t) * unit_theta
        )

    def m1_at(t: float) -> np.ndarray:
        return tau0 / (c * coeffs.conductivity.value(t)) * unit_q

    return m0_at, m1_at


def thermoplastic_m0(slab: SlabGrid, coeffs: ThermoplasticCoefficients, t: float = 0.0) -> np.ndarray:
    return thermoplastic_matrices(slab, coeffs)[0](t)


def assemble_thermoplasticity(
    slab: SlabGrid,
    coeffs: Optional[ThermoplasticCoefficients] = None,
    horizon: Tuple[float, float] = (0.0, 1.0),
) -> GallerySystem:
    """
    Сборка системы с заявленными константами по выборке на horizon.

    Raises:
        ConditionViolation: неположительный коэффициент или провал условий
    """
    coeffs = coeffs or ThermoplasticCoefficients()
    require_positive(
        "thermoplasticity",
        mass=coeffs.mass,
        stiffness=coeffs.stiffness,
        heat_capacity=coeffs.heat_capacity,
        conductivity=coeffs.conductivity,
    )
    operators = build_slab_operators(slab)
    slots = thermoplastic_slots(slab)
    dim = slots["q"][1]
    m0_at, m1_at = thermoplastic_matrices(slab, coeffs)
    family = derive_family("thermoplasticity", dim, m0_at, m1_at, horizon)
    conditions = verify_family(family, horizon)
    stress = np.arange(*slots["T"])
    relation = SlotRelation(
        dim,
        [(stress, NodewiseRelation(DeviatoricSaturation(coeffs.saturation), slab.m))],
        linear=thermoplastic_skew(operators),
    )
    logger.info(f"🔧 Thermoplasticity assembled: m={slab.m}, dim={dim}, kernel={family.kernel_dim}")
    return GallerySystem(
        name="thermoplasticity",
        family=family,
        relation=relation,
        skew=relation.linear,
        slots=slots,
        conditions=conditions,
        dx=slab.dx,
    )


def build_thermoplasticity(
    slab: SlabGrid,
    grid: TimeGrid,
    coeffs: Optional[ThermoplasticCoefficients] = None,
    load: Optional[GalleryLoad] = None,
    rho: Optional[float] = None,
    c_tilde: Optional[float] = None,
    mode: SolveMode = SolveMode.DIRECT,
    **solver_options,
) -> InclusionProblem:
    """Источник тепла входит в правую часть как cτ₀⁻¹g"""
    coeffs = coeffs or ThermoplasticCoefficients()
    system = assemble_thermoplasticity(slab, coeffs, (grid.t0, grid.t_end))
    rho = default_rho(system, c_tilde) if rho is None else rho
    forcing = gallery_forcing(system, grid, rho, load or GalleryLoad(), heat_scale=coeffs.coupling / coeffs.tau0)
    return to_problem(system, forcing, c_tilde=c_tilde, mode=mode, **solver_options)
