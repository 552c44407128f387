"""
Вязкопластичность с внутренними переменными: состояние (v, w, T)
evinc/gallery/viscoplasticity.py

M₀(t) = [[M, 0, 0], [0, L⁻¹, -L⁻¹B*], [0, -BL⁻¹, D⁻¹ + BL⁻¹B*]], M₁ = 0,
A = [[0, 0, -Div], [0, g, 0], [-Grad_c, 0, 0]].
Ядро M₀ пустое; M₀ положительно определена тогда и только тогда, когда diag(L⁻¹, D⁻¹).
"""
import logging
from typing import Dict, Optional, Tuple

import numpy as np
from scipy import sparse

from evinc.exceptions import ContractViolation
from evinc.gallery.coefficients import ViscoplasticCoefficients
from evinc.gallery.slab import SlabGrid, build_slab_operators
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
from evinc.relations.base import MonotoneRelation
from evinc.relations.catalog import BallSaturation, SoftThreshold
from evinc.relations.combinators import NodewiseRelation, SlotRelation
from evinc.signals.models import TimeGrid
from evinc.solver.problem import InclusionProblem, SolveMode
from evinc.utils import mandel

logger = logging.getLogger(__name__)

INTERNAL_RELATIONS = ("soft_threshold", "ball_saturation")


def internal_basis() -> np.ndarray:
    """Пять следонулевых направлений и гидростатическое I/√3, 6×6 ортонормированно"""
    return np.hstack([mandel.deviatoric_basis(), (mandel.IDENTITY / np.sqrt(3.0))[:, None]])


def coupling_matrix(coeffs: ViscoplasticCoefficients) -> np.ndarray:
    """B: ℝᴺ -> Sym(3) в нотации Манделя, 6×N"""
    if coeffs.b_matrix is not None:
        matrix = np.asarray(coeffs.b_matrix, dtype=float)
        if matrix.shape != (mandel.MANDEL_DIM, coeffs.internal_dim):
            raise ContractViolation(
                f"b_matrix must be {mandel.MANDEL_DIM}x{coeffs.internal_dim}, got {matrix.shape}"
            )
        return matrix
    return coeffs.coupling * internal_basis()[:, : coeffs.internal_dim]


def viscoplastic_slots(slab: SlabGrid, internal_dim: int) -> Dict[str, Tuple[int, int]]:
    m = slab.m
    v_end = 3 * m
    w_end = v_end + internal_dim * m
    return {"v": (0, v_end), "w": (v_end, w_end), "T": (w_end, w_end + mandel.MANDEL_DIM * m)}


def viscoplastic_matrices(slab: SlabGrid, coeffs: ViscoplasticCoefficients):
    slots = viscoplastic_slots(slab, coeffs.internal_dim)
    dim = slots["T"][1]
    v, w, stress = (slice(*slots[name]) for name in ("v", "w", "T"))
    coupling = sparse.kron(sparse.eye(slab.m), sparse.csr_matrix(coupling_matrix(coeffs))).toarray()
    unit_v = np.zeros((dim, dim))
    unit_v[v, v] = np.eye(3 * slab.m)
    unit_d = np.zeros((dim, dim))
    unit_d[stress, stress] = np.eye(mandel.MANDEL_DIM * slab.m)
    internal = np.zeros((dim, dim))
    internal[w, w] = np.eye(coeffs.internal_dim * slab.m)
    internal[w, stress] = -coupling.T
    internal[stress, w] = -coupling
    internal[stress, stress] = coupling @ coupling.T

    def m0_at(t: float) -> np.ndarray:
        return (
            coeffs.mass.value(t) * unit_v
            + unit_d / coeffs.compliance.value(t)
            + internal / coeffs.internal.value(t)
        )

    def m1_at(t: float) -> np.ndarray:
        return np.zeros((dim, dim))

    return m0_at, m1_at


def viscoplastic_m0(slab: SlabGrid, coeffs: ViscoplasticCoefficients, t: float = 0.0) -> np.ndarray:
    """Сборка без проверки положительности коэффициентов"""
    return viscoplastic_matrices(slab, coeffs)[0](t)


def internal_relation(coeffs: ViscoplasticCoefficients) -> MonotoneRelation:
    """g на ℝᴺ: ∂(r‖·‖₂) или насыщение на шаре радиуса r"""
    if coeffs.relation == "soft_threshold":
        return SoftThreshold(coeffs.internal_dim, weight=coeffs.relation_weight, norm="l2")
    if coeffs.relation == "ball_saturation":
        return BallSaturation(coeffs.internal_dim, radius=coeffs.relation_weight)
    raise ContractViolation(f"unknown internal relation {coeffs.relation!r}, expected one of {INTERNAL_RELATIONS}")


def assemble_viscoplasticity(
    slab: SlabGrid,
    coeffs: Optional[ViscoplasticCoefficients] = None,
    horizon: Tuple[float, float] = (0.0, 1.0),
) -> GallerySystem:
    """
    Raises:
        ConditionViolation: M, D или L не равномерно положительны (condition="positivity")
    """
    coeffs = coeffs or ViscoplasticCoefficients()
    require_positive("viscoplasticity", mass=coeffs.mass, compliance=coeffs.compliance, internal=coeffs.internal)
    operators = build_slab_operators(slab)
    slots = viscoplastic_slots(slab, coeffs.internal_dim)
    dim = slots["T"][1]
    m0_at, m1_at = viscoplastic_matrices(slab, coeffs)
    family = derive_family("viscoplasticity", dim, m0_at, m1_at, horizon)
    conditions = verify_family(family, horizon)

    skew = np.zeros((dim, dim))
    v, stress = slice(*slots["v"]), slice(*slots["T"])
    skew[v, stress] = (-operators.Div).toarray()
    skew[stress, v] = (-operators.Grad_c).toarray()
    relation = SlotRelation(
        dim,
        [(np.arange(*slots["w"]), NodewiseRelation(internal_relation(coeffs), slab.m))],
        linear=skew,
    )
    logger.info(f"🔧 Viscoplasticity assembled: m={slab.m}, N={coeffs.internal_dim}, dim={dim}")
    return GallerySystem(
        name="viscoplasticity",
        family=family,
        relation=relation,
        skew=skew,
        slots=slots,
        conditions=conditions,
        dx=slab.dx,
    )


def build_viscoplasticity(
    slab: SlabGrid,
    grid: TimeGrid,
    coeffs: Optional[ViscoplasticCoefficients] = None,
    load: Optional[GalleryLoad] = None,
    rho: Optional[float] = None,
    c_tilde: Optional[float] = None,
    mode: SolveMode = SolveMode.DIRECT,
    **solver_options,
) -> InclusionProblem:
    system = assemble_viscoplasticity(slab, coeffs, (grid.t0, grid.t_end))
    rho = default_rho(system, c_tilde) if rho is None else rho
    return to_problem(system, gallery_forcing(system, grid, rho, load or GalleryLoad()), c_tilde=c_tilde, mode=mode, **solver_options)
