"""
Каузальный решатель эволюционных включений
"""
from evinc.solver.problem import InclusionProblem, SolveMode, SolveReport, SolveStatus
from evinc.solver.service import (
    lipschitz_bound,
    lipschitz_certificate,
    lipschitz_tolerance,
    solve,
    substitute_forcing,
    substitute_problem,
    yosida_bound,
    yosida_delta,
)
from evinc.solver.stepper import solve_step

__all__ = [
    "InclusionProblem",
    "SolveMode",
    "SolveReport",
    "SolveStatus",
    "lipschitz_bound",
    "lipschitz_certificate",
    "lipschitz_tolerance",
    "solve",
    "solve_step",
    "substitute_forcing",
    "substitute_problem",
    "yosida_bound",
    "yosida_delta",
]
