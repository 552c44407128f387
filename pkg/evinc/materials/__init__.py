"""
Семейства M₀(t), M₁(t) и проверка условий на них
"""
from evinc.materials.family import (
    MaterialFamily,
    StepOperator,
    constant_family,
    dt_max,
    kernel_decompose,
    m0_prime,
    rho_zero,
    sinusoidal_family,
    step_operator,
    substitute_family,
)
from evinc.materials.conditions import ConditionsReport, MonotonicityMeasurement, check_conditions, monotonicity_bound

__all__ = [
    "MaterialFamily",
    "StepOperator",
    "constant_family",
    "dt_max",
    "kernel_decompose",
    "m0_prime",
    "rho_zero",
    "sinusoidal_family",
    "step_operator",
    "substitute_family",
    "ConditionsReport",
    "MonotonicityMeasurement",
    "check_conditions",
    "monotonicity_bound",
]
