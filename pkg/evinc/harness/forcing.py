"""
Случайные правые части для кампаний
evinc/harness/forcing.py
"""
from typing import Tuple

import numpy as np

from evinc.exceptions import ContractViolation
from evinc.signals.models import TimeGrid, WeightedSignal
from evinc.signals.weighted_space import weighted_norm


def random_forcing(grid: TimeGrid, dim: int, rho: float, rng: np.random.Generator) -> WeightedSignal:
    """Кусочно-постоянный сигнал: нормальные значения в узлах, ‖f‖_ρ = 1"""
    signal = WeightedSignal(grid=grid, values=rng.standard_normal((grid.n, dim)), rho=rho)
    norm = weighted_norm(signal)
    return signal.scaled(1.0 / norm) if norm > 0 else signal


def prefix_pair(
    grid: TimeGrid, dim: int, rho: float, rng: np.random.Generator
) -> Tuple[WeightedSignal, WeightedSignal, int]:
    """
    Два сигнала, совпадающие в узлах 0..cut и независимые после.

    Returns:
        (f, g, cut)
    """
    if grid.n < 3:
        raise ContractViolation("prefix pair needs at least 3 nodes")
    cut = int(rng.integers(0, grid.n - 1))
    f = random_forcing(grid, dim, rho, rng)
    tail = random_forcing(grid, dim, rho, rng)
    values = f.values.copy()
    values[cut + 1 :] = tail.values[cut + 1 :]
    return f, f.with_values(values), cut

