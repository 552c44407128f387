"""
Дискретное взвешенное пространство и каузальное исчисление по времени
"""
from evinc.signals.models import TimeGrid, WeightedSignal, CutoffSide
from evinc.signals.weighted_space import (
    weighted_inner,
    weighted_norm,
    cutoff,
    write_signal_csv,
    read_signal_csv,
)
from evinc.signals.time_calculus import (
    derivative,
    integrate,
    translate,
    difference_quotient,
    adjoint_defect,
)

__all__ = [
    "TimeGrid",
    "WeightedSignal",
    "CutoffSide",
    "weighted_inner",
    "weighted_norm",
    "cutoff",
    "write_signal_csv",
    "read_signal_csv",
    "derivative",
    "integrate",
    "translate",
    "difference_quotient",
    "adjoint_defect",
]
