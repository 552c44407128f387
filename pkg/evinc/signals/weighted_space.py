"""
Взвешенное пространство: скалярное произведение с весом e^{-2ρt}, отсечки, CSV
evinc/signals/weighted_space.py
"""
import csv
import logging
from pathlib import Path
from typing import Union

import numpy as np

from evinc.exceptions import ContractViolation
from evinc.signals.models import CutoffSide, TimeGrid, WeightedSignal, require_compatible
from evinc.utils.constants import NODE_TIME_SLACK
from evinc.utils.helpers import format_float

logger = logging.getLogger(__name__)


def weighted_inner(u: WeightedSignal, v: WeightedSignal) -> float:
    """Σ_k ⟨u_k, v_k⟩ e^{-2ρt_k} dt"""
    require_compatible(u, v)
    node_products = np.einsum("kd,kd->k", u.values, v.values)
    return float(np.dot(node_products, u.grid.weights(u.rho)))


def weighted_norm(u: WeightedSignal) -> float:
    return float(np.sqrt(max(weighted_inner(u, u), 0.0)))


def cutoff(u: WeightedSignal, a: float, side: Union[CutoffSide, str]) -> WeightedSignal:
    """
    past: обнуляет узлы с t_k > a; future: обнуляет узлы с t_k < a.
    """
    side = CutoffSide(side)
    times = u.times
    slack = NODE_TIME_SLACK * u.grid.dt
    if side is CutoffSide.PAST:
        keep = times <= a + slack
    else:
        keep = times >= a - slack
    return u.with_values(np.where(keep[:, None], u.values, 0.0))


def write_signal_csv(u: WeightedSignal, path: Union[str, Path]) -> Path:
    """Заголовок `t,x0,...`, одна строка на узел, 17 значащих цифр"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["t"] + [f"x{i}" for i in range(u.dim)])
        for t, row in zip(u.times, u.values):
            writer.writerow([format_float(t)] + [format_float(x) for x in row])
    logger.debug(f"💾 Signal written to {path} ({u.grid.n} rows, dim {u.dim})")
    return path


def read_signal_csv(path: Union[str, Path], rho: float) -> WeightedSignal:
    """
    Обратное к write_signal_csv; сетка восстанавливается по первым узлам.

    Raises:
        OSError: файл не читается
        ContractViolation: заголовок, нечисловая ячейка, рваные строки или неравномерная сетка
    """
    path = Path(path)
    with path.open("r", encoding="utf-8") as handle:
        rows = list(csv.reader(handle))
    if len(rows) < 3 or not rows[0] or rows[0][0] != "t":
        raise ContractViolation(f"{path}: expected header 't,x0,...' and at least two rows")
    width = len(rows[0])
    body = [row for row in rows[1:] if row]
    if len(body) < 2:
        raise ContractViolation(f"{path}: expected at least two data rows")
    for line, row in enumerate(body, start=2):
        if len(row) != width:
            raise ContractViolation(f"{path}:{line}: expected {width} columns, got {len(row)}")
    try:
        data = np.array([[float(x) for x in row] for row in body], dtype=float)
    except ValueError as e:
        raise ContractViolation(f"{path}: non-numeric cell: {e}") from e
    times = data[:, 0]
    dt = float(times[1] - times[0])
    grid = TimeGrid(t0=float(times[0]), dt=dt, n=len(times))
    if not np.allclose(grid.times, times, rtol=0.0, atol=1e-9 * max(1.0, abs(grid.t_end))):
        raise ContractViolation(f"{path}: time column is not a uniform grid")
    return WeightedSignal(grid=grid, values=data[:, 1:], rho=rho)
