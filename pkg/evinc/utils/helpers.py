"""
Вспомогательные функции
"""
from typing import Any, Callable, Mapping, Optional

import numpy as np

from evinc.config import settings


def format_float(value: float, digits: Optional[int] = None) -> str:
    """Число с фиксированным количеством значащих цифр (по умолчанию 17)"""
    digits = digits or settings.CSV_DIGITS
    return f"{float(value):.{digits}g}"


def format_value(value: Any) -> str:
    """Значение для key-value блока отчёта"""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    if isinstance(value, (list, tuple)):
        return ",".join(format_value(v) for v in value)
    if hasattr(value, "value"):  # str Enum
        return str(value.value)
    return str(value)


def format_key_values(pairs: Mapping[str, Any]) -> str:
    """Плоский блок `key = value`, по строке на ключ, порядок сохраняется"""
    return "".join(f"{key} = {format_value(value)}\n" for key, value in pairs.items())


def sym_part(matrix: np.ndarray) -> np.ndarray:
    return 0.5 * (matrix + matrix.T)


def min_sym_eig(matrix: np.ndarray) -> float:
    """Наименьшее собственное значение симметричной части"""
    if matrix.size == 0:
        return float("inf")
    return float(np.linalg.eigvalsh(sym_part(matrix))[0])


def spectral_norm(matrix: np.ndarray) -> float:
    if matrix.size == 0:
        return 0.0
    return float(np.linalg.norm(matrix, 2))


def estimate_operator_norm(
    apply: Callable[[np.ndarray], np.ndarray],
    apply_transpose: Callable[[np.ndarray], np.ndarray],
    shape: tuple,
    iterations: int = 300,
    seed: int = 0,
) -> float:
    """
    Степенной метод для ‖B‖₂ без сборки матрицы.

    Args:
        apply: x -> Bx
        apply_transpose: y -> Bᵀy
        shape: форма входного вектора
    Returns:
        оценка снизу для наибольшего сингулярного числа
    """
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(shape)
    x /= np.linalg.norm(x)
    estimate = 0.0
    for _ in range(iterations):
        y = apply(x)
        estimate = float(np.linalg.norm(y))
        if estimate == 0.0:
            return 0.0
        x = apply_transpose(y)
        norm_x = np.linalg.norm(x)
        if norm_x == 0.0:
            return estimate
        x /= norm_x
    return estimate
