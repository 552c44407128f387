"""
Симметричные 3×3 тензоры в нотации Манделя: (11, 22, 33, √2·23, √2·13, √2·12).
Евклидово произведение в ℝ⁶ совпадает с T:S.
"""
import numpy as np

MANDEL_DIM = 6
SQRT2 = np.sqrt(2.0)

# trace* 1 = I₃
IDENTITY = np.array([1.0, 1.0, 1.0, 0.0, 0.0, 0.0])

_PAIRS = ((0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1))


def trace(x: np.ndarray) -> np.ndarray:
    """След по последней оси"""
    return x[..., 0] + x[..., 1] + x[..., 2]


def deviator(x: np.ndarray) -> np.ndarray:
    """dev T = T - tr(T)/3·I"""
    return x - (trace(x) / 3.0)[..., None] * IDENTITY


def to_matrix(x: np.ndarray) -> np.ndarray:
    matrix = np.empty((3, 3))
    for k, (i, j) in enumerate(_PAIRS):
        value = x[k] if i == j else x[k] / SQRT2
        matrix[i, j] = matrix[j, i] = value
    return matrix


def from_matrix(matrix: np.ndarray) -> np.ndarray:
    sym = 0.5 * (matrix + matrix.T)
    return np.array([sym[i, j] if i == j else SQRT2 * sym[i, j] for i, j in _PAIRS])


def deviatoric_basis() -> np.ndarray:
    """Ортонормированный базис следонулевых тензоров, 6×5"""
    basis = np.zeros((MANDEL_DIM, 5))
    basis[:3, 0] = np.array([1.0, -1.0, 0.0]) / SQRT2
    basis[:3, 1] = np.array([1.0, 1.0, -2.0]) / np.sqrt(6.0)
    basis[3, 2] = basis[4, 3] = basis[5, 4] = 1.0
    return basis
