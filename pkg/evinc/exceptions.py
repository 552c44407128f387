"""
Исключения библиотеки
evinc/exceptions.py
"""
from typing import Any, Dict, Optional


class EvincError(Exception):
    """Базовое исключение"""


class ContractViolation(EvincError, ValueError):
    """Нарушено предусловие операции (формы, ρ, λ ≤ 0, c̃ вне (0, c₁))"""


class ConfigError(EvincError):
    """Некорректный файл конфигурации запуска"""


class UnsupportedRegimeError(EvincError):
    """Запрошен режим, который не реализован (антикаузальная ветка ρ ≤ 0)"""


class ResolventFailure(EvincError):
    """Резольвента отношения не смогла вычислиться"""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ParameterOutOfRange(EvincError, ValueError):
    """λ·Lip(B) ≥ 1 и подобные"""


class ConvergenceFailure(EvincError):
    """Итерация не сошлась за max_iter"""

    def __init__(
        self,
        message: str,
        last_residual: float,
        iterations: int,
        reason: str = "max_iter",
        contraction: float = float("nan"),
    ):
        super().__init__(message)
        self.last_residual = last_residual
        self.iterations = iterations
        self.reason = reason
        self.contraction = contraction


class ConditionViolation(EvincError):
    """Не выполнено одно из условий на M₀, M₁"""

    def __init__(self, message: str, condition: str, report: Any = None):
        super().__init__(message)
        self.condition = condition
        self.report = report


class InconsistentLipschitzError(EvincError):
    """‖M₀′‖ больше заявленной константы Липшица"""


class DtTooLargeError(EvincError):
    """Симметричная часть шагового оператора не доминирует запас"""

    def __init__(self, message: str, suggested_dt: float):
        super().__init__(message)
        self.suggested_dt = suggested_dt


class StepFailure(EvincError):
    """Сбой на шаге по времени"""

    def __init__(self, message: str, step: int, reason: str, residual: float = float("nan")):
        super().__init__(message)
        self.step = step
        self.reason = reason
        self.residual = residual


class OracleFailure(EvincError):
    """Ни одна ветка перебора не дала решения"""
