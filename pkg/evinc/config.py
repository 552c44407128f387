"""
Конфигурация процесса (допуски, логирование, расписание λ)
evinc/config.py
"""
from typing import List

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_FILE: str = ""  # пусто = без FileHandler
    LOG_FORMAT: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    # Forward-backward stepper
    FP_TOL: float = 1e-10
    FP_MAX_ITER: int = 10_000

    # Picard iteration for A + B
    PICARD_TOL: float = 1e-12
    PICARD_MAX_ITER: int = 10_000

    # Material checks
    KERNEL_TOL: float = 1e-9
    SYMMETRY_TOL: float = 1e-10
    INCLUSION_RESIDUAL_TOL: float = 1e-8

    # Yosida path
    LAMBDA_START: float = 1.0
    LAMBDA_STOP: float = 1e-6
    LAMBDA_FACTOR: float = 0.5

    # Output
    CSV_DIGITS: int = 17

    # Property campaigns
    DEFAULT_SEED: int = 20240601
    CAMPAIGN_WORKERS: int = 1

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        env_prefix="EVINC_",
        extra="ignore",
    )

    @property
    def lambda_schedule(self) -> List[float]:
        """Геометрическое расписание λ от LAMBDA_START до LAMBDA_STOP"""
        return build_lambda_schedule(self.LAMBDA_START, self.LAMBDA_STOP, self.LAMBDA_FACTOR)


def build_lambda_schedule(start: float, stop: float, factor: float) -> List[float]:
    """Убывающая геометрическая последовательность, последний элемент = stop"""
    if not (start > 0 and stop > 0 and 0 < factor < 1):
        raise ValueError(f"invalid lambda schedule: start={start}, stop={stop}, factor={factor}")
    schedule = []
    lam = start
    while lam > stop * (1 + 1e-12):
        schedule.append(lam)
        lam *= factor
    schedule.append(stop)
    return schedule


settings = Settings()


def get_lambda_schedule() -> List[float]:
    """Расписание λ по умолчанию"""
    return settings.lambda_schedule


def get_log_level() -> str:
    """Уровень логирования для точки входа"""
    return settings.LOG_LEVEL.upper()
