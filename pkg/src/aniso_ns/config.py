"""
Модуль конфигурации приложения с использованием Pydantic Settings.
Настройки процесса загружаются из переменных окружения с префиксом ANISONS_.
"""

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Настройки приложения с валидацией через Pydantic."""

    # Параллелизм
    threads: int = Field(default=1, ge=1, description="Число потоков FFT и пула развёртки")

    # Application Configuration
    log_level: str = Field(default="INFO")
    output_dir: str = Field(default="out")
    seed: int = Field(default=0, ge=0)

    # Численные допуски
    discarded_mass_tolerance: float = Field(default=1e-10, ge=0)
    truncation_tolerance: float = Field(
        default=1e-2, ge=0, description="Предельная доля нормы L² u₀ вне полосы деалиасинга"
    )
    divergence_tolerance: float = Field(default=1e-12, gt=0)
    hermitian_tolerance: float = Field(default=1e-13, gt=0)
    bernstein_slack: float = Field(default=1e-10, ge=0)
    bernstein_slope_tolerance: float = Field(
        default=0.2, gt=0, description="Допуск наклона log₂ роста горизонтальных оценок Бернштейна"
    )
    profile_drift_tolerance: float = Field(default=0.2, gt=0)

    model_config = SettingsConfigDict(
        env_prefix="ANISONS_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )


# Глобальный экземпляр настроек
settings = Settings()


def get_settings() -> Settings:
    """Получить экземпляр настроек."""
    return settings
