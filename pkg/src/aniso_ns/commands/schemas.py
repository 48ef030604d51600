"""
Pydantic модели конфигурации экспериментов.

Файл эксперимента - JSON, проверяемый моделью ExperimentConfig; схема
поставляется в schemas/experiment_config.schema.json и печатается командой
`aniso-ns --print-schema`.
"""

import os
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from ..config import settings
from ..services.decomposition_service import DecompositionConstants
from ..services.initial_data_service import DataFamily, DataFamilySpec, SmallnessConstants
from ..services.solver_service import SolverConfig
from ..services.verifier_service import VerifierConfig
from ..spectral.grid import Grid

Command = Literal["analyze", "simulate", "decompose", "verify", "smallness", "sweep"]


class ConstantsConfig(BaseModel):
    """Константы условий малости и весов мониторинга."""

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    L: float = Field(default=1.0, ge=0, description="L в показателе экспоненты условий малости")
    M: float = Field(default=1.0, ge=0, description="M в двойной экспоненте условия малости")
    N: int = Field(default=4, ge=2, description="Частотная срезка ū₀,N")
    C: float = Field(default=1.0, ge=0, description="C в 𝔄_N")
    eps0: float = Field(default=0.1, gt=0, description="Порог ε₀ условий малости")
    lam: float = Field(default=1.0, gt=0, description="λ при весе f(t)")
    kappa: float = Field(default=1.0, gt=0, description="κ при весе f^h(t)")
    gamma: float = Field(default=1.0, gt=0, description="γ при весе g^h(t)")
    mu: float = Field(default=1.0, gt=0, description="μ при весе ħ(t)")
    C_threshold: float = Field(default=1.0, gt=0, description="C в пороге бутстрепа 1/(16C)")
    split_ubar: bool = Field(default=True, description="Интегрировать ū₁ для веса f^h")

    def smallness(self) -> SmallnessConstants:
        return SmallnessConstants(L=self.L, M=self.M, N=self.N, C=self.C, eps0=self.eps0)

    def decomposition(self) -> DecompositionConstants:
        return DecompositionConstants(
            C_threshold=self.C_threshold,
            lam=self.lam,
            kappa=self.kappa,
            gamma=self.gamma,
            mu=self.mu,
            N=self.N,
            split_ubar=self.split_ubar,
        )


class SweepSpec(BaseModel):
    """Развёртка по ε или δ."""

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    parameter: Literal["epsilon", "delta"] = "epsilon"
    values: List[float] = Field(
        default_factory=lambda: [0.25, 0.125, 0.0625], min_length=2, description="Значения параметра"
    )

    @field_validator("values")
    @classmethod
    def validate_values(cls, v: List[float]) -> List[float]:
        if any(x <= 0 for x in v):
            raise ValueError("Значения развёртки должны быть положительными")
        if len(set(v)) != len(v):
            raise ValueError("Значения развёртки должны быть различными")
        return v


class ExperimentConfig(BaseModel):
    """Конфигурация одного запуска."""

    model_config = ConfigDict(frozen=True, extra="forbid", allow_inf_nan=False)

    command: Command
    grid: Grid = Field(
        default_factory=lambda: Grid(n_h=32, n_v=32), description="Сетка (периоды по умолчанию 2π)"
    )
    solver: SolverConfig = Field(default_factory=SolverConfig)
    data: DataFamilySpec = Field(default_factory=DataFamilySpec)
    constants: ConstantsConfig = Field(default_factory=ConstantsConfig)
    sweep: SweepSpec = Field(default_factory=SweepSpec)
    verify: VerifierConfig = Field(default_factory=VerifierConfig)
    output_dir: str = Field(default_factory=lambda: settings.output_dir)
    seed: int = Field(default=0, ge=0, description="Базовое зерно (данные и проверки)")
    write_checkpoints: bool = Field(default=True, description="Сохранять поле в моменты мониторинга (simulate)")

    @field_validator("data")
    @classmethod
    def check_inputs_exist(cls, v: DataFamilySpec) -> DataFamilySpec:
        if v.family is DataFamily.CUSTOM_FILE:
            missing = [p for p in v.input_paths or [] if not Path(p).is_file()]
            if missing:
                raise ValueError(f"Входные файлы не найдены: {', '.join(missing)}")
        return v

    def with_overrides(self, seed: Optional[int] = None, output_dir: Optional[str] = None) -> "ExperimentConfig":
        """Применить флаги командной строки и распространить зерно на данные и проверки."""
        seed = self.seed if seed is None else seed
        return self.model_copy(
            update={
                "seed": seed,
                "output_dir": output_dir or self.output_dir,
                "data": self.data.model_copy(update={"seed": seed}),
                "verify": self.verify.model_copy(update={"seed": seed}),
            }
        )

    def input_files(self) -> List[str]:
        return list(self.data.input_paths or []) if self.data.family is DataFamily.CUSTOM_FILE else []


class ConfigError(ValueError):
    """Ошибка конфигурации с путями JSON-pointer."""

    def __init__(self, errors: List[str]):
        self.errors = errors
        super().__init__("; ".join(errors))


def json_pointer(loc: tuple) -> str:
    """Путь ошибки pydantic в нотации JSON-pointer (/solver/dt)."""
    parts = [str(part).replace("~", "~0").replace("/", "~1") for part in loc]
    return "/" + "/".join(parts)


def format_validation_error(exc: ValidationError) -> List[str]:
    return [f"{json_pointer(e['loc'])}: {e['msg']}" for e in exc.errors()]


def parse_config(payload: Dict[str, Any]) -> ExperimentConfig:
    """
    Проверить словарь конфигурации.

    Raises:
        ConfigError: Сообщения с путями JSON-pointer
    """
    try:
        return ExperimentConfig.model_validate(payload)
    except ValidationError as exc:
        raise ConfigError(format_validation_error(exc)) from exc


def check_output_dir(path: str) -> Path:
    """
    Создать каталог вывода и проверить право записи.

    Raises:
        ConfigError: Каталог недоступен для записи
    """
    directory = Path(path)
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError([f"/output_dir: не удалось создать каталог: {exc}"]) from exc
    if not os.access(directory, os.W_OK):
        raise ConfigError([f"/output_dir: каталог недоступен для записи: {directory}"])
    return directory
