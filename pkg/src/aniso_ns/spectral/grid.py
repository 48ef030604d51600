"""
Периодическая сетка трёхмерного тора с раздельным горизонтальным и вертикальным
разрешением.
"""

import math
from typing import Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

TWO_PI = 2.0 * math.pi


class GridError(ValueError):
    """Ошибка описания сетки."""


def _is_fft_friendly(n: int) -> bool:
    for prime in (2, 3, 5):
        while n % prime == 0:
            n //= prime
    return n == 1


class Grid(BaseModel):
    """
    Равномерная сетка тора [0, L_h)² x [0, L_v).

    Массивы коэффициентов имеют форму (n_h, n_h, n_v) в порядке FFT.
    Физическая частота по оси i равна 2πk/L_i.
    """

    model_config = ConfigDict(frozen=True)

    n_h: int = Field(..., ge=8, description="Число точек по каждой горизонтальной оси")
    n_v: int = Field(..., ge=8, description="Число точек по вертикальной оси")
    period_h: float = Field(default=TWO_PI, gt=0, description="Горизонтальный период")
    period_v: float = Field(default=TWO_PI, gt=0, description="Вертикальный период")
    dealias_fraction: float = Field(default=2.0 / 3.0, gt=0, le=1)

    @field_validator("n_h", "n_v")
    @classmethod
    def validate_size(cls, v: int) -> int:
        if v % 2 != 0 or not _is_fft_friendly(v):
            raise ValueError(
                "Размер сетки должен быть чётным и раскладываться на множители 2, 3, 5"
            )
        return v

    @property
    def shape(self) -> Tuple[int, int, int]:
        return (self.n_h, self.n_h, self.n_v)

    @property
    def spacing_h(self) -> float:
        return self.period_h / self.n_h

    @property
    def spacing_v(self) -> float:
        return self.period_v / self.n_v

    @property
    def volume(self) -> float:
        return self.period_h * self.period_h * self.period_v

    @property
    def base_h(self) -> float:
        """Наименьшая ненулевая горизонтальная частота."""
        return TWO_PI / self.period_h

    @property
    def base_v(self) -> float:
        """Наименьшая ненулевая вертикальная частота."""
        return TWO_PI / self.period_v

    def coordinates(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Физические координаты узлов с формой для broadcasting."""
        x1 = np.arange(self.n_h) * self.spacing_h
        x3 = np.arange(self.n_v) * self.spacing_v
        return x1[:, None, None], x1[None, :, None], x3[None, None, :]

    def rescaled(self, factor: float) -> "Grid":
        """Сетка с периодами, уменьшенными в factor раз (те же индексы частот)."""
        if factor <= 0:
            raise GridError(f"Масштаб должен быть положительным: {factor}")
        return self.model_copy(
            update={
                "period_h": self.period_h / factor,
                "period_v": self.period_v / factor,
            }
        )

    def with_vertical_period(self, period_v: float) -> "Grid":
        """Сетка с другим вертикальным периодом."""
        return Grid(
            n_h=self.n_h,
            n_v=self.n_v,
            period_h=self.period_h,
            period_v=period_v,
            dealias_fraction=self.dealias_fraction,
        )

    def describe(self) -> str:
        return (
            f"n_h={self.n_h};n_v={self.n_v};"
            f"period_h={self.period_h!r};period_v={self.period_v!r}"
        )
