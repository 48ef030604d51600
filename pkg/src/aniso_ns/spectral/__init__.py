"""
Спектральное ядро: сетки тора, спектральные поля, производные, проектор Лерэ,
горизонтальная тепловая полугруппа и горизонтальные мультипликаторы.
"""

from .fields import Field, FieldError, VecField, random_band_limited
from .grid import Grid, GridError
from .operators import (
    HorizontalSymbol,
    MultiplierResult,
    divergence,
    horizontal_heat,
    horizontal_multiplier,
    leray_project,
    product,
    spectral_derivative,
)

__all__ = [
    "Field",
    "FieldError",
    "Grid",
    "GridError",
    "HorizontalSymbol",
    "MultiplierResult",
    "VecField",
    "divergence",
    "horizontal_heat",
    "horizontal_multiplier",
    "leray_project",
    "product",
    "random_band_limited",
    "spectral_derivative",
]
