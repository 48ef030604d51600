"""
Общие фикстуры тестов.
"""

import numpy as np
import pytest

from aniso_ns.spectral.fields import Field, VecField, random_band_limited
from aniso_ns.spectral.grid import Grid
from aniso_ns.spectral.operators import leray_project


@pytest.fixture
def grid16() -> Grid:
    return Grid(n_h=16, n_v=16)


@pytest.fixture
def grid32() -> Grid:
    return Grid(n_h=32, n_v=32)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


def random_field(grid: Grid, seed: int, band_h: int = 4, band_v: int = 4, zero_mean: bool = True) -> Field:
    return random_band_limited(grid, np.random.default_rng(seed), band_h, band_v, zero_mean=zero_mean)


def random_solenoidal(grid: Grid, seed: int, band: int = 3, amplitude: float = 0.5) -> VecField:
    """Случайное бездивергентное поле в полосе деалиасинга."""
    rng = np.random.default_rng(seed)
    components = tuple(
        random_band_limited(grid, rng, band, band, amplitude=amplitude, zero_mean=True) for _ in range(3)
    )
    return leray_project(VecField(components))


def taylor_green_2d(grid: Grid, amplitude: float = 1.0) -> VecField:
    """(A cos x₁ sin x₂, -A sin x₁ cos x₂, 0), не зависит от x₃."""
    x1, x2, _ = grid.coordinates()
    u1 = amplitude * np.cos(x1) * np.sin(x2)
    u2 = -amplitude * np.sin(x1) * np.cos(x2)
    zero = Field.zeros(grid)
    return VecField((Field.from_physical(grid, u1), Field.from_physical(grid, u2), zero), True)
