"""
Быстрые преобразования Фурье и таблицы волновых чисел.

Коэффициенты нормированы на объём: прямое преобразование делит на число точек,
поэтому постоянное поле 1 имеет единственный коэффициент 1.
"""

import functools
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import fft as sp_fft

from ..config import get_settings
from .grid import Grid


def fft_workers() -> int:
    """Число потоков для scipy.fft из настроек процесса."""
    return max(1, int(get_settings().threads))


def forward(values: np.ndarray, axes: Optional[Sequence[int]] = None) -> np.ndarray:
    """Физическое пространство -> коэффициенты."""
    return sp_fft.fftn(values, axes=axes, norm="forward", workers=fft_workers())


def inverse(coeffs: np.ndarray, axes: Optional[Sequence[int]] = None) -> np.ndarray:
    """Коэффициенты -> физическое пространство."""
    return sp_fft.ifftn(coeffs, axes=axes, norm="forward", workers=fft_workers())


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.ascontiguousarray(array)
    array.setflags(write=False)
    return array


def integer_frequencies(n: int) -> np.ndarray:
    """Целые частоты в порядке FFT: 0, 1, ..., n/2-1, -n/2, ..., -1."""
    return np.fft.fftfreq(n, d=1.0 / n)


def _odd_frequencies(n: int) -> np.ndarray:
    k = integer_frequencies(n)
    k[n // 2] = 0.0
    return k


@dataclass(frozen=True, eq=False)
class WavenumberTable:
    """
    Кэшируемые таблицы волновых чисел сетки.

    xi1, xi2, xi3 - физические частоты с занулённым индексом Найквиста
    (для нечётных символов); xi_h_abs, xi3_abs - истинные модули.
    """

    grid: Grid
    k1: np.ndarray
    k2: np.ndarray
    k3: np.ndarray
    xi1: np.ndarray
    xi2: np.ndarray
    xi3: np.ndarray
    xi_h_sq: np.ndarray
    xi_h_abs: np.ndarray
    xi3_abs: np.ndarray
    xi_h_odd_sq: np.ndarray
    xi_odd_sq: np.ndarray
    dealias_mask: np.ndarray
    dealias_mask_h: np.ndarray
    vertical_mean_mask: np.ndarray

    @property
    def xi(self) -> tuple:
        return (self.xi1, self.xi2, self.xi3)


@functools.lru_cache(maxsize=32)
def wavenumbers(grid: Grid) -> WavenumberTable:
    """Построить (или взять из кэша) таблицы волновых чисел для сетки."""
    kh = integer_frequencies(grid.n_h)
    kv = integer_frequencies(grid.n_v)
    oh = _odd_frequencies(grid.n_h) * grid.base_h
    ov = _odd_frequencies(grid.n_v) * grid.base_v

    k1 = kh[:, None, None]
    k2 = kh[None, :, None]
    k3 = kv[None, None, :]
    xi1 = oh[:, None, None]
    xi2 = oh[None, :, None]
    xi3 = ov[None, None, :]

    true1 = k1 * grid.base_h
    true2 = k2 * grid.base_h
    xi_h_sq = true1**2 + true2**2
    xi_h_odd_sq = xi1**2 + xi2**2

    cut_h = grid.dealias_fraction * grid.n_h / 2.0
    cut_v = grid.dealias_fraction * grid.n_v / 2.0
    mask_h = (np.abs(k1) < cut_h) & (np.abs(k2) < cut_h)
    mask = mask_h & (np.abs(k3) < cut_v)

    return WavenumberTable(
        grid=grid,
        k1=_frozen(k1),
        k2=_frozen(k2),
        k3=_frozen(k3),
        xi1=_frozen(xi1),
        xi2=_frozen(xi2),
        xi3=_frozen(xi3),
        xi_h_sq=_frozen(xi_h_sq),
        xi_h_abs=_frozen(np.sqrt(xi_h_sq)),
        xi3_abs=_frozen(np.abs(k3) * grid.base_v),
        xi_h_odd_sq=_frozen(xi_h_odd_sq),
        xi_odd_sq=_frozen(xi_h_odd_sq + xi3**2),
        dealias_mask=_frozen(mask),
        dealias_mask_h=_frozen(mask_h),
        vertical_mean_mask=_frozen(k3 == 0),
    )
