"""
Диадическая лестница сетки: допустимые горизонтальные оболочки k и
вертикальные оболочки ℓ с кэшированием значений срезок на сетке.
"""

import functools
import math
import threading
from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from ..spectral.grid import Grid
from ..spectral.transforms import wavenumbers
from .cutoffs import DEFAULT_CUTOFFS, CutoffPair


class ShellOutOfRangeError(ValueError):
    """Оболочка вне лестницы сетки."""

    def __init__(self, direction: str, shell: int, shells: range):
        self.direction = direction
        self.shell = shell
        self.shells = shells
        super().__init__(
            f"{direction}-оболочка {shell} вне лестницы [{shells.start}, {shells.stop - 1}]"
        )


def _retained_shells(magnitudes: np.ndarray, cutoffs: CutoffPair) -> Tuple[int, int]:
    nonzero = magnitudes[magnitudes > 0.0]
    start, end = cutoffs.phi_support
    low = math.floor(math.log2(nonzero.min() / end)) - 2
    high = math.ceil(math.log2(nonzero.max() / start)) + 2
    kept = [j for j in range(low, high + 1) if np.any(cutoffs.phi(np.ldexp(nonzero, -j)) > 0.0)]
    return kept[0], kept[-1]


@dataclass(frozen=True)
class DyadicLadder:
    """Конечная лестница оболочек, покрывающая все ненулевые частоты сетки."""

    grid: Grid
    cutoffs: CutoffPair
    k_min: int
    k_max: int
    l_min: int
    l_max: int
    _cache: Dict[Tuple[str, int], np.ndarray] = field(
        default_factory=dict, compare=False, hash=False, repr=False
    )
    _lock: threading.Lock = field(
        default_factory=threading.Lock, compare=False, hash=False, repr=False
    )

    @property
    def horizontal_shells(self) -> range:
        return range(self.k_min, self.k_max + 1)

    @property
    def vertical_shells(self) -> range:
        return range(self.l_min, self.l_max + 1)

    def check_horizontal(self, k: int) -> None:
        if k not in self.horizontal_shells:
            raise ShellOutOfRangeError("горизонтальная", k, self.horizontal_shells)

    def check_vertical(self, l: int) -> None:
        if l not in self.vertical_shells:
            raise ShellOutOfRangeError("вертикальная", l, self.vertical_shells)

    def _cached(self, key: Tuple[str, int]) -> np.ndarray:
        with self._lock:
            cached = self._cache.get(key)
        if cached is not None:
            return cached
        kind, j = key
        table = wavenumbers(self.grid)
        if kind in ("phi_h", "chi_h"):
            magnitude = np.ldexp(table.xi_h_abs, -j)
        else:
            magnitude = np.ldexp(table.xi3_abs, -j)
        values = self.cutoffs.phi(magnitude) if kind.startswith("phi") else self.cutoffs.chi(magnitude)
        values = np.ascontiguousarray(values)
        values.setflags(write=False)
        with self._lock:
            self._cache[key] = values
        return values

    def phi_h(self, k: int) -> np.ndarray:
        """φ(2^{-k}|ξ_h|), форма (n_h, n_h, 1)."""
        return self._cached(("phi_h", k))

    def chi_h(self, k: int) -> np.ndarray:
        return self._cached(("chi_h", k))

    def phi_v(self, l: int) -> np.ndarray:
        """φ(2^{-ℓ}|ξ3|), форма (1, 1, n_v); на ξ3 = 0 равна нулю."""
        return self._cached(("phi_v", l))

    def chi_v(self, l: int) -> np.ndarray:
        return self._cached(("chi_v", l))

    def vertical_columns(self, l: int) -> np.ndarray:
        """Индексы ξ3, на которых φ(2^{-ℓ}|ξ3|) не равна нулю."""
        return np.nonzero(self.phi_v(l)[0, 0, :] > 0.0)[0]


@functools.lru_cache(maxsize=32)
def build_ladder(grid: Grid, cutoffs: Optional[CutoffPair] = None) -> DyadicLadder:
    """
    Построить лестницу оболочек для сетки.

    Оставляются оболочки, носитель которых пересекает множество ненулевых
    дискретных модулей частот; плоскость ξ3 = 0 в вертикальные блоки не входит.
    """
    cutoffs = cutoffs or DEFAULT_CUTOFFS
    table = wavenumbers(grid)
    k_min, k_max = _retained_shells(np.unique(table.xi_h_abs), cutoffs)
    l_min, l_max = _retained_shells(np.unique(table.xi3_abs), cutoffs)
    return DyadicLadder(grid, cutoffs, k_min, k_max, l_min, l_max)
