"""
Анизотропный анализ Литтлвуда-Пэли: срезки, лестница оболочек, блоки,
разбиение lh/hh и вертикальное разложение Бони.
"""

from .blocks import S_h, S_v, bony_v, delta_h, delta_v, split_lh_hh, vertical_mean
from .cutoffs import (
    DEFAULT_CUTOFFS,
    CutoffPair,
    CutoffProfile,
    CutoffProfileError,
    build_cutoffs,
)
from .ladder import DyadicLadder, ShellOutOfRangeError, build_ladder

__all__ = [
    "DEFAULT_CUTOFFS",
    "CutoffPair",
    "CutoffProfile",
    "CutoffProfileError",
    "DyadicLadder",
    "S_h",
    "S_v",
    "ShellOutOfRangeError",
    "bony_v",
    "build_cutoffs",
    "build_ladder",
    "delta_h",
    "delta_v",
    "split_lh_hh",
    "vertical_mean",
]
