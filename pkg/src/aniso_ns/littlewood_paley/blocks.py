"""
Анизотропные блоки Литтлвуда-Пэли, разбиение a = a_lh + a_hh и вертикальное
разложение Бони ab = T + R.
"""

from typing import Optional, Tuple

import numpy as np

from ..spectral.fields import Field, FieldError
from ..spectral.operators import product
from ..spectral.transforms import wavenumbers
from .ladder import DyadicLadder, build_ladder


def _ladder(a: Field, ladder: Optional[DyadicLadder]) -> DyadicLadder:
    if ladder is None:
        return build_ladder(a.grid)
    if ladder.grid != a.grid:
        raise FieldError("Лестница построена для другой сетки")
    return ladder


def delta_h(k: int, a: Field, ladder: Optional[DyadicLadder] = None) -> Field:
    """Δ_k^h a: умножение на φ(2^{-k}|ξ_h|)."""
    ladder = _ladder(a, ladder)
    ladder.check_horizontal(k)
    return a.with_coeffs(ladder.phi_h(k) * a.coeffs)


def delta_v(l: int, a: Field, ladder: Optional[DyadicLadder] = None) -> Field:
    """Δ_ℓ^v a: умножение на φ(2^{-ℓ}|ξ3|)."""
    ladder = _ladder(a, ladder)
    ladder.check_vertical(l)
    return a.with_coeffs(ladder.phi_v(l) * a.coeffs)


def S_h(k: int, a: Field, ladder: Optional[DyadicLadder] = None) -> Field:
    """S_k^h a: умножение на χ(2^{-k}|ξ_h|); допускается любое целое k."""
    ladder = _ladder(a, ladder)
    return a.with_coeffs(ladder.chi_h(k) * a.coeffs)


def S_v(l: int, a: Field, ladder: Optional[DyadicLadder] = None) -> Field:
    """S_ℓ^v a: умножение на χ(2^{-ℓ}|ξ3|); допускается любое целое ℓ."""
    ladder = _ladder(a, ladder)
    return a.with_coeffs(ladder.chi_v(l) * a.coeffs)


def vertical_mean(a: Field) -> Field:
    """Канал вертикального среднего: моды ξ3 = 0."""
    return a.with_coeffs(wavenumbers(a.grid).vertical_mean_mask * a.coeffs)


def split_symbols(ladder: DyadicLadder) -> Tuple[np.ndarray, np.ndarray]:
    """
    Символы разбиения на низко-горизонтальную и высоко-горизонтальную части.

    m_lh = Σ_ℓ χ(2^{-(ℓ-1)}|ξ_h|)φ(2^{-ℓ}|ξ3|) + 1{ξ3 = 0},
    m_hh = Σ_ℓ φ(2^{-ℓ}|ξ3|) Σ_{k >= ℓ-1} φ(2^{-k}|ξ_h|).
    """
    grid = ladder.grid
    m_lh = np.zeros(grid.shape)
    m_hh = np.zeros(grid.shape)
    for l in ladder.vertical_shells:
        high = np.zeros((grid.n_h, grid.n_h, 1))
        for k in ladder.horizontal_shells:
            if k >= l - 1:
                high = high + ladder.phi_h(k)
        m_lh = m_lh + ladder.chi_h(l - 1) * ladder.phi_v(l)
        m_hh = m_hh + high * ladder.phi_v(l)
    m_lh = m_lh + wavenumbers(grid).vertical_mean_mask
    return m_lh, m_hh


def split_lh_hh(a: Field, ladder: Optional[DyadicLadder] = None) -> Tuple[Field, Field]:
    """
    Разбиение a = a_lh + a_hh.

    Args:
        a: Поле
        ladder: Лестница (по умолчанию для сетки поля)

    Returns:
        Tuple[Field, Field]: (a_lh, a_hh); канал ξ3 = 0 отнесён к a_lh
    """
    ladder = _ladder(a, ladder)
    m_lh, m_hh = split_symbols(ladder)
    return a.with_coeffs(m_lh * a.coeffs), a.with_coeffs(m_hh * a.coeffs)


def bony_v(
    a: Field, b: Field, ladder: Optional[DyadicLadder] = None
) -> Tuple[Field, Field]:
    """
    Вертикальное разложение Бони.

    T = Σ_ℓ S^v_{ℓ-1}a · Δ^v_ℓ b, R = Σ_ℓ Δ^v_ℓ a · S^v_{ℓ+2}b плюс произведение
    каналов вертикального среднего; произведения деалиасированы, так что T + R
    совпадает с деалиасированным произведением ab.
    """
    if a.grid != b.grid:
        raise FieldError("Поля заданы на разных сетках")
    ladder = _ladder(a, ladder)
    reality = a.reality and b.reality
    paraproduct = Field.zeros(a.grid, reality)
    remainder = product(vertical_mean(a), vertical_mean(b))
    for l in ladder.vertical_shells:
        block_a = delta_v(l, a, ladder)
        block_b = delta_v(l, b, ladder)
        paraproduct = paraproduct + product(S_v(l - 1, a, ladder), block_b)
        remainder = remainder + product(block_a, S_v(l + 2, b, ladder))
    return paraproduct, remainder
