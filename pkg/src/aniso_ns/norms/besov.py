"""
Анизотропные нормы: H^{s,s'}, B^{0,1/2}, B₄^{-1/2,1/2}, B₄^{0,1/2} и блочные
величины, из которых они складываются.

Нормы принимают скалярное поле, векторное поле или набор компонент; для
векторов блочные L2-величины суммируются по компонентам в квадратах.
Канал вертикального среднего (ξ3 = 0) в B-нормы не входит и возвращается
отдельно.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import fft as sp_fft

from ..littlewood_paley.ladder import DyadicLadder, build_ladder
from ..spectral.fields import Field, FieldLike, as_components
from ..spectral.grid import Grid
from ..spectral.operators import gradient_h
from ..spectral.transforms import fft_workers, wavenumbers


class Measure(str, Enum):
    """Мера на торе: нормированная на объём или экстенсивная (как на ℝ³)."""

    VOLUME = "volume"
    EXTENSIVE = "extensive"


def measure_factors(grid: Grid, measure: Measure = Measure.VOLUME) -> Tuple[float, float]:
    """Множители (L2, L⁴_h(L²_v)) для перехода от нормированной меры."""
    if Measure(measure) is Measure.VOLUME:
        return 1.0, 1.0
    return float(np.sqrt(grid.volume)), float(np.sqrt(grid.period_h * grid.period_v))


@dataclass(frozen=True)
class NormValue:
    """Значение нормы с вкладами по оболочкам."""

    value: float
    shells: np.ndarray = field(default_factory=lambda: np.zeros(0))
    shell_indices: Tuple[int, ...] = ()
    vertical_mean: float = 0.0
    skipped_mass_fraction: float = 0.0

    def __float__(self) -> float:
        return self.value


def _resolve(x: FieldLike, ladder: Optional[DyadicLadder]) -> Tuple[Tuple[Field, ...], DyadicLadder]:
    components = as_components(x)
    grid = components[0].grid
    return components, ladder if ladder is not None else build_ladder(grid)


def gradient_h_components(x: FieldLike) -> List[Field]:
    """Компоненты ∇_h x (по две на каждую компоненту x)."""
    out: List[Field] = []
    for c in as_components(x):
        out.extend(gradient_h(c))
    return out


def energy_by_xi3(components: Sequence[Field]) -> np.ndarray:
    """Σ по компонентам и ξ_h величины |ĉ|² для каждого ξ3."""
    return sum(np.sum(np.abs(c.coeffs) ** 2, axis=(0, 1)) for c in components)  # type: ignore[return-value]


def vertical_block_l2(x: FieldLike, ladder: Optional[DyadicLadder] = None) -> np.ndarray:
    """‖Δ_ℓ^v x‖_{L²} для всех вертикальных оболочек лестницы."""
    components, ladder = _resolve(x, ladder)
    energy = energy_by_xi3(components)
    return np.array(
        [np.sqrt(np.sum(ladder.phi_v(l)[0, 0, :] ** 2 * energy)) for l in ladder.vertical_shells]
    )


def vertical_mean_l2(x: FieldLike) -> float:
    """L2-норма канала ξ3 = 0."""
    return float(np.sqrt(energy_by_xi3(as_components(x))[0]))


def pad_horizontal(coeffs: np.ndarray, factor: int = 2) -> np.ndarray:
    """Дополнить коэффициенты нулями по горизонтальным осям (порядок FFT)."""
    n = coeffs.shape[0]
    big = factor * n
    index = np.fft.fftfreq(n, d=1.0 / n).astype(int) % big
    out = np.zeros((big, big, coeffs.shape[2]), dtype=np.complex128)
    out[index[:, None], index[None, :], :] = coeffs
    return out


def l4h_l2v_of_coeffs(blocks: Sequence[np.ndarray]) -> float:
    """
    ‖·‖_{L⁴_h(L²_v)} набора компонент, заданных коэффициентами.

    Сначала вертикальная L2 по Парсевалю по ξ3 в каждой горизонтальной точке,
    затем горизонтальная L⁴ на вдвое более подробной сетке (без алиасинга).
    """
    g2: Optional[np.ndarray] = None
    for block in blocks:
        if block.shape[2] == 0:
            continue
        physical = sp_fft.ifftn(
            pad_horizontal(block), axes=(0, 1), norm="forward", workers=fft_workers()
        )
        contribution = np.sum(np.abs(physical) ** 2, axis=2)
        g2 = contribution if g2 is None else g2 + contribution
    if g2 is None:
        return 0.0
    return float(np.mean(g2**2) ** 0.25)


def l4h_l2v(x: FieldLike) -> float:
    return l4h_l2v_of_coeffs([c.coeffs for c in as_components(x)])


def _vertical_slices(
    components: Sequence[Field], ladder: DyadicLadder, l: int
) -> List[np.ndarray]:
    columns = ladder.vertical_columns(l)
    weights = ladder.phi_v(l)[:, :, columns]
    return [c.coeffs[:, :, columns] * weights for c in components]


def vertical_block_l4l2(x: FieldLike, ladder: Optional[DyadicLadder] = None) -> np.ndarray:
    """‖Δ_ℓ^v x‖_{L⁴_h(L²_v)} для всех вертикальных оболочек."""
    components, ladder = _resolve(x, ladder)
    return np.array(
        [
            l4h_l2v_of_coeffs(_vertical_slices(components, ladder, l))
            for l in ladder.vertical_shells
        ]
    )


def mixed_block_mask(ladder: DyadicLadder) -> np.ndarray:
    """Маска пар (ℓ, k) с k >= ℓ - 1."""
    ls = np.array(list(ladder.vertical_shells))[:, None]
    ks = np.array(list(ladder.horizontal_shells))[None, :]
    return ks >= ls - 1


def mixed_block_l4l2(x: FieldLike, ladder: Optional[DyadicLadder] = None) -> np.ndarray:
    """‖Δ_k^h Δ_ℓ^v x‖_{L⁴_h(L²_v)}, массив (ℓ, k); вне k >= ℓ - 1 нули."""
    components, ladder = _resolve(x, ladder)
    mask = mixed_block_mask(ladder)
    shells_k = list(ladder.horizontal_shells)
    out = np.zeros(mask.shape)
    for i, l in enumerate(ladder.vertical_shells):
        slices = _vertical_slices(components, ladder, l)
        for j, k in enumerate(shells_k):
            if mask[i, j]:
                phi = ladder.phi_h(k)
                out[i, j] = l4h_l2v_of_coeffs([s * phi for s in slices])
    return out


def low_block_l2(x: FieldLike, ladder: Optional[DyadicLadder] = None) -> np.ndarray:
    """‖S^h_{ℓ-1}Δ_ℓ^v x‖_{L²} для всех вертикальных оболочек."""
    components, ladder = _resolve(x, ladder)
    power = sum(np.abs(c.coeffs) ** 2 for c in components)
    return np.array(
        [
            np.sqrt(np.sum(ladder.chi_h(l - 1) ** 2 * ladder.phi_v(l) ** 2 * power))
            for l in ladder.vertical_shells
        ]
    )


def shell_weights(ladder: DyadicLadder) -> np.ndarray:
    """2^{ℓ/2} по вертикальным оболочкам."""
    return np.array([2.0 ** (l / 2.0) for l in ladder.vertical_shells])


def combine_b4_neg(
    mixed_sq: np.ndarray, low: np.ndarray, ladder: DyadicLadder, factors: Tuple[float, float]
) -> np.ndarray:
    """
    Вклады оболочек нормы B₄^{-1/2,1/2} по квадратам смешанных блоков и низкой части.

    Args:
        mixed_sq: Квадраты ‖Δ_k^hΔ_ℓ^v‖_{L⁴_h(L²_v)}, массив (ℓ, k)
        low: ‖S^h_{ℓ-1}Δ_ℓ^v‖_{L²}
        ladder: Лестница
        factors: Множители меры

    Returns:
        np.ndarray: 2^{ℓ/2}((Σ_k 2^{-k}·mixed²)^{1/2} + low)
    """
    l2_factor, l4_factor = factors
    k_weights = np.array([2.0 ** (-k) for k in ladder.horizontal_shells])[None, :]
    high = np.sqrt(np.sum(np.where(mixed_block_mask(ladder), k_weights * mixed_sq, 0.0), axis=1))
    return shell_weights(ladder) * (l4_factor * high + l2_factor * low)


def norm_H(
    a: FieldLike, s: float, s_prime: float, measure: Measure = Measure.VOLUME
) -> NormValue:
    """
    Норма H^{s,s'}: (Σ |ξ_h|^{2s}|ξ3|^{2s'}|â|²)^{1/2}.

    Моды, на которых вес сингулярен (ξ_h = 0 при s < 0, ξ3 = 0 при s' < 0),
    пропускаются; их доля возвращается в skipped_mass_fraction.
    """
    components = as_components(a)
    grid = components[0].grid
    table = wavenumbers(grid)
    singular = np.zeros(grid.shape, dtype=bool)
    if s < 0:
        singular |= table.xi_h_abs == 0.0
    if s_prime < 0:
        singular |= table.xi3_abs == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        weight_h = np.power(table.xi_h_abs, 2.0 * s)
        weight_v = np.power(table.xi3_abs, 2.0 * s_prime)
        weight = np.where(singular, 0.0, weight_h * weight_v)
    power = sum(np.abs(c.coeffs) ** 2 for c in components)
    total = float(np.sum(power))
    skipped = float(np.sum(power[singular]))
    value = float(np.sqrt(np.sum(weight * power))) * measure_factors(grid, measure)[0]
    return NormValue(
        value=value,
        skipped_mass_fraction=float(np.sqrt(skipped / total)) if total > 0.0 else 0.0,
    )


def norm_B0half(
    a: FieldLike, ladder: Optional[DyadicLadder] = None, measure: Measure = Measure.VOLUME
) -> NormValue:
    """Σ_ℓ 2^{ℓ/2}‖Δ_ℓ^v a‖_{L²}."""
    components, ladder = _resolve(a, ladder)
    l2_factor, _ = measure_factors(ladder.grid, measure)
    shells = shell_weights(ladder) * vertical_block_l2(components, ladder) * l2_factor
    return NormValue(
        value=float(np.sum(shells)),
        shells=shells,
        shell_indices=tuple(ladder.vertical_shells),
        vertical_mean=vertical_mean_l2(components) * l2_factor,
    )


def norm_B4_0half(
    a: FieldLike, ladder: Optional[DyadicLadder] = None, measure: Measure = Measure.VOLUME
) -> NormValue:
    """Σ_ℓ 2^{ℓ/2}‖Δ_ℓ^v a‖_{L⁴_h(L²_v)}."""
    components, ladder = _resolve(a, ladder)
    l2_factor, l4_factor = measure_factors(ladder.grid, measure)
    shells = shell_weights(ladder) * vertical_block_l4l2(components, ladder) * l4_factor
    return NormValue(
        value=float(np.sum(shells)),
        shells=shells,
        shell_indices=tuple(ladder.vertical_shells),
        vertical_mean=vertical_mean_l2(components) * l2_factor,
    )


def norm_B4_neg(
    a: FieldLike, ladder: Optional[DyadicLadder] = None, measure: Measure = Measure.VOLUME
) -> NormValue:
    """
    Норма B₄^{-1/2,1/2}.

    Σ_ℓ 2^{ℓ/2}((Σ_{k>=ℓ-1} 2^{-k}‖Δ_k^hΔ_ℓ^v a‖²_{L⁴_h(L²_v)})^{1/2} + ‖S^h_{ℓ-1}Δ_ℓ^v a‖_{L²})
    """
    components, ladder = _resolve(a, ladder)
    factors = measure_factors(ladder.grid, measure)
    mixed = mixed_block_l4l2(components, ladder)
    low = low_block_l2(components, ladder)
    shells = combine_b4_neg(mixed**2, low, ladder, factors)
    return NormValue(
        value=float(np.sum(shells)),
        shells=shells,
        shell_indices=tuple(ladder.vertical_shells),
        vertical_mean=vertical_mean_l2(components) * factors[0],
    )
