"""
Сервис начальных данных: разложение Био-Савара, семейства данных с
анизотропным растяжением, частотная срезка, функционал 𝔄_N и отчёт об
условиях малости.
"""

import logging
import math
from enum import Enum
from typing import List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field as PydField, model_validator

from ..littlewood_paley.ladder import DyadicLadder, build_ladder
from ..norms.besov import norm_B0half, norm_B4_neg
from ..spectral.fields import Field, FieldError, VecField, random_band_limited
from ..spectral.grid import Grid
from ..spectral.operators import HorizontalSymbol, horizontal_multiplier, spectral_derivative
from ..spectral.transforms import wavenumbers
from ..utils.file_utils import read_vecfield_afld

logger = logging.getLogger(__name__)

# Наибольший аргумент exp, представимый в double
_MAX_EXPONENT = 709.0


class InadmissibleDataError(ValueError):
    """Параметры семейства не дают допустимых данных на сетке."""

    def __init__(self, family: str, reason: str):
        self.family = family
        self.reason = reason
        super().__init__(f"Семейство {family}: {reason}")


class DataFamily(str, Enum):
    """Семейства начальных данных."""

    OSCILLATORY = "oscillatory_1_5"
    SLOW_VARYING = "slow_varying_1_11"
    COMBINED = "combined_1_12"
    CUSTOM_FILE = "custom_file"


class DataFamilySpec(BaseModel):
    """Параметры генерации начальных данных."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    family: DataFamily = DataFamily.OSCILLATORY
    epsilon: float = PydField(default=0.25, gt=0, lt=1, description="Малый параметр ε")
    delta: float = PydField(default=0.2, gt=0, lt=0.25, description="Показатель δ ∈ (0, 1/4)")
    seed: int = PydField(default=0, ge=0)
    profile: Literal["default", "random"] = "default"
    band_h: int = PydField(default=2, ge=0, description="Горизонтальная полоса случайных профилей")
    band_v: int = PydField(default=2, ge=0, description="Вертикальная полоса случайных профилей")
    amplitude: float = PydField(default=1.0, ge=0, description="Множитель профиля φ")
    v0_amplitude: float = PydField(default=1.0, ge=0, description="Множитель v₀^h")
    w0_amplitude: float = PydField(default=1.0, ge=0, description="Множитель w₀")
    input_paths: Optional[List[str]] = None

    @model_validator(mode="after")
    def check_input_paths(self) -> "DataFamilySpec":
        if self.family is DataFamily.CUSTOM_FILE and (
            self.input_paths is None or len(self.input_paths) != 3
        ):
            raise ValueError("Для custom_file нужны ровно три пути input_paths")
        return self


class SmallnessConstants(BaseModel):
    """Константы условий малости (по умолчанию L = M = C = 1, N = 4)."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    L: float = PydField(default=1.0, ge=0)
    M: float = PydField(default=1.0, ge=0)
    N: int = PydField(default=4, ge=2)
    C: float = PydField(default=1.0, ge=0)
    eps0: float = PydField(default=0.1, gt=0)


class ANValue(BaseModel):
    """Значение 𝔄_N; при переполнении value = inf и overflow = True."""

    value: float
    overflow: bool = False


class SmallnessReport(BaseModel):
    """Отчёт об условиях малости для начальных данных."""

    lam3_b0: float = PydField(description="‖Λ_h⁻¹∂₃u₀‖_{B^{0,1/2}}")
    u3_b4neg: float = PydField(description="‖u₀³‖_{B₄^{-1/2,1/2}}")
    u3_b0: float = PydField(description="‖u₀³‖_{B^{0,1/2}}")
    uh_l2: float
    d3uh_l2: float
    ubar0_b0: float = PydField(description="‖ū₀^h‖_{B^{0,1/2}}, ū₀^h - вихревая часть u₀^h")
    ubar0_cut_b0: float = PydField(description="‖ū₀,N^h‖_{B^{0,1/2}}")
    A_N: float
    A_N_overflow: bool
    lhs_18: float
    lhs_19: float
    lhs_18_b0: float
    lhs_19_b0: float
    overflow: List[str] = PydField(default_factory=list)
    verdict_18: bool
    verdict_19: bool
    verdict_18_b0: bool
    verdict_19_b0: bool
    remark_b_lhs: float
    remark_b_rhs: float
    discarded_mass_fraction: float = 0.0
    warnings: List[str] = PydField(default_factory=list)
    constants: SmallnessConstants

    @property
    def verdict(self) -> bool:
        return self.verdict_18


# Разложение Био-Савара


def biot_savart_split(u_h: Sequence[Field]) -> Tuple[Tuple[Field, Field], Tuple[Field, Field]]:
    """
    Разложение Гельмгольца горизонтального поля u^h = u_curl + u_div.

    u_div = ∇_hΔ_h⁻¹ div_h u^h, u_curl = u^h - u_div. Моды с ξ_h = 0 (с учётом
    занулённой моды Найквиста) целиком относятся к u_curl.

    Args:
        u_h: Пара компонент (u¹, u²)

    Returns:
        Tuple: ((u_curl¹, u_curl²), (u_div¹, u_div²))
    """
    u1, u2 = u_h
    if u1.grid != u2.grid:
        raise FieldError("Компоненты заданы на разных сетках")
    table = wavenumbers(u1.grid)
    xi_sq = table.xi_h_odd_sq
    safe = np.where(xi_sq > 0.0, xi_sq, 1.0)
    dot = table.xi1 * u1.coeffs + table.xi2 * u2.coeffs
    factor = np.where(xi_sq > 0.0, dot / safe, 0.0)
    div1 = u1.with_coeffs(table.xi1 * factor)
    div2 = u2.with_coeffs(table.xi2 * factor)
    return (u1 - div1, u2 - div2), (div1, div2)


# Семейства данных


def _oscillation_index(spec: DataFamilySpec, grid: Grid, profile_band: int) -> int:
    """Индекс горизонтальной частоты 1/ε на сетке; проверка допустимости."""
    frequency = 1.0 / spec.epsilon
    index = frequency / grid.base_h
    rounded = round(index)
    if rounded < 1 or abs(index - rounded) > 1e-9 * max(index, 1.0):
        raise InadmissibleDataError(
            spec.family.value, f"частота 1/ε = {frequency:.6g} не является частотой сетки"
        )
    cut_h = grid.dealias_fraction * grid.n_h / 2.0
    if rounded + profile_band >= cut_h:
        raise InadmissibleDataError(
            spec.family.value,
            f"частота {rounded} с полосой профиля {profile_band} не лежит в полосе "
            f"деалиасинга |k| < {cut_h:.6g} сетки n_h={grid.n_h}",
        )
    return int(rounded)


def _profiles(spec: DataFamilySpec, grid: Grid) -> Tuple[Field, Field, Field, int]:
    """Профили φ, ψ, θ на базовой сетке и их горизонтальная полоса."""
    if spec.profile == "random":
        cut_h = grid.dealias_fraction * grid.n_h / 2.0
        cut_v = grid.dealias_fraction * grid.n_v / 2.0
        if spec.band_h >= cut_h or spec.band_v >= cut_v:
            raise InadmissibleDataError(
                spec.family.value,
                f"полосы профиля ({spec.band_h}, {spec.band_v}) не лежат в полосе деалиасинга "
                f"({cut_h:.6g}, {cut_v:.6g})",
            )
        rng = np.random.default_rng(spec.seed)
        phi = random_band_limited(grid, rng, spec.band_h, spec.band_v, zero_mean=True)
        psi = random_band_limited(grid, rng, spec.band_h, spec.band_v, zero_mean=True)
        theta = random_band_limited(grid, rng, spec.band_h, spec.band_v, zero_mean=True)
        return phi, psi, theta, spec.band_h
    x1, x2, x3 = grid.coordinates()
    kh, kv = grid.base_h, grid.base_v
    phi = Field.from_physical(grid, np.cos(kh * x2) * np.cos(kv * x3))
    psi = Field.from_physical(
        grid, np.sin(kh * x1) * np.sin(kh * x2) * (1.0 + 0.5 * np.cos(kv * x3))
    )
    theta = Field.from_physical(grid, np.cos(kh * x1) * np.cos(kh * x2) * np.sin(kv * x3))
    return phi, psi, theta, 1


def _perp_gradient(psi: Field) -> Tuple[Field, Field]:
    """∇_h^⊥ψ = (-∂₂ψ, ∂₁ψ)."""
    return -spectral_derivative(psi, 2), spectral_derivative(psi, 1)


def _w_profile(theta: Field) -> Tuple[Field, Field, Field]:
    """w₀ = (∂₁∂₃θ, ∂₂∂₃θ, -Δ_hθ), бездивергентно по построению."""
    d3 = spectral_derivative(theta, 3)
    laplacian_h = spectral_derivative(spectral_derivative(theta, 1), 1) + spectral_derivative(
        spectral_derivative(theta, 2), 2
    )
    return spectral_derivative(d3, 1), spectral_derivative(d3, 2), -laplacian_h


def _modulate(a: Field, index: int) -> Field:
    """sin(m x₁)·a в физическом пространстве."""
    x1, _, _ = a.grid.coordinates()
    return Field.from_physical(a.grid, np.sin(index * a.grid.base_h * x1) * a.to_physical())


def _stretch(a: Field, stretched: Grid) -> Field:
    """Перенос коэффициентов на сетку с периодом L_v/ε: a(x_h, εx₃)."""
    return Field(stretched, a.coeffs, a.reality)


def _log_factor(spec: DataFamilySpec) -> float:
    return (-math.log(spec.epsilon)) ** spec.delta


def generate(spec: DataFamilySpec, grid: Optional[Grid] = None) -> VecField:
    """
    Сгенерировать начальные данные семейства.

    Растяжение x₃ ↦ εx₃ реализуется точным переносом коэффициентов на сетку
    с вертикальным периодом L_v/ε, без интерполяции.

    Args:
        spec: Параметры семейства
        grid: Базовая сетка (для custom_file берётся из файлов)

    Returns:
        VecField: Бездивергентное поле u₀

    Raises:
        InadmissibleDataError: Частота 1/ε или полосы профиля вне полосы деалиасинга, поле не бездивергентно
    """
    family = spec.family
    if family is DataFamily.CUSTOM_FILE:
        u0 = read_vecfield_afld(spec.input_paths or [])
        return _checked(spec, u0.components)
    if grid is None:
        raise InadmissibleDataError(family.value, "не задана сетка")

    phi, psi, theta, band = _profiles(spec, grid)
    phi = phi * spec.amplitude

    if family is DataFamily.OSCILLATORY:
        m = _oscillation_index(spec, grid, band)
        zero = Field.zeros(grid)
        components = (
            zero,
            _modulate(-spectral_derivative(phi, 3), m),
            _modulate(spectral_derivative(phi, 2), m),
        )
        logger.info(f"Осциллирующее семейство: ε = {spec.epsilon}, частота осцилляции {m}")
        return _checked(spec, components)

    stretched = grid.with_vertical_period(grid.period_v / spec.epsilon)
    log_factor = _log_factor(spec)
    v1, v2 = (c * spec.v0_amplitude for c in _perp_gradient(psi))

    if family is DataFamily.SLOW_VARYING:
        w1, w2, w3 = (c * spec.w0_amplitude for c in _w_profile(theta))
        eps_log = spec.epsilon * log_factor
        components = (
            _stretch(v1 + w1 * eps_log, stretched),
            _stretch(v2 + w2 * eps_log, stretched),
            _stretch(w3 * log_factor, stretched),
        )
        logger.info(
            f"Медленно меняющееся семейство: ε = {spec.epsilon}, δ = {spec.delta}, (-ln ε)^δ = {log_factor:.6g}"
        )
        return _checked(spec, components)

    # Комбинированное семейство: частота осцилляции на растянутой сетке
    m = _oscillation_index(spec, stretched, band)
    root = math.sqrt(spec.epsilon)
    osc2 = _modulate(_stretch(-spectral_derivative(phi, 3), stretched), m) * (log_factor * root)
    osc3 = _modulate(_stretch(spectral_derivative(phi, 2), stretched), m) * (log_factor / root)
    components = (
        _stretch(v1, stretched),
        _stretch(v2, stretched) + osc2,
        osc3,
    )
    logger.info(f"Комбинированное семейство: ε = {spec.epsilon}, δ = {spec.delta}, частота {m}")
    return _checked(spec, components)


def _checked(spec: DataFamilySpec, components: Sequence[Field]) -> VecField:
    try:
        return VecField(tuple(components), divergence_free=True)  # type: ignore[arg-type]
    except FieldError as e:
        raise InadmissibleDataError(spec.family.value, str(e)) from e


# Частотная срезка и функционал 𝔄_N


def freq_cut_N(a: Field, N: int) -> Field:
    """
    Оставить моды с |ξ₃| <= 1/N или |ξ₃| >= N.

    Raises:
        ValueError: При N < 2
    """
    if N < 2:
        raise ValueError(f"N должно быть не меньше 2: {N}")
    xi3 = wavenumbers(a.grid).xi3_abs
    tol = 1e-12 * N
    keep = (xi3 <= 1.0 / N + tol) | (xi3 >= N - tol)
    return a.with_coeffs(keep * a.coeffs)


def _guarded_exp(x: float) -> Tuple[float, bool]:
    if x > _MAX_EXPONENT:
        return math.inf, True
    return math.exp(x), False


def functional_A_N(u0h_norm: float, cut_norm: float, N: int, C: float) -> ANValue:
    """
    𝔄_N = N^{1/2}‖ū₀^h‖exp(C‖ū₀^h‖²) + ‖ū₀,N^h‖exp(N²exp(C‖ū₀^h‖²)).

    При выходе показателя за представимый диапазон возвращает inf с флагом.
    """
    if u0h_norm < 0 or cut_norm < 0 or C < 0:
        raise ValueError("Аргументы 𝔄_N должны быть неотрицательными")
    if N < 2:
        raise ValueError(f"N должно быть не меньше 2: {N}")
    inner, overflow = _guarded_exp(C * u0h_norm**2)
    if overflow:
        return ANValue(value=math.inf, overflow=True)
    first = math.sqrt(N) * u0h_norm * inner
    if cut_norm == 0.0:
        second = 0.0
    else:
        outer, overflow = _guarded_exp(N**2 * inner)
        if overflow:
            return ANValue(value=math.inf, overflow=True)
        second = cut_norm * outer
    value = first + second
    if not math.isfinite(value):
        return ANValue(value=math.inf, overflow=True)
    return ANValue(value=value)


# Условия малости


def _smallness_lhs(lam3: float, u3_norm: float, L: float, growth: float) -> Tuple[float, bool]:
    """lam3·exp(L(1 + ‖u₀³‖⁴)·growth) в логарифмической шкале."""
    if lam3 == 0.0:
        return 0.0, False
    if L == 0.0:
        return lam3, False
    exponent = L * (1.0 + u3_norm**4) * growth
    log_lhs = math.log(lam3) + exponent
    if not math.isfinite(log_lhs) or log_lhs > _MAX_EXPONENT:
        return math.inf, True
    return math.exp(log_lhs), False


def smallness_report(
    u0: VecField,
    constants: Optional[SmallnessConstants] = None,
    ladder: Optional[DyadicLadder] = None,
) -> SmallnessReport:
    """
    Вычислить левые части условий малости и их вариантов с
    ‖u₀³‖_{B^{0,1/2}}.

    Args:
        u0: Бездивергентное начальное поле
        constants: Константы L, M, N, C, ε₀
        ladder: Лестница (по умолчанию для сетки поля)

    Returns:
        SmallnessReport: Нормы, левые части и вердикты
    """
    constants = constants or SmallnessConstants()
    ladder = ladder or build_ladder(u0.grid)
    warnings: List[str] = []

    lam3_parts = [horizontal_multiplier(c, HorizontalSymbol.D3_INV_LAMBDA_H) for c in u0.components]
    discarded = math.sqrt(sum(r.discarded_mass_fraction**2 for r in lam3_parts))
    warnings.extend(r.warning_code for r in lam3_parts if r.warning_code)
    lam3 = norm_B0half([r.field for r in lam3_parts], ladder).value

    u3 = u0.vertical
    u3_b4neg = norm_B4_neg(u3, ladder).value
    u3_b0 = norm_B0half(u3, ladder).value
    uh = u0.horizontal
    uh_l2 = math.sqrt(sum(c.l2_norm() ** 2 for c in uh))
    d3uh_l2 = math.sqrt(sum(spectral_derivative(c, 3).l2_norm() ** 2 for c in uh))

    ubar0, _ = biot_savart_split(uh)
    ubar0_b0 = norm_B0half(list(ubar0), ladder).value
    cut_b0 = norm_B0half([freq_cut_N(c, constants.N) for c in ubar0], ladder).value
    a_n = functional_A_N(ubar0_b0, cut_b0, constants.N, constants.C)

    growth_18 = math.inf if a_n.overflow else _guarded_exp(constants.M * a_n.value**4)[0]
    growth_19 = _guarded_exp(_guarded_exp(constants.M * uh_l2 * d3uh_l2)[0])[0]

    overflow: List[str] = []
    results = {}
    for name, u3_norm, growth in (
        ("lhs_18", u3_b4neg, growth_18),
        ("lhs_19", u3_b4neg, growth_19),
        ("lhs_18_b0", u3_b0, growth_18),
        ("lhs_19_b0", u3_b0, growth_19),
    ):
        value, overflowed = _smallness_lhs(lam3, u3_norm, constants.L, growth)
        results[name] = value
        if overflowed:
            overflow.append(name)

    # Замечание (b): то же значение через (Λ_h⁻¹∂₃u₀^h, -Λ_h⁻¹div_h u₀^h)
    div_h = spectral_derivative(uh[0], 1) + spectral_derivative(uh[1], 2)
    remark_fields = [
        horizontal_multiplier(c, HorizontalSymbol.D3_INV_LAMBDA_H).field for c in uh
    ] + [-horizontal_multiplier(div_h, HorizontalSymbol.INV_LAMBDA_H).field]
    remark_rhs = norm_B0half(remark_fields, ladder).value

    if overflow:
        logger.warning(f"Переполнение при вычислении условий малости: {', '.join(overflow)}")

    report = SmallnessReport(
        lam3_b0=lam3,
        u3_b4neg=u3_b4neg,
        u3_b0=u3_b0,
        uh_l2=uh_l2,
        d3uh_l2=d3uh_l2,
        ubar0_b0=ubar0_b0,
        ubar0_cut_b0=cut_b0,
        A_N=a_n.value,
        A_N_overflow=a_n.overflow,
        overflow=overflow,
        verdict_18=results["lhs_18"] <= constants.eps0,
        verdict_19=results["lhs_19"] <= constants.eps0,
        verdict_18_b0=results["lhs_18_b0"] <= constants.eps0,
        verdict_19_b0=results["lhs_19_b0"] <= constants.eps0,
        remark_b_lhs=lam3,
        remark_b_rhs=remark_rhs,
        discarded_mass_fraction=discarded,
        warnings=sorted(set(warnings)),
        constants=constants,
        **results,
    )
    logger.info(
        f"Условия малости: lhs_18 = {report.lhs_18:.6e}, lhs_19 = {report.lhs_19:.6e}, "
        f"ε₀ = {constants.eps0}"
    )
    return report
