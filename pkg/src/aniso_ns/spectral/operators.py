"""
Спектральные операторы: производные, проектор Лерэ, горизонтальная тепловая
полугруппа, горизонтальные фурье-мультипликаторы и деалиасинг произведений.
"""

import logging
import threading
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Optional, Tuple

import numpy as np

from ..config import get_settings
from .fields import Field, FieldError, VecField
from .transforms import WavenumberTable, forward, inverse, wavenumbers

logger = logging.getLogger(__name__)

DISCARDED_MASS_WARNING = "DISCARDED_MASS"


def spectral_derivative(a: Field, axis: int) -> Field:
    """
    Частная производная по оси 1, 2 или 3.

    Args:
        a: Поле
        axis: Номер оси (1, 2, 3)

    Returns:
        Field: Коэффициенты, умноженные на i·ξ_axis
    """
    if axis not in (1, 2, 3):
        raise FieldError(f"Недопустимая ось: {axis}")
    xi = wavenumbers(a.grid).xi[axis - 1]
    return a.with_coeffs(1j * xi * a.coeffs)


def gradient_h(a: Field) -> Tuple[Field, Field]:
    return spectral_derivative(a, 1), spectral_derivative(a, 2)


def divergence(u: VecField) -> Field:
    table = wavenumbers(u.grid)
    coeffs = sum(1j * xi * c.coeffs for xi, c in zip(table.xi, u.components))
    return Field(u.grid, coeffs, u.reality)


def leray_stack(stack: np.ndarray, table: WavenumberTable) -> np.ndarray:
    """Проектор Лерэ на массиве формы (3, n_h, n_h, n_v); нулевая мода не меняется."""
    xi_sq = table.xi_odd_sq
    safe = np.where(xi_sq > 0.0, xi_sq, 1.0)
    dot = table.xi1 * stack[0] + table.xi2 * stack[1] + table.xi3 * stack[2]
    factor = np.where(xi_sq > 0.0, dot / safe, 0.0)
    return np.stack(
        [stack[0] - table.xi1 * factor, stack[1] - table.xi2 * factor, stack[2] - table.xi3 * factor]
    )


def leray_project(u: VecField) -> VecField:
    """
    Проекция на бездивергентные поля: u - ∇Δ⁻¹(div u) на ненулевых модах.

    Args:
        u: Векторное поле

    Returns:
        VecField: Бездивергентное поле
    """
    projected = leray_stack(u.stack(), wavenumbers(u.grid))
    return VecField.from_stack(u.grid, projected, divergence_free=True, reality=u.reality)


def horizontal_heat(a: Field, t: float) -> Field:
    """
    Горизонтальная тепловая полугруппа e^{tΔ_h}.

    Raises:
        ValueError: При отрицательном времени
    """
    if t < 0:
        raise ValueError(f"Время тепловой полугруппы должно быть неотрицательным: {t}")
    if t == 0:
        return a
    return a.with_coeffs(np.exp(-t * wavenumbers(a.grid).xi_h_sq) * a.coeffs)


class HorizontalSymbol(str, Enum):
    """Символы горизонтальных мультипликаторов."""

    INV_LAMBDA_H = "inv_lambda_h"
    GRAD_INV_LAPLACIAN_H = "grad_inv_laplacian_h"
    PERP_GRAD_INV_LAPLACIAN_H = "perp_grad_inv_laplacian_h"
    D3_INV_LAMBDA_H = "d3_inv_lambda_h"
    RIESZ_1 = "riesz_1"
    RIESZ_2 = "riesz_2"


@dataclass(frozen=True)
class MultiplierResult:
    """Результат мультипликатора: компоненты и доля отброшенной массы при ξ_h = 0."""

    fields: Tuple[Field, ...]
    discarded_mass_fraction: float
    warning_code: Optional[str] = None

    @property
    def field(self) -> Field:
        return self.fields[0]


class MultiplierDiagnostics:
    """Потокобезопасный счётчик отброшенной массы сингулярных мультипликаторов."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self.reset()

    def reset(self) -> None:
        with self._lock:
            self._calls = 0
            self._warnings = 0
            self._discarded_mass_sq = 0.0

    def record(self, discarded_sq: float, warned: bool) -> None:
        with self._lock:
            self._calls += 1
            self._warnings += int(warned)
            self._discarded_mass_sq += discarded_sq

    def snapshot(self) -> Dict[str, float]:
        with self._lock:
            return {
                "calls": self._calls,
                "warnings": self._warnings,
                "discarded_mass": float(np.sqrt(self._discarded_mass_sq)),
            }


multiplier_diagnostics = MultiplierDiagnostics()


def horizontal_multiplier(a: Field, symbol: HorizontalSymbol) -> MultiplierResult:
    """
    Применить горизонтальный фурье-мультипликатор.

    На модах, где символ не определён (ξ_h = 0 для нечётных символов - с учётом
    занулённой моды Найквиста), результат равен нулю, а отброшенная масса
    учитывается в диагностике.

    Args:
        a: Поле
        symbol: Символ мультипликатора

    Returns:
        MultiplierResult: Одна или две компоненты результата
    """
    symbol = HorizontalSymbol(symbol)
    table = wavenumbers(a.grid)
    c = a.coeffs

    if symbol in (HorizontalSymbol.INV_LAMBDA_H, HorizontalSymbol.D3_INV_LAMBDA_H):
        modulus = table.xi_h_abs
        singular = np.broadcast_to(modulus == 0.0, a.grid.shape)
        inv = np.where(modulus > 0.0, 1.0 / np.where(modulus > 0.0, modulus, 1.0), 0.0)
        if symbol is HorizontalSymbol.INV_LAMBDA_H:
            outputs = (inv * c,)
        else:
            outputs = (1j * table.xi3 * inv * c,)
    else:
        xi_sq = table.xi_h_odd_sq
        singular = np.broadcast_to(xi_sq == 0.0, a.grid.shape)
        safe = np.where(xi_sq > 0.0, xi_sq, 1.0)
        if symbol is HorizontalSymbol.GRAD_INV_LAPLACIAN_H:
            scale = np.where(xi_sq > 0.0, -1.0 / safe, 0.0)
            outputs = (1j * table.xi1 * scale * c, 1j * table.xi2 * scale * c)
        elif symbol is HorizontalSymbol.PERP_GRAD_INV_LAPLACIAN_H:
            scale = np.where(xi_sq > 0.0, -1.0 / safe, 0.0)
            outputs = (-1j * table.xi2 * scale * c, 1j * table.xi1 * scale * c)
        else:
            modulus = np.sqrt(safe)
            xi = table.xi1 if symbol is HorizontalSymbol.RIESZ_1 else table.xi2
            outputs = (np.where(xi_sq > 0.0, -1j * xi / modulus, 0.0) * c,)

    total_sq = float(np.vdot(c, c).real)
    discarded_sq = float(np.sum(np.abs(c[singular]) ** 2))
    fraction = float(np.sqrt(discarded_sq / total_sq)) if total_sq > 0.0 else 0.0
    warned = fraction > get_settings().discarded_mass_tolerance
    multiplier_diagnostics.record(discarded_sq, warned)
    if warned:
        logger.warning(
            f"Мультипликатор {symbol.value}: отброшена доля массы {fraction:.3e} на модах ξ_h = 0"
        )
    return MultiplierResult(
        fields=tuple(a.with_coeffs(out) for out in outputs),
        discarded_mass_fraction=fraction,
        warning_code=DISCARDED_MASS_WARNING if warned else None,
    )


def dealias(a: Field) -> Field:
    return a.with_coeffs(wavenumbers(a.grid).dealias_mask * a.coeffs)


def product(a: Field, b: Field, dealiased: bool = True) -> Field:
    """Произведение полей в физическом пространстве с деалиасингом по правилу 2/3."""
    if a.grid != b.grid:
        raise FieldError("Поля заданы на разных сетках")
    reality = a.reality and b.reality
    pa = inverse(a.coeffs)
    pb = inverse(b.coeffs)
    values = pa * pb
    if reality:
        values = values.real
    coeffs = forward(values)
    if dealiased:
        coeffs = wavenumbers(a.grid).dealias_mask * coeffs
    return Field(a.grid, coeffs, reality)
