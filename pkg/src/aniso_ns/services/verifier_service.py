"""
Проверочные наборы для тождеств и неравенств анизотропной теории
Литтлвуда-Пэли, профилирование констант и регрессия законов масштабирования.

Неравенства с явной константой носителя (Бернштейн, разбиение единицы,
масштабная инвариантность) проверяются как жёсткие границы; неравенства
с неуказанной константой - через устойчивость профиля отношений при
измельчении сетки.
"""

import logging
import math
import time
import xml.etree.ElementTree as ET
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Dict, List, Literal, Optional, Sequence, Tuple, TypeVar, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field as PydField
from scipy.integrate import trapezoid

from ..config import get_settings
from ..littlewood_paley.blocks import delta_h, delta_v, split_lh_hh
from ..littlewood_paley.cutoffs import DEFAULT_CUTOFFS, CutoffPair
from ..littlewood_paley.ladder import build_ladder
from ..norms.besov import (
    Measure,
    gradient_h_components,
    l4h_l2v,
    norm_B0half,
    norm_B4_0half,
    norm_B4_neg,
    pad_horizontal,
)
from ..norms.ledger import BlockKind, NormLedger
from ..spectral.fields import Field, random_band_limited
from ..spectral.grid import Grid
from ..spectral.operators import (
    HorizontalSymbol,
    gradient_h,
    horizontal_heat,
    horizontal_multiplier,
    product,
    spectral_derivative,
)
from ..spectral.transforms import inverse
from ..utils.file_utils import write_json
from .solver_service import LayeredTrajectory, SolverConfig, solve_2dns_layers

logger = logging.getLogger(__name__)

T = TypeVar("T")

SuiteName = Literal[
    "partition",
    "bernstein",
    "interpolation",
    "heat_smoothing",
    "scaling",
    "energy_layers",
    "embeddings",
    "trilinear",
]
ALL_SUITES: Tuple[str, ...] = (
    "partition",
    "bernstein",
    "interpolation",
    "heat_smoothing",
    "scaling",
    "energy_layers",
    "embeddings",
    "trilinear",
)

PARTITION_TOLERANCE = 1e-12
SUPPORT_TOLERANCE = 1e-14
SCALING_TOLERANCE = 1e-10
LAYER_DRIFT_TOLERANCE = 1e-7


class VerificationFailure(RuntimeError):
    """Хотя бы один жёсткий набор проверок не пройден."""

    def __init__(self, failed_suites: Sequence[str]):
        self.failed_suites = list(failed_suites)
        super().__init__(f"Не пройдены наборы проверок: {', '.join(self.failed_suites)}")


class Witness(BaseModel):
    """Экстремальный свидетель: зерно, оболочка, мода или утверждение."""

    seed: Optional[int] = None
    shell: Optional[int] = None
    mode: Optional[str] = None
    value: float = 0.0


class SuiteReport(BaseModel):
    """Машиночитаемый результат одного набора проверок."""

    name: str
    kind: Literal["hard", "profile", "spot"]
    passed: bool
    metrics: Dict[str, float] = PydField(default_factory=dict)
    witness: Optional[Witness] = None
    notes: List[str] = PydField(default_factory=list)
    duration_seconds: float = 0.0


class VerificationReport(BaseModel):
    """Отчёт по всем выполненным наборам."""

    suites: List[SuiteReport]
    seed: int
    cutoff_hash: str
    config_hash: str = ""

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.suites)

    @property
    def failed_suites(self) -> List[str]:
        return [s.name for s in self.suites if not s.passed]

    @property
    def failed_hard_suites(self) -> List[str]:
        return [s.name for s in self.suites if s.kind == "hard" and not s.passed]

    def raise_for_failures(self) -> None:
        """
        Raises:
            VerificationFailure: Если не пройден хотя бы один жёсткий набор
        """
        failed = self.failed_hard_suites
        if failed:
            raise VerificationFailure(failed)


class VerifierConfig(BaseModel):
    """Параметры проверочных наборов."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    suites: List[SuiteName] = PydField(default_factory=lambda: list(ALL_SUITES))
    seed: int = PydField(default=0, ge=0)
    n_h: int = PydField(default=32, ge=8, description="Горизонтальный размер грубой сетки")
    n_v: int = PydField(default=32, ge=8, description="Вертикальный размер грубой сетки")
    refine: int = PydField(default=2, ge=2, description="Коэффициент измельчения для профилей")
    band_h: int = PydField(default=6, ge=1, description="Горизонтальная полоса случайных полей профилей")
    band_v: int = PydField(default=6, ge=1, description="Вертикальная полоса случайных полей профилей")
    partition_samples: int = PydField(default=1000, ge=1000)
    bernstein_trials: int = PydField(default=200, ge=1)
    interpolation_trials: int = PydField(default=100, ge=1)
    heat_trials: int = PydField(default=5, ge=1)
    heat_horizon: float = PydField(default=0.5, gt=0)
    heat_samples: int = PydField(default=21, ge=2)
    scaling_trials: int = PydField(default=20, ge=1)
    embedding_trials: int = PydField(default=10, ge=1)
    layer_n_h: int = PydField(default=64, ge=8)
    layer_n_v: int = PydField(default=16, ge=8)
    layer_dt: float = PydField(default=1e-3, gt=0)
    layer_horizon: float = PydField(default=1.0, ge=0)


# Вспомогательные функции


def _map_trials(fn: Callable[[int], T], seeds: Sequence[int]) -> List[T]:
    """Независимые испытания в пуле потоков; результат в порядке зёрен."""
    workers = get_settings().threads
    if workers <= 1 or len(seeds) <= 1:
        return [fn(s) for s in seeds]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, seeds))


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, trial])


def _refined(grid: Grid, factor: int) -> Grid:
    return Grid(
        n_h=grid.n_h * factor,
        n_v=grid.n_v * factor,
        period_h=grid.period_h,
        period_v=grid.period_v,
        dealias_fraction=grid.dealias_fraction,
    )


def _drift(coarse: float, fine: float) -> float:
    if coarse == 0.0:
        return 0.0 if fine == 0.0 else math.inf
    return abs(fine - coarse) / abs(coarse)


def linf_h_l2v(a: Field) -> float:
    """‖a‖_{L^∞_h(L²_v)} по узлам вдвое более подробной горизонтальной сетки."""
    physical = inverse(pad_horizontal(a.coeffs), axes=(0, 1))
    return float(np.sqrt(np.max(np.sum(np.abs(physical) ** 2, axis=2))))


def _timed(build: Callable[[], SuiteReport]) -> SuiteReport:
    started = time.perf_counter()
    report = build()
    return report.model_copy(update={"duration_seconds": time.perf_counter() - started})


# Разбиение единицы


def verify_partition(cutoffs: Optional[CutoffPair] = None, samples: int = 1000) -> SuiteReport:
    """
    Тождества Σ_j φ(2^{-j}τ) = 1 и χ(τ) + Σ_{j>=0} φ(2^{-j}τ) = 1 на
    логарифмической сетке τ ∈ [1e-3, 1e3], а также носители φ и χ.

    Args:
        cutoffs: Пара срезок (по умолчанию стандартная)
        samples: Число точек τ (не меньше 1000)

    Returns:
        SuiteReport: Максимальные отклонения; проходит при отклонении < 1e-12
    """
    if samples < 1000:
        raise ValueError(f"Нужно не меньше 1000 точек: {samples}")
    c = cutoffs or DEFAULT_CUTOFFS
    tau = np.logspace(-3.0, 3.0, samples)
    start, end = c.phi_support
    j_low = math.floor(math.log2(tau[0] / end)) - 1
    j_high = math.ceil(math.log2(tau[-1] / start)) + 1
    full = sum(c.phi(np.ldexp(tau, -j)) for j in range(j_low, j_high + 1))
    positive = sum(c.phi(np.ldexp(tau, -j)) for j in range(0, j_high + 1))
    dev_full = np.abs(full - 1.0)
    dev_chi = np.abs(c.chi(tau) + positive - 1.0)

    outside_phi = (tau < 0.75) | (tau > 8.0 / 3.0)
    outside_chi = tau > 4.0 / 3.0
    support_phi = float(np.max(np.abs(c.phi(tau[outside_phi]))))
    support_chi = float(np.max(np.abs(c.chi(tau[outside_chi]))))

    worst_full = int(np.argmax(dev_full))
    worst_chi = int(np.argmax(dev_chi))
    max_dev = max(float(dev_full[worst_full]), float(dev_chi[worst_chi]))
    passed = (
        max_dev < PARTITION_TOLERANCE
        and support_phi <= SUPPORT_TOLERANCE
        and support_chi <= SUPPORT_TOLERANCE
    )
    witness = None
    if not passed:
        index = worst_full if dev_full[worst_full] >= dev_chi[worst_chi] else worst_chi
        witness = Witness(mode=f"tau={tau[index]!r}", value=max_dev)
    return SuiteReport(
        name="partition",
        kind="hard",
        passed=passed,
        metrics={
            "max_deviation_full": float(dev_full[worst_full]),
            "max_deviation_chi": float(dev_chi[worst_chi]),
            "phi_outside_support": support_phi,
            "chi_outside_support": support_chi,
            "samples": float(samples),
        },
        witness=witness,
        notes=[f"cutoff={c.profile_hash}"],
    )


# Неравенства Бернштейна


def horizontal_mode_count(grid: Grid, k: int, band_h: Optional[int] = None) -> int:
    """Число горизонтальных мод (k1, k2) в носителе φ(2^{-k}|ξ_h|) с учётом полосы."""
    ladder = build_ladder(grid)
    support = ladder.phi_h(k)[:, :, 0] > 0.0
    if band_h is not None:
        kh = np.abs(np.fft.fftfreq(grid.n_h, d=1.0 / grid.n_h))
        support &= (kh[:, None] <= band_h) & (kh[None, :] <= band_h)
    return int(np.count_nonzero(support))


def bernstein_ratios(a: Field, band_h: Optional[int] = None) -> Dict[str, Tuple[float, int]]:
    """
    Худшие отношения левой части к правой с константой носителя для всех оболочек.

    Утверждения: производная и кольцо по вертикали, производная и кольцо по
    горизонтали, горизонтальные L²→L⁴ и L²→L^∞ (константы - степени числа
    решёточных точек в носителе блока). Нулевые блоки пропускаются.

    Returns:
        Dict[str, Tuple[float, int]]: утверждение -> (отношение, оболочка)
    """
    ladder = build_ladder(a.grid)
    start, end = ladder.cutoffs.phi_support
    worst: Dict[str, Tuple[float, int]] = {}

    def keep(statement: str, ratio: float, shell: int) -> None:
        if statement not in worst or ratio > worst[statement][0]:
            worst[statement] = (ratio, shell)

    for l in ladder.vertical_shells:
        block = delta_v(l, a, ladder)
        size = block.l2_norm()
        if size == 0.0:
            continue
        d3 = spectral_derivative(block, 3).l2_norm()
        keep("vertical_derivative", d3 / (end * 2.0**l * size), l)
        if d3 > 0.0:
            keep("vertical_ring", size / (2.0**-l / start * d3), l)

    for k in ladder.horizontal_shells:
        block = delta_h(k, a, ladder)
        size = block.l2_norm()
        if size == 0.0:
            continue
        derivatives = [g.l2_norm() for g in gradient_h(block)]
        keep("horizontal_derivative", max(derivatives) / (end * 2.0**k * size), k)
        if max(derivatives) > 0.0:
            keep("horizontal_ring", size / (math.sqrt(2.0) * 2.0**-k / start * max(derivatives)), k)
        count = horizontal_mode_count(a.grid, k, band_h)
        l4, linf = l4h_l2v(block), linf_h_l2v(block)
        keep("horizontal_l2_l4", l4 / (count**0.25 * size), k)
        keep("horizontal_l2_linf", linf / (count**0.5 * size), k)
        keep("horizontal_l2_l4_pattern", l4 / (support_pattern_bound(a.grid, k, 0.5) * size), k)
        keep("horizontal_l2_linf_pattern", linf / (support_pattern_bound(a.grid, k, 1.0) * size), k)
    return worst


# Показатели e в C·2^{k·e} для горизонтальных оценок L² → L^{p₁}: e = 2/2 - 2/p₁
HORIZONTAL_EXPONENTS = {"horizontal_l2_l4": 0.5, "horizontal_l2_linf": 1.0}


def support_pattern_bound(grid: Grid, k: int, exponent: float) -> float:
    """
    Граница вида C·2^{k·e} для оценки ‖Δ_k^h a‖_{L^{p₁}_h(L²_v)} ≤ bound·‖Δ_k^h a‖_{L²}.

    Круг радиуса R содержит не более π(R + 1/√2)² решёточных точек, поэтому
    (π(R + 1/√2)²)^{e/2} с R = (8/3)·2^k/base_h мажорирует константу по числу мод.
    """
    end = DEFAULT_CUTOFFS.phi_support[1]
    radius = end * 2.0**k / grid.base_h
    return (math.pi * (radius + 1.0 / math.sqrt(2.0)) ** 2) ** (exponent / 2.0)


def aligned_shell_field(grid: Grid) -> Field:
    """Единичные коэффициенты на всех горизонтальных модах без Найквиста и |ξ₃| = 1."""
    coeffs = np.zeros(grid.shape, dtype=np.complex128)
    kh = np.abs(np.fft.fftfreq(grid.n_h, d=1.0 / grid.n_h))
    inside = np.flatnonzero(kh < grid.n_h // 2)
    coeffs[np.ix_(inside, inside, [1, grid.n_v - 1])] = 1.0
    return Field(grid, coeffs)


def bernstein_growth(grid: Grid) -> Dict[str, Dict[str, float]]:
    """
    Наклон log₂ отношения ‖Δ_k^h a‖_{L^{p₁}_h(L²_v)}/‖Δ_k^h a‖_{L²} по k.

    Поле с согласованными фазами достигает порядка 2^{k·e}, так что наклон
    подгонки совпадает с показателем e. Берутся оболочки k ≥ 1, носитель
    которых целиком помещается в сетку; при числе таких оболочек меньше двух
    результат пуст.

    Returns:
        Dict[str, Dict[str, float]]: утверждение -> {"slope", "exponent", "constant", "shells"}
    """
    ladder = build_ladder(grid)
    end = ladder.cutoffs.phi_support[1]
    shells = [k for k in ladder.horizontal_shells if k >= 1 and end * 2.0**k / grid.base_h < grid.n_h // 2]
    if len(shells) < 2:
        return {}
    a = aligned_shell_field(grid)
    blocks = [delta_h(k, a, ladder) for k in shells]
    levels = np.array(shells, dtype=float)
    norms = {"horizontal_l2_l4": l4h_l2v, "horizontal_l2_linf": linf_h_l2v}
    growth: Dict[str, Dict[str, float]] = {}
    for statement, norm in norms.items():
        exponent = HORIZONTAL_EXPONENTS[statement]
        ratios = np.array([norm(b) / b.l2_norm() for b in blocks])
        slope = float(np.polyfit(levels, np.log2(ratios), 1)[0])
        growth[statement] = {
            "slope": slope,
            "exponent": exponent,
            "constant": float(np.max(ratios / 2.0 ** (exponent * levels))),
            "shells": float(len(shells)),
        }
    return growth


def verify_bernstein(grid: Grid, trials: int = 200, seed: int = 0) -> SuiteReport:
    """
    Анизотропные неравенства Бернштейна как жёсткие границы на случайных полях.

    Args:
        grid: Сетка
        trials: Число случайных полей (каждое проверяется на всех оболочках)
        seed: Базовое зерно

    Returns:
        SuiteReport: Худшее отношение по каждому утверждению; проходит, если ни одно
            не превышает 1 более чем на относительный допуск
    """
    slack = get_settings().bernstein_slack
    band_h, band_v = grid.n_h // 2 - 1, grid.n_v // 2 - 1

    def trial(i: int) -> Dict[str, Tuple[float, int]]:
        a = random_band_limited(grid, _trial_rng(seed, i), band_h, band_v, zero_mean=True)
        return bernstein_ratios(a, band_h)

    results = _map_trials(trial, list(range(trials)))
    metrics: Dict[str, float] = {}
    witness: Optional[Witness] = None
    violations = 0
    for i, worst in enumerate(results):
        for statement, (ratio, shell) in worst.items():
            if ratio > metrics.get(statement, -math.inf):
                metrics[statement] = ratio
            if ratio > 1.0 + slack:
                violations += 1
                if witness is None or ratio > witness.value:
                    witness = Witness(seed=i, shell=shell, mode=statement, value=ratio)
    tolerance = get_settings().bernstein_slope_tolerance
    for statement, fit in bernstein_growth(grid).items():
        metrics[f"{statement}_slope"] = fit["slope"]
        metrics[f"{statement}_constant"] = fit["constant"]
        if abs(fit["slope"] - fit["exponent"]) > tolerance:
            violations += 1
            logger.error(
                f"Рост {statement} по оболочкам: наклон {fit['slope']:.3f}, ожидается {fit['exponent']:.1f}"
            )
    metrics["violations"] = float(violations)
    metrics["trials"] = float(trials)
    if witness is not None:
        logger.error(f"Неравенство Бернштейна нарушено: {witness.mode}, оболочка {witness.shell}")
    return SuiteReport(name="bernstein", kind="hard", passed=violations == 0, metrics=metrics, witness=witness)


# Интерполяция B^{0,1/2} между L² и ∂₃L²


def interpolation_ratio(a: Field) -> Optional[float]:
    """‖a‖_{B^{0,1/2}} / (‖a‖^{1/2}_{L²}‖∂₃a‖^{1/2}_{L²}); None без массы ∂₃."""
    d3 = spectral_derivative(a, 3).l2_norm()
    size = a.l2_norm()
    if d3 == 0.0 or size == 0.0:
        return None
    return norm_B0half(a).value / math.sqrt(size * d3)


def time_interpolation_ratios(
    a: Field, horizon: float, samples: int
) -> Dict[str, float]:
    """
    Вариант во времени на траектории e^{tΔ_h}a при p = 2 и p = ∞:
    ‖a‖_{L̃^p_T(B^{0,1/2})} / (‖a‖^{1/2}_{L^p_T(L²)}‖∂₃a‖^{1/2}_{L^p_T(L²)}).
    """
    times = np.linspace(0.0, horizon, samples)
    ledger = NormLedger(a.grid)
    sizes, d3_sizes = [], []
    for t in times:
        h = horizontal_heat(a, float(t))
        ledger.cl_accumulate(2, "a", float(t), h)
        ledger.cl_accumulate(math.inf, "a", float(t), h)
        sizes.append(h.l2_norm())
        d3_sizes.append(spectral_derivative(h, 3).l2_norm())
    sizes_arr, d3_arr = np.array(sizes), np.array(d3_sizes)
    out: Dict[str, float] = {}
    l2_size = math.sqrt(float(trapezoid(sizes_arr**2, times)))
    l2_d3 = math.sqrt(float(trapezoid(d3_arr**2, times)))
    if l2_size > 0.0 and l2_d3 > 0.0:
        out["p2"] = ledger.cl_norm(2, "a") / math.sqrt(l2_size * l2_d3)
    if sizes_arr.max() > 0.0 and d3_arr.max() > 0.0:
        out["pinf"] = ledger.cl_norm(math.inf, "a") / math.sqrt(sizes_arr.max() * d3_arr.max())
    return out


def verify_interpolation(
    grid: Grid,
    trials: int = 100,
    seed: int = 0,
    refine: int = 2,
    band_h: int = 6,
    band_v: int = 6,
    horizon: float = 0.5,
    samples: int = 11,
) -> SuiteReport:
    """
    Профиль константы ‖a‖_{B^{0,1/2}} ≲ ‖a‖^{1/2}‖∂₃a‖^{1/2} и её варианта во времени.

    Одни и те же случайные поля (одинаковые зёрна и полосы) оцениваются на
    сетке grid и на сетке, измельчённой в refine раз.

    Returns:
        SuiteReport: Максимальные отношения на обеих сетках; проходит при
            относительном дрейфе профиля меньше допуска
    """
    tolerance = get_settings().profile_drift_tolerance
    metrics: Dict[str, float] = {}
    witness: Optional[Witness] = None
    maxima: Dict[str, List[float]] = {"instant": [], "p2": [], "pinf": []}

    for label, g in (("coarse", grid), ("fine", _refined(grid, refine))):
        def trial(i: int, g: Grid = g) -> Tuple[Optional[float], Dict[str, float]]:
            a = random_band_limited(g, _trial_rng(seed, i), band_h, band_v, zero_mean=True)
            return interpolation_ratio(a), time_interpolation_ratios(a, horizon, samples)

        results = _map_trials(trial, list(range(trials)))
        instant = [(r, i) for i, (r, _) in enumerate(results) if r is not None]
        best, best_seed = max(instant) if instant else (0.0, None)
        maxima["instant"].append(best)
        metrics[f"max_ratio_{label}"] = best
        for key in ("p2", "pinf"):
            values = [timed[key] for _, timed in results if key in timed]
            maxima[key].append(max(values, default=0.0))
            metrics[f"max_ratio_{key}_{label}"] = maxima[key][-1]
        if label == "coarse" and best_seed is not None:
            witness = Witness(seed=best_seed, value=best)

    for key, (coarse, fine) in maxima.items():
        metrics[f"drift_{key}"] = _drift(coarse, fine)
    passed = all(metrics[f"drift_{key}"] < tolerance for key in maxima)
    return SuiteReport(
        name="interpolation",
        kind="profile",
        passed=passed,
        metrics=metrics,
        witness=witness,
        notes=["sup по времени при p = inf берётся только по моментам выборки"],
    )


# Сглаживание тепловой полугруппой в B₄^{-1/2,1/2}


def heat_smoothing_ratio(a: Field, horizon: float, samples: int) -> Optional[float]:
    """
    ‖e^{tΔ_h}a_hh‖_{B₄^{-1/2,1/2}(T)} / ‖a‖_{B₄^{-1/2,1/2}} по выборке t ∈ [0, T].

    Returns:
        Optional[float]: Отношение; None для a с нулевой нормой
    """
    denominator = norm_B4_neg(a).value
    if denominator == 0.0:
        return None
    _, a_hh = split_lh_hh(a)
    ledger = NormLedger(a.grid)
    for t in np.linspace(0.0, horizon, samples):
        h = horizontal_heat(a_hh, float(t))
        ledger.cl_accumulate(math.inf, "heat", float(t), h, BlockKind.B4_NEG)
        ledger.cl_accumulate(2, "grad_heat", float(t), gradient_h_components(h), BlockKind.B4_NEG)
    lhs = ledger.cl_norm(math.inf, "heat", BlockKind.B4_NEG) + ledger.cl_norm(
        2, "grad_heat", BlockKind.B4_NEG
    )
    return lhs / denominator


def verify_heat_smoothing(
    grid: Grid,
    trials: int = 5,
    horizon: float = 0.5,
    samples: int = 21,
    seed: int = 0,
    refine: int = 2,
    band_h: int = 6,
    band_v: int = 6,
) -> SuiteReport:
    """Профиль константы сглаживания e^{tΔ_h}a_hh в B₄^{-1/2,1/2}(T) на двух сетках."""
    tolerance = get_settings().profile_drift_tolerance
    metrics: Dict[str, float] = {}
    maxima: List[float] = []
    witness: Optional[Witness] = None
    for label, g in (("coarse", grid), ("fine", _refined(grid, refine))):
        def trial(i: int, g: Grid = g) -> Optional[float]:
            a = random_band_limited(g, _trial_rng(seed, i), band_h, band_v, zero_mean=True)
            return heat_smoothing_ratio(a, horizon, samples)

        ratios = [(r, i) for i, r in enumerate(_map_trials(trial, list(range(trials)))) if r is not None]
        best, best_seed = max(ratios) if ratios else (0.0, None)
        maxima.append(best)
        metrics[f"max_ratio_{label}"] = best
        if label == "coarse" and best_seed is not None:
            witness = Witness(seed=best_seed, value=best)
    metrics["drift"] = _drift(maxima[0], maxima[1])
    return SuiteReport(
        name="heat_smoothing",
        kind="profile",
        passed=metrics["drift"] < tolerance,
        metrics=metrics,
        witness=witness,
        notes=[f"горизонт T = {horizon} вместо T = ∞, {samples} моментов выборки"],
    )


# Масштабная инвариантность


def dyadic_rescale(a: Field, factor: int = 2) -> Field:
    """a_λ(x) = λa(λx) на сетке с периодами, уменьшенными в λ раз (те же индексы)."""
    return Field(a.grid.rescaled(factor), a.coeffs * factor, a.reality)


def verify_scaling(a: Field, factor: int = 2) -> SuiteReport:
    """
    Нормы B^{0,1/2} и B₄^{-1/2,1/2} (экстенсивная мера) поля и его диадического
    растяжения совпадают.

    Returns:
        SuiteReport: Относительные расхождения; проходит при < 1e-10
    """
    scaled = dyadic_rescale(a, factor)
    metrics: Dict[str, float] = {}
    for name, norm in (("B0half", norm_B0half), ("B4_neg", norm_B4_neg)):
        original = norm(a, measure=Measure.EXTENSIVE).value
        rescaled = norm(scaled, measure=Measure.EXTENSIVE).value
        metrics[f"{name}_original"] = original
        metrics[f"{name}_rescaled"] = rescaled
        metrics[f"{name}_relative_error"] = _drift(original, rescaled)
    worst = max(metrics["B0half_relative_error"], metrics["B4_neg_relative_error"])
    return SuiteReport(
        name="scaling",
        kind="hard",
        passed=worst < SCALING_TOLERANCE,
        metrics=metrics,
        witness=None if worst < SCALING_TOLERANCE else Witness(value=worst),
    )


def verify_scaling_ensemble(grid: Grid, trials: int = 20, seed: int = 0) -> SuiteReport:
    """verify_scaling на ансамбле случайных полей."""
    band_h, band_v = grid.n_h // 2 - 1, grid.n_v // 2 - 1

    def trial(i: int) -> SuiteReport:
        a = random_band_limited(grid, _trial_rng(seed, i), band_h, band_v)
        return verify_scaling(a)

    reports = _map_trials(trial, list(range(trials)))
    errors = [
        max(r.metrics["B0half_relative_error"], r.metrics["B4_neg_relative_error"]) for r in reports
    ]
    worst = int(np.argmax(errors))
    passed = all(r.passed for r in reports)
    return SuiteReport(
        name="scaling",
        kind="hard",
        passed=passed,
        metrics={"max_relative_error": errors[worst], "trials": float(trials)},
        witness=None if passed else Witness(seed=worst, value=errors[worst]),
    )


# Послойные энергетические тождества


def taylor_green_layers(grid: Grid, modulation: float = 0.5) -> Tuple[Field, Field]:
    """
    Вихрь Тейлора-Грина с амплитудой, зависящей от x₃:
    ū = A(x₃)(sin x₁ cos x₂, -cos x₁ sin x₂), A = 1 + modulation·cos(x₃).
    """
    x1, x2, x3 = grid.coordinates()
    kh, kv = grid.base_h, grid.base_v
    amplitude = 1.0 + modulation * np.cos(kv * x3)
    u1 = amplitude * np.sin(kh * x1) * np.cos(kh * x2)
    u2 = -amplitude * np.cos(kh * x1) * np.sin(kh * x2)
    return Field.from_physical(grid, u1), Field.from_physical(grid, u2)


def verify_energy_layers(
    trajectory: LayeredTrajectory, expected_decay: Optional[Callable[[np.ndarray], np.ndarray]] = None
) -> SuiteReport:
    """
    Послойный баланс ‖ū(t)‖² + 2∫‖∇_hū‖² = ‖ū₀‖² и профиль оценки для ∂₃ū.

    Для ∂₃-энергии Q(t) = ‖∂₃ū(t)‖² + ∫‖∇_h∂₃ū‖² в каждом слое вычисляется
    наименьшая C, при которой Q(t) <= Q(0)exp(C‖ū₀‖²_{L^∞_v(L²_h)}); отношение к
    этой огибающей не превосходит 1, значение C сообщается.

    Args:
        trajectory: Траектория послойной системы
        expected_decay: Точный закон E(t)/E(0) (например e^{-4t}) для сравнения

    Returns:
        SuiteReport: Проходит при послойном дрейфе < 1e-7 и конечной ∂₃-величине
    """
    drift = trajectory.layer_drift()
    max_drift = float(np.max(drift, initial=0.0))
    metrics: Dict[str, float] = {"max_layer_drift": max_drift, "layers": float(drift.size)}
    witness: Optional[Witness] = None
    passed = max_drift < LAYER_DRIFT_TOLERANCE
    if not passed:
        witness = Witness(mode=f"layer={int(np.argmax(drift))}", value=max_drift)

    if trajectory.times:
        q = trajectory.d3_quantity()
        finite = bool(np.all(np.isfinite(q)))
        passed = passed and finite
        energy_sup = float(np.max(trajectory.layer_energy[0]))
        q0 = q[0]
        growth = np.where(q0 > 0.0, np.max(q, axis=0) / np.where(q0 > 0.0, q0, 1.0), 1.0)
        if energy_sup > 0.0:
            c_star = np.maximum(0.0, np.log(growth) / energy_sup)
        else:
            c_star = np.zeros_like(growth)
        envelope = q0[None, :] * np.exp(c_star * energy_sup)[None, :]
        ratio = np.where(envelope > 0.0, q / np.where(envelope > 0.0, envelope, 1.0), 0.0)
        metrics["d3_quantity_max"] = float(np.max(q))
        metrics["d3_profiled_constant"] = float(np.max(c_star, initial=0.0))
        metrics["d3_envelope_ratio"] = float(np.max(ratio, initial=0.0))
        metrics["d3_finite"] = float(finite)

        if expected_decay is not None:
            energy = np.sum(np.array(trajectory.layer_energy), axis=1)
            if energy[0] > 0.0:
                exact = expected_decay(np.array(trajectory.times))
                error = float(np.max(np.abs(energy / energy[0] - exact)))
                metrics["decay_law_error"] = error
                passed = passed and error < LAYER_DRIFT_TOLERANCE

    return SuiteReport(
        name="energy_layers",
        kind="hard",
        passed=passed,
        metrics=metrics,
        witness=witness,
        notes=["константа оценки для ∂₃ū профилируется и не проверяется"],
    )


def verify_energy_layers_suite(grid: Grid, config: SolverConfig) -> SuiteReport:
    """Послойные тождества на данных Тейлора-Грина с модулированной по x₃ амплитудой."""
    trajectory = solve_2dns_layers(taylor_green_layers(grid), config)
    decay_rate = 2.0 * 2.0 * grid.base_h**2
    return verify_energy_layers(trajectory, lambda t: np.exp(-decay_rate * t))


# Вложения


def embedding_ratios(a: Field, horizon: float, samples: int) -> Dict[str, float]:
    """
    Отношения для трёх вложений на траектории h(t) = e^{tΔ_h}a:

    - b4_0half: ‖a‖²_{B₄^{0,1/2}} / (‖a‖_{B^{0,1/2}}‖∇_ha‖_{B^{0,1/2}});
    - l4_time: ‖h‖²_{L̃⁴_T(B₄^{0,1/2})} / (‖h‖_{L̃^∞_T(B^{0,1/2})}‖∇_hh‖_{L̃²_T(B^{0,1/2})});
    - b4_neg_time: ‖h‖_{L̃⁴_T(B₄^{0,1/2})} / ‖h‖_{B₄^{-1/2,1/2}(T)}.
    """
    out: Dict[str, float] = {}
    grad = gradient_h_components(a)
    denominator = norm_B0half(a).value * norm_B0half(grad).value
    if denominator > 0.0:
        out["b4_0half"] = norm_B4_0half(a).value ** 2 / denominator

    ledger = NormLedger(a.grid)
    for t in np.linspace(0.0, horizon, samples):
        h = horizontal_heat(a, float(t))
        grad_h = gradient_h_components(h)
        ledger.cl_accumulate(4, "h", float(t), h, BlockKind.B4_0HALF)
        ledger.cl_accumulate(math.inf, "h", float(t), h)
        ledger.cl_accumulate(2, "grad_h", float(t), grad_h)
        ledger.cl_accumulate(math.inf, "h", float(t), h, BlockKind.B4_NEG)
        ledger.cl_accumulate(2, "grad_h", float(t), grad_h, BlockKind.B4_NEG)
    l4 = ledger.cl_norm(4, "h", BlockKind.B4_0HALF)
    b_time = ledger.cl_norm(math.inf, "h") * ledger.cl_norm(2, "grad_h")
    if b_time > 0.0:
        out["l4_time"] = l4**2 / b_time
    b4_neg_time = ledger.cl_norm(math.inf, "h", BlockKind.B4_NEG) + ledger.cl_norm(
        2, "grad_h", BlockKind.B4_NEG
    )
    if b4_neg_time > 0.0:
        out["b4_neg_time"] = l4 / b4_neg_time
    return out


def verify_embeddings(
    grid: Grid,
    trials: int = 10,
    horizon: float = 0.5,
    samples: int = 11,
    seed: int = 0,
    refine: int = 2,
    band_h: int = 6,
    band_v: int = 6,
) -> SuiteReport:
    """Профили констант трёх вложений на двух сетках; проходит при дрейфе меньше допуска."""
    tolerance = get_settings().profile_drift_tolerance
    keys = ("b4_0half", "l4_time", "b4_neg_time")
    maxima: Dict[str, List[float]] = {key: [] for key in keys}
    metrics: Dict[str, float] = {}
    for label, g in (("coarse", grid), ("fine", _refined(grid, refine))):
        def trial(i: int, g: Grid = g) -> Dict[str, float]:
            a = random_band_limited(g, _trial_rng(seed, i), band_h, band_v, zero_mean=True)
            return embedding_ratios(a, horizon, samples)

        results = _map_trials(trial, list(range(trials)))
        for key in keys:
            best = max((r[key] for r in results if key in r), default=0.0)
            maxima[key].append(best)
            metrics[f"max_ratio_{key}_{label}"] = best
    worst_key, worst_drift = keys[0], -1.0
    for key in keys:
        metrics[f"drift_{key}"] = _drift(maxima[key][0], maxima[key][1])
        if metrics[f"drift_{key}"] > worst_drift:
            worst_key, worst_drift = key, metrics[f"drift_{key}"]
    passed = worst_drift < tolerance
    return SuiteReport(
        name="embeddings",
        kind="profile",
        passed=passed,
        metrics=metrics,
        witness=None if passed else Witness(seed=seed, mode=worst_key, value=worst_drift),
    )


# Трилинейная оценка


def spot_check_trilinear(grid: Grid, seed: int = 0, band_h: int = 4, band_v: int = 4) -> SuiteReport:
    """
    Обе части одной оценки спаривания |(Δ_ℓ^v R₁(ab) | Δ_ℓ^v c)| и
    2^{-ℓ}‖a‖_{B₄^{0,1/2}}‖b‖_{B^{0,1/2}}‖c‖^{1/2}_{B^{0,1/2}}‖∇_hc‖^{1/2}_{B^{0,1/2}}
    для одной конфигурации; отношение архивируется и не проверяется.
    """
    rng = _trial_rng(seed, 0)
    a, b, c = (random_band_limited(grid, rng, band_h, band_v, zero_mean=True) for _ in range(3))
    ladder = build_ladder(grid)
    riesz = horizontal_multiplier(product(a, b), HorizontalSymbol.RIESZ_1).field
    scale = (
        norm_B4_0half(a, ladder).value
        * norm_B0half(b, ladder).value
        * math.sqrt(norm_B0half(c, ladder).value * norm_B0half(gradient_h_components(c), ladder).value)
    )
    metrics: Dict[str, float] = {}
    best, best_shell = 0.0, None
    for l in ladder.vertical_shells:
        lhs = abs(delta_v(l, riesz, ladder).inner(delta_v(l, c, ladder)))
        rhs = 2.0**-l * scale
        if rhs == 0.0:
            continue
        ratio = lhs / rhs
        metrics[f"ratio_shell_{l}"] = ratio
        if ratio > best:
            best, best_shell = ratio, l
    metrics["max_ratio"] = best
    return SuiteReport(
        name="trilinear",
        kind="spot",
        passed=True,
        metrics=metrics,
        witness=Witness(seed=seed, shell=best_shell, value=best),
        notes=["спот-проверка, отношение не проверяется"],
    )


# Сервис


class VerifierService:
    """Запуск выбранных наборов проверок и сериализация отчётов."""

    def __init__(self, config: Optional[VerifierConfig] = None, config_hash: str = ""):
        self.config = config or VerifierConfig()
        self.config_hash = config_hash

    def _suite(self, name: str) -> SuiteReport:
        c = self.config
        grid = Grid(n_h=c.n_h, n_v=c.n_v)
        if name == "partition":
            return verify_partition(samples=c.partition_samples)
        if name == "bernstein":
            return verify_bernstein(grid, c.bernstein_trials, c.seed)
        if name == "interpolation":
            return verify_interpolation(
                grid, c.interpolation_trials, c.seed, c.refine, c.band_h, c.band_v, c.heat_horizon
            )
        if name == "heat_smoothing":
            return verify_heat_smoothing(
                grid, c.heat_trials, c.heat_horizon, c.heat_samples, c.seed, c.refine, c.band_h, c.band_v
            )
        if name == "scaling":
            return verify_scaling_ensemble(grid, c.scaling_trials, c.seed)
        if name == "energy_layers":
            layer_grid = Grid(n_h=c.layer_n_h, n_v=c.layer_n_v)
            solver = SolverConfig(dt=c.layer_dt, horizon=c.layer_horizon)
            return verify_energy_layers_suite(layer_grid, solver)
        if name == "embeddings":
            return verify_embeddings(
                grid, c.embedding_trials, c.heat_horizon, 11, c.seed, c.refine, c.band_h, c.band_v
            )
        if name == "trilinear":
            return spot_check_trilinear(grid, c.seed)
        raise ValueError(f"Неизвестный набор проверок: {name}")

    def run_all(self) -> VerificationReport:
        """
        Выполнить все выбранные наборы по порядку.

        Returns:
            VerificationReport: Отчёт; исключение при провале не выбрасывается
                (см. VerificationReport.raise_for_failures)
        """
        reports = []
        for name in self.config.suites:
            logger.info(f"Набор проверок {name}...")
            report = _timed(lambda name=name: self._suite(name))
            level = logging.INFO if report.passed else logging.WARNING
            logger.log(level, f"Набор {name}: {'пройден' if report.passed else 'НЕ пройден'} ({report.duration_seconds:.2f} с)")
            reports.append(report)
        return VerificationReport(
            suites=reports,
            seed=self.config.seed,
            cutoff_hash=DEFAULT_CUTOFFS.profile_hash,
            config_hash=self.config_hash,
        )


def write_json_report(report: VerificationReport, path: Union[str, Path]) -> Path:
    payload = report.model_dump(mode="json")
    payload["passed"] = report.passed
    payload["failed_suites"] = report.failed_suites
    return write_json(path, payload)


def write_junit_xml(report: VerificationReport, path: Union[str, Path]) -> Path:
    """Отчёт в формате JUnit XML: один testcase на набор."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    suite = ET.Element(
        "testsuite",
        name="aniso-ns-verify",
        tests=str(len(report.suites)),
        failures=str(len(report.failed_suites)),
        time=f"{sum(s.duration_seconds for s in report.suites):.3f}",
    )
    properties = ET.SubElement(suite, "properties")
    for name, value in (
        ("seed", str(report.seed)),
        ("cutoff_hash", report.cutoff_hash),
        ("config_hash", report.config_hash),
    ):
        ET.SubElement(properties, "property", name=name, value=value)
    for s in report.suites:
        case = ET.SubElement(
            suite, "testcase", classname=f"verify.{s.kind}", name=s.name, time=f"{s.duration_seconds:.3f}"
        )
        if not s.passed:
            witness = s.witness.model_dump_json() if s.witness else "{}"
            failure = ET.SubElement(case, "failure", message=f"{s.name} не пройден")
            failure.text = witness
        out = ET.SubElement(case, "system-out")
        out.text = "\n".join(f"{k}={v!r}" for k, v in sorted(s.metrics.items()))
    ET.ElementTree(suite).write(path, encoding="utf-8", xml_declaration=True)
    logger.info(f"JUnit-отчёт записан: {path}")
    return path
