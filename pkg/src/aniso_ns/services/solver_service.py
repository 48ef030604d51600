"""
Сервис интегрирования анизотропной системы Навье-Стокса
∂_t u + u·∇u - Δ_h u = -∇p, div u = 0, и послойной двумерной системы.

Схема - Рунге-Кутта 4 с интегрирующим множителем (форма Лоусона):
горизонтальная диффузия учитывается точно множителем e^{-t|ξ_h|²},
нелинейный член вычисляется псевдоспектрально с деалиасингом 2/3.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterator, List, Literal, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field as PydField

from ..config import get_settings
from ..norms.ledger import NormLedger, Trajectory
from ..spectral.fields import Field, FieldError, VecField
from ..spectral.grid import Grid
from ..spectral.operators import leray_stack
from ..spectral.transforms import WavenumberTable, forward, inverse, wavenumbers

logger = logging.getLogger(__name__)

# Специализированный логгер прогресса интегрирования
solver_logger = logging.getLogger("aniso_ns.solver")

# Пары (i, j), i <= j, симметричного тензора u⊗u
_PAIRS_3D = ((0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2))
_PAIRS_2D = ((0, 0), (0, 1), (1, 1))


class SolverConfig(BaseModel):
    """Параметры интегрирования по времени."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    dt: float = PydField(default=1e-3, gt=0, description="Шаг по времени")
    horizon: float = PydField(default=1.0, ge=0, description="Горизонт интегрирования T")
    scheme: Literal["IF-RK4"] = "IF-RK4"
    cfl_safety: float = PydField(default=1.0, gt=0, description="Запас по условию CFL")
    dealias: bool = PydField(default=True, description="Деалиасинг по правилу 2/3")
    monitor_every: int = PydField(default=10, ge=1, description="Период мониторинга в шагах")

    def time_grid(self) -> Tuple[int, float]:
        """
        Число шагов и фактический шаг, делящий горизонт нацело.

        Returns:
            Tuple[int, float]: (число шагов, шаг)
        """
        if self.horizon == 0.0:
            return 0, self.dt
        steps = max(1, math.ceil(self.horizon / self.dt - 1e-9))
        return steps, self.horizon / steps


class CFLViolationError(RuntimeError):
    """Шаг по времени нарушает адвективное условие CFL."""

    def __init__(self, velocity_max: float, dt: float, limit: float, step: int, time: float):
        self.velocity_max = velocity_max
        self.dt = dt
        self.limit = limit
        self.step = step
        self.time = time
        super().__init__(
            f"Нарушено условие CFL на шаге {step} (t = {time:.6g}): "
            f"max|u| = {velocity_max:.6g}, dt = {dt:.3e} > {limit:.3e}"
        )


class TruncationError(FieldError):
    """Усечение до полосы деалиасинга удаляет недопустимую долю поля."""

    def __init__(self, removed_fraction: float, tolerance: float):
        self.removed_fraction = removed_fraction
        self.tolerance = tolerance
        super().__init__(
            f"Усечение до полосы деалиасинга удаляет долю {removed_fraction:.3e} "
            f"нормы L² (допуск {tolerance:.1e})"
        )


def truncate_to_dealias_band(u: VecField) -> Tuple[VecField, float]:
    """
    Обнулить коэффициенты u вне полосы деалиасинга 2/3.

    Args:
        u: Бездивергентное поле

    Returns:
        Tuple[VecField, float]: Усечённое поле и удалённая доля нормы L²

    Raises:
        TruncationError: Удалённая доля больше settings.truncation_tolerance
    """
    settings = get_settings()
    mask = wavenumbers(u.grid).dealias_mask
    masked = VecField.from_stack(u.grid, mask * u.stack(), divergence_free=True, reality=u.reality)
    total = u.l2_norm()
    fraction = (u - masked).l2_norm() / total if total > 0.0 else 0.0
    if fraction > settings.truncation_tolerance:
        logger.error(f"Начальные данные вне полосы деалиасинга: доля {fraction:.3e}")
        raise TruncationError(fraction, settings.truncation_tolerance)
    if fraction > settings.discarded_mass_tolerance:
        logger.warning(f"Начальные данные усечены до полосы деалиасинга: доля {fraction:.3e}")
    return masked, fraction


def _symmetric_flux(
    physical: np.ndarray, pairs: Sequence[Tuple[int, int]], axes: Sequence[int], mask: np.ndarray
) -> Dict[Tuple[int, int], np.ndarray]:
    """Коэффициенты произведений u_i u_j с маской деалиасинга."""
    return {(i, j): mask * forward(physical[i] * physical[j], axes=axes) for i, j in pairs}


def _flux(fluxes: Dict[Tuple[int, int], np.ndarray], i: int, j: int) -> np.ndarray:
    return fluxes[(i, j)] if i <= j else fluxes[(j, i)]


class _IntegratingFactorRK4:
    """
    Общее ядро схемы IF-RK4.

    Наследники задают нелинейный член, скорость диссипации и проекцию.
    Диссипация интегрируется теми же стадиями, что и решение, поэтому
    дрейф энергетического баланса имеет четвёртый порядок по dt.
    """

    def __init__(self, decay_rate: np.ndarray, config: SolverConfig, min_spacing: float):
        self._decay_rate = decay_rate
        self.config = config
        self._min_spacing = min_spacing
        self._factors: Dict[float, Tuple[np.ndarray, np.ndarray]] = {}

    def _nonlinear(self, state: np.ndarray) -> Tuple[np.ndarray, float]:
        raise NotImplementedError

    def _dissipation_rate(self, state: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _project(self, state: np.ndarray) -> np.ndarray:
        return state

    def _decay(self, dt: float) -> Tuple[np.ndarray, np.ndarray]:
        factors = self._factors.get(dt)
        if factors is None:
            factors = (np.exp(-dt * self._decay_rate), np.exp(-0.5 * dt * self._decay_rate))
            self._factors[dt] = factors
        return factors

    def check_cfl(self, velocity_max: float, dt: float, step: int, time: float) -> None:
        if velocity_max == 0.0:
            return
        limit = self.config.cfl_safety * self._min_spacing / velocity_max
        if dt > limit:
            error = CFLViolationError(velocity_max, dt, limit, step, time)
            solver_logger.error(str(error))
            raise error

    def advance(
        self, state: np.ndarray, dt: float, step: int = 0, time: float = 0.0
    ) -> Tuple[np.ndarray, np.ndarray, float]:
        """
        Один шаг IF-RK4.

        Returns:
            Tuple: (новое состояние, приращение ∫ диссипации, max|u| в начале шага)
        """
        e, e2 = self._decay(dt)
        n1, velocity_max = self._nonlinear(state)
        self.check_cfl(velocity_max, dt, step, time)
        u2 = e2 * (state + 0.5 * dt * n1)
        n2, _ = self._nonlinear(u2)
        u3 = e2 * state + 0.5 * dt * n2
        n3, _ = self._nonlinear(u3)
        u4 = e * state + dt * e2 * n3
        n4, _ = self._nonlinear(u4)
        new_state = e * state + dt / 6.0 * (e * n1 + 2.0 * e2 * (n2 + n3) + n4)
        dissipated = (
            dt
            / 6.0
            * (
                self._dissipation_rate(state)
                + 2.0 * self._dissipation_rate(u2)
                + 2.0 * self._dissipation_rate(u3)
                + self._dissipation_rate(u4)
            )
        )
        return self._project(new_state), dissipated, velocity_max


@dataclass
class SolverStep:
    """Состояние после шага трёхмерного интегратора."""

    step: int
    t: float
    u: VecField
    energy: float
    dissipation: float
    velocity_max: float
    monitor: bool


class AnisotropicSolver(_IntegratingFactorRK4):
    """Интегратор трёхмерной анизотропной системы (вязкость только по горизонтали)."""

    def __init__(self, grid: Grid, config: Optional[SolverConfig] = None):
        self.grid = grid
        self._table: WavenumberTable = wavenumbers(grid)
        super().__init__(
            np.broadcast_to(self._table.xi_h_sq, grid.shape),
            config or SolverConfig(),
            min(grid.spacing_h, grid.spacing_v),
        )
        self._mask = self._table.dealias_mask if self.config.dealias else np.ones(grid.shape)

    def _nonlinear(self, state: np.ndarray) -> Tuple[np.ndarray, float]:
        """-P div(u⊗u) в спектральном представлении."""
        physical = inverse(state, axes=(1, 2, 3)).real
        velocity_max = float(np.sqrt(np.max(np.sum(physical**2, axis=0))))
        fluxes = _symmetric_flux(physical, _PAIRS_3D, (0, 1, 2), self._mask)
        xi = self._table.xi
        rhs = np.stack(
            [-sum(1j * xi[j] * _flux(fluxes, i, j) for j in range(3)) for i in range(3)]
        )
        return leray_stack(rhs, self._table), velocity_max

    def _dissipation_rate(self, state: np.ndarray) -> np.ndarray:
        """2‖∇_h u‖²."""
        return np.array([2.0 * float(np.sum(self._table.xi_h_sq * np.abs(state) ** 2))])

    def _project(self, state: np.ndarray) -> np.ndarray:
        return leray_stack(state, self._table)

    def _admit(self, u: VecField) -> VecField:
        """Проверка сетки и бездивергентности; при деалиасинге поле усекается до полосы 2/3."""
        if u.grid != self.grid:
            raise FieldError("Поле задано на другой сетке")
        residual = u.divergence_residual()
        if residual > get_settings().divergence_tolerance:
            raise FieldError(f"Начальное поле не бездивергентно: невязка {residual:.3e}")
        if not self.config.dealias:
            return u
        return truncate_to_dealias_band(u)[0]

    def step(self, u: VecField, dt: Optional[float] = None) -> VecField:
        """Один шаг IF-RK4 (по умолчанию с шагом из конфигурации)."""
        u = self._admit(u)
        new_state, _, _ = self.advance(u.stack(), dt or self.config.dt)
        return VecField.from_stack(self.grid, new_state, divergence_free=True, reality=u.reality)

    def iterate(self, u0: VecField) -> Iterator[SolverStep]:
        """
        Шаги интегрирования до горизонта; первым выдаётся начальное состояние,
        усечённое до полосы деалиасинга.

        Raises:
            CFLViolationError: При нарушении условия CFL
            TruncationError: u0 заметно выходит за полосу деалиасинга
        """
        u0 = self._admit(u0)
        n_steps, dt = self.config.time_grid()
        state = u0.stack()
        reality = u0.reality
        energy0 = float(np.sum(np.abs(state) ** 2))
        dissipation = 0.0
        velocity_max = float(np.sqrt(np.max(np.sum(inverse(state, axes=(1, 2, 3)).real ** 2, axis=0))))
        solver_logger.info(
            f"Интегрирование запущено: {self.grid.describe()}, шагов {n_steps}, dt = {dt:.3e}"
        )
        yield SolverStep(0, 0.0, u0, energy0, 0.0, velocity_max, True)
        for step in range(1, n_steps + 1):
            t_prev = (step - 1) * dt
            state, dissipated, velocity_max = self.advance(state, dt, step, t_prev)
            dissipation += float(dissipated[0])
            t = step * dt
            monitor = step % self.config.monitor_every == 0 or step == n_steps
            u = VecField.from_stack(self.grid, state, divergence_free=True, reality=reality)
            energy = float(np.sum(np.abs(state) ** 2))
            if monitor:
                solver_logger.info(
                    f"Прогресс: шаг {step}/{n_steps}, t = {t:.4f}, энергия {energy:.6e}"
                )
            yield SolverStep(step, t, u, energy, dissipation, velocity_max, monitor)
        solver_logger.info(f"Интегрирование завершено: t = {n_steps * dt:.4f}")

    def integrate(
        self,
        u0: VecField,
        ledger: Optional[NormLedger] = None,
        on_monitor: Optional[Callable[[SolverStep, NormLedger], None]] = None,
        keep_states: bool = False,
    ) -> "SolveResult":
        """
        Интегрировать до горизонта, записывая энергетический баланс в журнал.

        Args:
            u0: Начальное поле
            ledger: Журнал норм (создаётся при отсутствии)
            on_monitor: Дополнительные записи в журнал в моменты мониторинга
            keep_states: Сохранять поля в моменты мониторинга (SolveResult.trajectory)

        Returns:
            SolveResult: Конечное поле, журнал и максимальный дрейф энергии
        """
        ledger = ledger or NormLedger(self.grid)
        trajectory = Trajectory(ledger) if keep_states else None
        energy0 = None
        max_drift = 0.0
        last: Optional[SolverStep] = None
        for record in self.iterate(u0):
            if energy0 is None:
                energy0 = record.energy
            drift = energy_drift(record.energy, record.dissipation, energy0)
            max_drift = max(max_drift, drift)
            if record.monitor:
                ledger.record(
                    record.t,
                    {
                        "energy": record.energy,
                        "dissipation": record.dissipation,
                        "energy_drift": drift,
                        "divergence_residual": record.u.divergence_residual(),
                        "velocity_max": record.velocity_max,
                    },
                )
                if trajectory is not None:
                    trajectory.append(record.t, record.u)
                if on_monitor is not None:
                    on_monitor(record, ledger)
            last = record
        assert last is not None
        return SolveResult(
            u_final=last.u,
            ledger=ledger,
            max_energy_drift=max_drift,
            t_final=last.t,
            trajectory=trajectory,
        )


def energy_drift(energy: float, dissipation: float, energy0: float) -> float:
    """|E(t) + D(t) - E(0)| относительно E(0) (абсолютно при E(0) = 0)."""
    scale = energy0 if energy0 > 0.0 else 1.0
    return abs(energy + dissipation - energy0) / scale


@dataclass
class SolveResult:
    u_final: VecField
    ledger: NormLedger
    max_energy_drift: float
    t_final: float
    trajectory: Optional[Trajectory] = None


def step_ans(u: VecField, dt: float, config: Optional[SolverConfig] = None) -> VecField:
    """
    Один шаг IF-RK4 для анизотропной системы.

    Args:
        u: Бездивергентное поле
        dt: Шаг по времени
        config: Параметры (CFL, деалиасинг)

    Returns:
        VecField: Поле после шага, спроецированное на бездивергентные

    Raises:
        CFLViolationError: dt превышает адвективный предел
    """
    if dt <= 0:
        raise ValueError(f"Шаг по времени должен быть положительным: {dt}")
    return AnisotropicSolver(u.grid, config).step(u, dt)


# Послойная двумерная система


def layers_from_fields(grid: Grid, fields: Sequence[Field]) -> np.ndarray:
    """Коэффициенты по x_h и значения в узлах x₃: массив (k, n_h, n_h, n_v)."""
    return inverse(np.stack([f.coeffs for f in fields]), axes=(3,))


def fields_from_layers(grid: Grid, layers: np.ndarray, reality: bool = True) -> Tuple[Field, ...]:
    coeffs = forward(layers, axes=(3,))
    return tuple(Field(grid, coeffs[i], reality) for i in range(coeffs.shape[0]))


def horizontal_divergence_residual(grid: Grid, layers: np.ndarray) -> float:
    """max|ξ_h·ĉ| / max|ĉ| по всем слоям."""
    table = wavenumbers(grid)
    scale = float(np.max(np.abs(layers))) if layers.size else 0.0
    if scale == 0.0:
        return 0.0
    div = table.xi1 * layers[0] + table.xi2 * layers[1]
    return float(np.max(np.abs(div))) / scale


def _leray_h(stack: np.ndarray, table: WavenumberTable) -> np.ndarray:
    xi_sq = table.xi_h_odd_sq
    safe = np.where(xi_sq > 0.0, xi_sq, 1.0)
    factor = np.where(xi_sq > 0.0, (table.xi1 * stack[0] + table.xi2 * stack[1]) / safe, 0.0)
    return np.stack([stack[0] - table.xi1 * factor, stack[1] - table.xi2 * factor])


@dataclass
class LayeredStep:
    """Состояние послойного интегратора."""

    step: int
    t: float
    layers: np.ndarray
    layer_energy: np.ndarray
    layer_dissipation: np.ndarray
    d3_energy: np.ndarray
    d3_dissipation: np.ndarray
    monitor: bool


@dataclass
class LayeredTrajectory:
    """
    Траектория послойной системы в моменты мониторинга.

    layer_energy[i][m] = ‖ū^h(t_i, ·, x₃^m)‖²_{L²_h}, layer_dissipation - накопленный
    2∫‖∇_hū^h‖²_{L²_h}; d3_* - то же для ∂₃ū^h послойно.
    """

    grid: Grid
    times: List[float] = field(default_factory=list)
    layer_energy: List[np.ndarray] = field(default_factory=list)
    layer_dissipation: List[np.ndarray] = field(default_factory=list)
    d3_energy: List[np.ndarray] = field(default_factory=list)
    d3_dissipation: List[np.ndarray] = field(default_factory=list)
    final: Optional[Tuple[Field, ...]] = None

    def append(self, record: LayeredStep) -> None:
        self.times.append(record.t)
        self.layer_energy.append(record.layer_energy)
        self.layer_dissipation.append(record.layer_dissipation)
        self.d3_energy.append(record.d3_energy)
        self.d3_dissipation.append(record.d3_dissipation)

    def layer_drift(self) -> np.ndarray:
        """Максимальный по времени относительный дрейф баланса (4.1) для каждого слоя."""
        if not self.times:
            return np.zeros(0)
        e0 = self.layer_energy[0]
        scale = np.where(e0 > 0.0, e0, 1.0)
        balance = np.array(self.layer_energy) + np.array(self.layer_dissipation) - e0
        return np.max(np.abs(balance), axis=0) / scale

    def d3_quantity(self) -> np.ndarray:
        """Послойно ‖∂₃ū^h(t)‖²_{L²_h} + ∫‖∇_h∂₃ū^h‖²_{L²_h}, массив (время, слой)."""
        return np.array(self.d3_energy) + 0.5 * np.array(self.d3_dissipation)


class LayeredNavierStokes2D(_IntegratingFactorRK4):
    """
    Независимые двумерные системы Навье-Стокса в каждом узле x₃.

    Состояние - горизонтальные коэффициенты Фурье в каждом вертикальном узле;
    вертикальный деалиасинг не применяется, слои не взаимодействуют.
    """

    def __init__(self, grid: Grid, config: Optional[SolverConfig] = None):
        self.grid = grid
        self._table = wavenumbers(grid)
        super().__init__(self._table.xi_h_sq, config or SolverConfig(), grid.spacing_h)
        self._mask = (
            self._table.dealias_mask_h if self.config.dealias else np.ones((grid.n_h, grid.n_h, 1))
        )

    def _nonlinear(self, state: np.ndarray) -> Tuple[np.ndarray, float]:
        physical = inverse(state, axes=(1, 2)).real
        velocity_max = float(np.sqrt(np.max(np.sum(physical**2, axis=0))))
        fluxes = _symmetric_flux(physical, _PAIRS_2D, (0, 1), self._mask)
        xi = (self._table.xi1, self._table.xi2)
        rhs = np.stack(
            [-sum(1j * xi[j] * _flux(fluxes, i, j) for j in range(2)) for i in range(2)]
        )
        return _leray_h(rhs, self._table), velocity_max

    def _d3_layers(self, state: np.ndarray) -> np.ndarray:
        """∂₃ū послойно (спектральное дифференцирование по x₃)."""
        return inverse(1j * self._table.xi3 * forward(state, axes=(3,)), axes=(3,))

    def _dissipation_rate(self, state: np.ndarray) -> np.ndarray:
        """Послойно 2‖∇_hū‖²_{L²_h}, затем послойно 2‖∇_h∂₃ū‖²_{L²_h}."""
        per_layer = 2.0 * np.sum(self._table.xi_h_sq * np.abs(state) ** 2, axis=(0, 1, 2))
        d3 = 2.0 * np.sum(self._table.xi_h_sq * np.abs(self._d3_layers(state)) ** 2, axis=(0, 1, 2))
        return np.concatenate([per_layer, d3])

    def _project(self, state: np.ndarray) -> np.ndarray:
        return _leray_h(state, self._table)

    def layer_energy(self, state: np.ndarray) -> np.ndarray:
        return np.sum(np.abs(state) ** 2, axis=(0, 1, 2))

    def d3_energy(self, state: np.ndarray) -> np.ndarray:
        return np.sum(np.abs(self._d3_layers(state)) ** 2, axis=(0, 1, 2))

    def iterate(self, ubar0: Sequence[Field]) -> Iterator[LayeredStep]:
        """
        Шаги послойного интегрирования; первым выдаётся начальное состояние.

        Raises:
            FieldError: div_h ū₀ не равна нулю в каком-либо слое
            CFLViolationError: При нарушении условия CFL
        """
        if len(ubar0) != 2 or any(c.grid != self.grid for c in ubar0):
            raise FieldError("Ожидались две горизонтальные компоненты на сетке решателя")
        state = layers_from_fields(self.grid, ubar0)
        residual = horizontal_divergence_residual(self.grid, state)
        if residual > get_settings().divergence_tolerance:
            raise FieldError(f"div_h ū₀ не равна нулю: невязка {residual:.3e}")
        n_steps, dt = self.config.time_grid()
        n_v = self.grid.n_v
        accumulated = np.zeros(2 * n_v)
        yield LayeredStep(
            0, 0.0, state, self.layer_energy(state), accumulated[:n_v].copy(),
            self.d3_energy(state), accumulated[n_v:].copy(), True,
        )
        for step in range(1, n_steps + 1):
            state, dissipated, _ = self.advance(state, dt, step, (step - 1) * dt)
            accumulated = accumulated + dissipated
            monitor = step % self.config.monitor_every == 0 or step == n_steps
            yield LayeredStep(
                step,
                step * dt,
                state,
                self.layer_energy(state),
                accumulated[:n_v].copy(),
                self.d3_energy(state),
                accumulated[n_v:].copy(),
                monitor,
            )

    def to_fields(self, layers: np.ndarray) -> Tuple[Field, Field]:
        u1, u2 = fields_from_layers(self.grid, layers)
        return u1, u2


def solve_2dns_layers(
    ubar0: Sequence[Field], config: Optional[SolverConfig] = None
) -> LayeredTrajectory:
    """
    Решить послойную двумерную систему с x₃ в роли параметра.

    Args:
        ubar0: Горизонтальные компоненты ū₀^h с div_h ū₀^h = 0 в каждом слое
        config: Параметры интегрирования

    Returns:
        LayeredTrajectory: Послойные энергии и диссипации в моменты мониторинга
    """
    grid = ubar0[0].grid
    solver = LayeredNavierStokes2D(grid, config)
    trajectory = LayeredTrajectory(grid)
    last: Optional[LayeredStep] = None
    for record in solver.iterate(ubar0):
        if record.monitor:
            trajectory.append(record)
        last = record
    assert last is not None
    trajectory.final = solver.to_fields(last.layers)
    logger.info(
        f"Послойная система решена: {len(trajectory.times)} моментов, "
        f"дрейф баланса {float(np.max(trajectory.layer_drift(), initial=0.0)):.3e}"
    )
    return trajectory


def layer_pressure(ubar: Sequence[Field], dealiased: bool = True) -> Field:
    """
    Послойное давление: -Δ_h p̄ = div_h(ū·∇_hū) = ∂_i∂_j(ū_iū_j).

    Деалиасинг только горизонтальный, чтобы слои не смешивались.
    """
    grid = ubar[0].grid
    table = wavenumbers(grid)
    physical = np.stack([c.to_physical().real for c in ubar[:2]])
    mask = table.dealias_mask_h if dealiased else np.ones((grid.n_h, grid.n_h, 1))
    fluxes = _symmetric_flux(physical, _PAIRS_2D, (0, 1, 2), mask)
    xi = (table.xi1, table.xi2)
    source = sum(xi[i] * xi[j] * _flux(fluxes, i, j) for i in range(2) for j in range(2))
    xi_sq = table.xi_h_odd_sq
    coeffs = np.where(xi_sq > 0.0, -source / np.where(xi_sq > 0.0, xi_sq, 1.0), 0.0)
    return Field(grid, coeffs)


def pressure_diagnostic(u: VecField, dealiased: bool = True) -> Field:
    """
    Давление из -Δp = div(u·∇u) = ∂_i∂_j(u_iu_j) на модах ξ ≠ 0; нулевая мода равна 0.

    Args:
        u: Поле скорости
        dealiased: Маска 2/3 на произведениях

    Returns:
        Field: Давление
    """
    grid = u.grid
    table = wavenumbers(grid)
    physical = np.stack([c.to_physical().real for c in u.components])
    mask = table.dealias_mask if dealiased else np.ones(grid.shape)
    fluxes = _symmetric_flux(physical, _PAIRS_3D, (0, 1, 2), mask)
    xi = table.xi
    source = sum(xi[i] * xi[j] * _flux(fluxes, i, j) for i in range(3) for j in range(3))
    xi_sq = table.xi_odd_sq
    coeffs = np.where(xi_sq > 0.0, -source / np.where(xi_sq > 0.0, xi_sq, 1.0), 0.0)
    return Field(grid, coeffs)


def advection(u: VecField, dealiased: bool = True) -> Tuple[Field, Field, Field]:
    """div(u⊗u) = u·∇u для бездивергентного u, с маской 2/3 на произведениях."""
    grid = u.grid
    table = wavenumbers(grid)
    physical = np.stack([c.to_physical().real for c in u.components])
    mask = table.dealias_mask if dealiased else np.ones(grid.shape)
    fluxes = _symmetric_flux(physical, _PAIRS_3D, (0, 1, 2), mask)
    xi = table.xi
    return tuple(  # type: ignore[return-value]
        Field(grid, sum(1j * xi[j] * _flux(fluxes, i, j) for j in range(3))) for i in range(3)
    )


def layer_advection(ubar: Sequence[Field], dealiased: bool = True) -> Tuple[Field, Field]:
    """div_h(ū⊗ū) = ū·∇_hū послойно, с горизонтальной маской 2/3."""
    grid = ubar[0].grid
    table = wavenumbers(grid)
    physical = np.stack([c.to_physical().real for c in ubar[:2]])
    mask = table.dealias_mask_h if dealiased else np.ones((grid.n_h, grid.n_h, 1))
    fluxes = _symmetric_flux(physical, _PAIRS_2D, (0, 1, 2), mask)
    xi = (table.xi1, table.xi2)
    first, second = (
        Field(grid, sum(1j * xi[j] * _flux(fluxes, i, j) for j in range(2))) for i in range(2)
    )
    return first, second
