"""
Сервис разложения решения u = (ū^h, 0) + v, v³ = v_F + w.

ū^h решает послойную двумерную систему с данными u^h_{0,curl}, v получается
вычитанием, v_F = e^{tΔ_h}u³_{0,hh}. В моменты мониторинга журнал получает
нормы всех каналов, накопители Шемена-Лерне, весовые функции и невязки
уравнений для w и v^h.
"""

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Deque, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field as PydField

from ..littlewood_paley.blocks import split_lh_hh
from ..littlewood_paley.ladder import DyadicLadder, build_ladder
from ..norms.besov import gradient_h_components, norm_B0half, norm_B4_0half, norm_B4_neg
from ..norms.ledger import BlockKind, NormLedger
from ..spectral.fields import Field, VecField
from ..spectral.operators import (
    HorizontalSymbol,
    horizontal_heat,
    horizontal_multiplier,
    spectral_derivative,
)
from ..spectral.transforms import wavenumbers
from .initial_data_service import biot_savart_split, freq_cut_N
from .solver_service import (
    AnisotropicSolver,
    LayeredNavierStokes2D,
    SolverConfig,
    advection,
    energy_drift,
    layer_advection,
    layer_pressure,
    pressure_diagnostic,
    truncate_to_dealias_band,
)

logger = logging.getLogger(__name__)

BOOTSTRAP_COLUMN = "vh_B_t"


class DecompositionConstants(BaseModel):
    """Константы мониторинга разложения."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    C_threshold: float = PydField(default=1.0, gt=0, description="C в пороге C‖v^h‖ <= 1/16")
    lam: float = PydField(default=1.0, gt=0, description="λ при весе f(t)")
    kappa: float = PydField(default=1.0, gt=0, description="κ при весе f^h(t)")
    gamma: float = PydField(default=1.0, gt=0, description="γ при весе g^h(t)")
    mu: float = PydField(default=1.0, gt=0, description="μ при весе ħ(t)")
    N: int = PydField(default=4, ge=2, description="N частотной срезки для ū₁")
    split_ubar: bool = PydField(default=True, description="Интегрировать ū₁ и вычислять f^h")


@dataclass
class DecompositionState:
    """Каналы разложения в момент t."""

    t: float
    u: VecField
    ubar: Tuple[Field, Field]
    v: VecField
    vF: Field
    w: Field
    p: Field


@dataclass
class BootstrapStatus:
    """Первое пересечение порога 1/(16C) и запаса 1/(32C); None - пересечения нет."""

    threshold: float
    margin: float
    crossing_time: Optional[float]
    margin_crossing_time: Optional[float]
    max_value: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "threshold": self.threshold,
            "margin": self.margin,
            "crossing_time": "never" if self.crossing_time is None else self.crossing_time,
            "margin_crossing_time": (
                "never" if self.margin_crossing_time is None else self.margin_crossing_time
            ),
            "max_value": self.max_value,
        }


@dataclass
class DecompositionResult:
    """Итог разложения: журнал, конечное состояние, проверки начальных данных."""

    ledger: NormLedger
    final: DecompositionState
    bootstrap: BootstrapStatus
    initial_checks: Dict[str, float] = field(default_factory=dict)
    residual_times: List[float] = field(default_factory=list)
    w_residuals: List[float] = field(default_factory=list)
    vh_residuals: List[float] = field(default_factory=list)
    max_energy_drift: float = 0.0

    def summary(self) -> Dict[str, Any]:
        """Сводка для decomposition.json."""
        return {
            "t_final": self.final.t,
            "monitor_times": len(self.ledger),
            "initial_checks": self.initial_checks,
            "bootstrap": self.bootstrap.to_dict(),
            "max_w_residual": max(self.w_residuals, default=0.0),
            "max_vh_residual": max(self.vh_residuals, default=0.0),
            "max_energy_drift": self.max_energy_drift,
            "final_norms": {
                name: self.ledger.last(name)
                for name in ("vh_B_t", "w_B_t", "ubar_B_t", "vF_B4neg_t", "int_f", "int_hbar")
                if name in self.ledger.columns
            },
            "cutoff_hash": self.ledger.cutoff_hash,
            "config_hash": self.ledger.config_hash,
        }


def bootstrap_monitor(
    ledger: NormLedger, C_threshold: float, column: str = BOOTSTRAP_COLUMN
) -> BootstrapStatus:
    """
    Первое время, когда C·‖v^h‖_{B^{0,1/2}(t)} достигает 1/16 (и запаса 1/32).

    Время пересечения находится линейной интерполяцией между моментами
    мониторинга.

    Args:
        ledger: Журнал со столбцом column
        C_threshold: Константа C > 0
        column: Имя столбца

    Returns:
        BootstrapStatus: Пороги, времена пересечения (None - не пересекается)
    """
    if C_threshold <= 0:
        raise ValueError(f"Константа порога должна быть положительной: {C_threshold}")
    threshold = 1.0 / (16.0 * C_threshold)
    margin = 1.0 / (32.0 * C_threshold)
    times = ledger.times
    values = ledger.column(column) if column in ledger.columns else np.zeros(0)
    valid = ~np.isnan(values)
    times, values = times[valid], values[valid]
    status = BootstrapStatus(
        threshold=threshold,
        margin=margin,
        crossing_time=_first_crossing(times, values, threshold),
        margin_crossing_time=_first_crossing(times, values, margin),
        max_value=float(np.max(values, initial=0.0)),
    )
    if status.crossing_time is not None:
        logger.warning(
            f"Порог бутстрепа 1/(16C) = {threshold:.4e} пересечён при t = {status.crossing_time:.4f}"
        )
    return status


def _first_crossing(times: np.ndarray, values: np.ndarray, level: float) -> Optional[float]:
    above = np.nonzero(values >= level)[0]
    if above.size == 0:
        return None
    i = int(above[0])
    if i == 0:
        return float(times[0])
    t0, t1 = times[i - 1], times[i]
    v0, v1 = values[i - 1], values[i]
    return float(t0 + (level - v0) * (t1 - t0) / (v1 - v0))


@dataclass
class _Snapshot:
    step: int
    t: float
    u: VecField
    ubar: Tuple[Field, Field]
    w: Field
    vh: Tuple[Field, Field]


def _time_derivative(
    samples: Sequence[_Snapshot], index: int, extract, decay: np.ndarray
) -> np.ndarray:
    """
    Конечная разность по трём (или двум) последовательным снимкам в точке index.

    Производная берётся от e^{(s-t)|ξ_h|²}ĉ(s); при decay = |ξ_h|² это
    ∂_t c - Δ_h c, при decay = 0 - обычная ∂_t c.
    """
    t = samples[index].t
    values = [np.exp((s.t - t) * decay) * extract(s) for s in samples]
    if len(samples) == 2:
        return (values[1] - values[0]) / (samples[1].t - samples[0].t)
    dt = samples[1].t - samples[0].t
    if index == 1:
        return (values[2] - values[0]) / (2.0 * dt)
    if index == 0:
        return (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * dt)
    return (3.0 * values[2] - 4.0 * values[1] + values[0]) / (2.0 * dt)


def _norm(coeffs: np.ndarray) -> float:
    return float(np.sqrt(np.sum(np.abs(coeffs) ** 2)))


class DecompositionService:
    """
    Интегрирование u и ū^h на общей сетке времени с мониторингом каналов.
    """

    def __init__(
        self,
        solver_config: Optional[SolverConfig] = None,
        constants: Optional[DecompositionConstants] = None,
        ladder: Optional[DyadicLadder] = None,
        config_hash: str = "",
    ):
        self.solver_config = solver_config or SolverConfig()
        self.constants = constants or DecompositionConstants()
        self._ladder = ladder
        self.config_hash = config_hash

    def _initial_checks(
        self, u0: VecField, ubar0: Tuple[Field, Field], vF0: Field, ladder: DyadicLadder
    ) -> Dict[str, float]:
        """v₀^h = -∇_hΔ_h⁻¹∂₃u₀³ и w₀ = u³_{0,lh}."""
        table = wavenumbers(u0.grid)
        scale = max(u0.l2_norm(), np.finfo(float).tiny)
        target = horizontal_multiplier(
            spectral_derivative(u0.vertical, 3), HorizontalSymbol.GRAD_INV_LAPLACIAN_H
        )
        vh0 = [u0.components[i] - ubar0[i] for i in range(2)]
        v0_residual = math.sqrt(sum((vh0[i] + target.fields[i]).l2_norm() ** 2 for i in range(2)))
        lh, _ = split_lh_hh(u0.vertical, ladder)
        w0 = u0.vertical - vF0
        return {
            "v0h_identity_residual": v0_residual / scale,
            "w0_identity_residual": (w0 - lh).l2_norm() / scale,
            "ubar0_hdiv_residual": float(np.max(np.abs(table.xi1 * ubar0[0].coeffs + table.xi2 * ubar0[1].coeffs)))
            / max(max(c.max_abs() for c in u0.components), np.finfo(float).tiny),
        }

    # Мониторинг

    def _channel_norms(
        self, state: DecompositionState, ubar1: Optional[Tuple[Field, Field]], ladder: DyadicLadder
    ) -> Tuple[Dict[str, float], Dict[str, Any]]:
        ubar = list(state.ubar)
        vh = list(state.v.horizontal)
        grad_ubar = gradient_h_components(ubar)
        inv_d3_ubar = [
            horizontal_multiplier(c, HorizontalSymbol.D3_INV_LAMBDA_H).field for c in ubar
        ]
        d3_ubar = [spectral_derivative(c, 3) for c in ubar]
        values = {
            "ubar_b0": norm_B0half(ubar, ladder).value,
            "grad_ubar_b0": norm_B0half(grad_ubar, ladder).value,
            "ubar_b4": norm_B4_0half(ubar, ladder).value,
            "inv_lambda_d3_ubar_b0": norm_B0half(inv_d3_ubar, ladder).value,
            "d3_ubar_b0": norm_B0half(d3_ubar, ladder).value,
            "vh_b0": norm_B0half(vh, ladder).value,
            "grad_vh_b0": norm_B0half(gradient_h_components(vh), ladder).value,
            "w_b0": norm_B0half(state.w, ladder).value,
            "grad_w_b0": norm_B0half(gradient_h_components(state.w), ladder).value,
            "vF_b4": norm_B4_0half(state.vF, ladder).value,
            "vF_b4neg": norm_B4_neg(state.vF, ladder).value,
        }
        fields: Dict[str, Any] = {
            "ubar": ubar,
            "grad_ubar": grad_ubar,
            "inv_lambda_d3_ubar": inv_d3_ubar,
            "d3_ubar": d3_ubar,
            "vh": vh,
        }
        if ubar1 is not None:
            ubar2 = [state.ubar[i] - ubar1[i] for i in range(2)]
            values["ubar1_b0"] = norm_B0half(list(ubar1), ladder).value
            values["grad_ubar2_b0"] = norm_B0half(gradient_h_components(ubar2), ladder).value
            fields["ubar2"] = ubar2
        return values, fields

    def _weights(self, values: Dict[str, float]) -> Dict[str, float]:
        """Весовые функции f, g^h, ħ, f^h по нормам каналов."""
        weights = {
            "f": values["w_b0"] ** 2 * values["grad_w_b0"] ** 2
            + values["ubar_b4"] ** 4
            + values["vF_b4"] ** 4,
            "g_h": values["ubar_b0"] ** 2 * values["grad_ubar_b0"] ** 2,
            "hbar": values["ubar_b4"] ** 4,
        }
        if "ubar1_b0" in values:
            weights["f_h"] = values["ubar1_b0"] ** 2 * values["grad_ubar2_b0"] ** 2
        return weights

    def _residuals(
        self, window: Sequence[_Snapshot], index: int, decay: np.ndarray
    ) -> Tuple[float, float]:
        """Относительные невязки уравнений для w и v^h."""
        snap = window[index]
        u = snap.u
        flux = advection(u)
        p = pressure_diagnostic(u)
        p_bar = layer_pressure(snap.ubar)
        layer_flux = layer_advection(snap.ubar)

        heat_w = _time_derivative(window, index, lambda s: s.w.coeffs, decay)
        plain_w = _time_derivative(window, index, lambda s: s.w.coeffs, np.zeros_like(decay))
        lap_w = decay * snap.w.coeffs
        d3p = spectral_derivative(p, 3).coeffs
        w_res = heat_w + flux[2].coeffs + d3p
        w_scale = max(_norm(plain_w), _norm(lap_w), flux[2].l2_norm(), _norm(d3p))

        vh_res_sq = 0.0
        vh_scale = 0.0
        pressure_gap = p - p_bar
        for i in range(2):
            heat_v = _time_derivative(window, index, lambda s, i=i: s.vh[i].coeffs, decay)
            plain_v = _time_derivative(
                window, index, lambda s, i=i: s.vh[i].coeffs, np.zeros_like(decay)
            )
            grad_gap = spectral_derivative(pressure_gap, i + 1).coeffs
            res = heat_v + flux[i].coeffs - layer_flux[i].coeffs + grad_gap
            vh_res_sq += _norm(res) ** 2
            vh_scale = max(
                vh_scale,
                _norm(plain_v),
                _norm(decay * snap.vh[i].coeffs),
                flux[i].l2_norm(),
                layer_flux[i].l2_norm(),
                _norm(grad_gap),
            )
        w_rel = _norm(w_res) / w_scale if w_scale > 0.0 else 0.0
        vh_rel = math.sqrt(vh_res_sq) / vh_scale if vh_scale > 0.0 else 0.0
        return w_rel, vh_rel

    @staticmethod
    def _stencil(window: Sequence[_Snapshot], step: int, final: bool) -> Optional[Tuple[List[_Snapshot], int]]:
        steps = [s.step for s in window]
        if step not in steps:
            return None
        i = steps.index(step)
        if 0 < i < len(window) - 1:
            return list(window)[i - 1 : i + 2], 1
        if i == 0 and len(window) == 3:
            return list(window), 0
        if not final:
            return None
        if i == len(window) - 1 and len(window) == 3:
            return list(window), 2
        if len(window) == 2:
            return list(window), i
        return None

    # Основной цикл

    def run(self, u0: VecField) -> DecompositionResult:
        """
        Выполнить разложение на горизонте конфигурации.

        Args:
            u0: Бездивергентное начальное поле

        Returns:
            DecompositionResult: Журнал, конечное состояние и статус бутстрепа

        Raises:
            CFLViolationError: При нарушении условия CFL в любом из интеграторов
        """
        grid = u0.grid
        ladder = self._ladder or build_ladder(grid)
        constants = self.constants
        u0, _ = truncate_to_dealias_band(u0)
        ledger = NormLedger(grid, ladder, self.config_hash)

        ubar0, _ = biot_savart_split(u0.horizontal)
        _, u3_hh = split_lh_hh(u0.vertical, ladder)
        initial_checks = self._initial_checks(u0, ubar0, u3_hh, ladder)
        logger.info(
            f"Разложение: невязки начальных тождеств v₀ {initial_checks['v0h_identity_residual']:.3e}, "
            f"w₀ {initial_checks['w0_identity_residual']:.3e}"
        )

        solver = AnisotropicSolver(grid, self.solver_config)
        layered = LayeredNavierStokes2D(grid, self.solver_config)
        streams = [solver.iterate(u0), layered.iterate(ubar0)]
        if constants.split_ubar:
            ubar1_0 = tuple(c - freq_cut_N(c, constants.N) for c in ubar0)
            split_solver = LayeredNavierStokes2D(grid, self.solver_config)
            streams.append(split_solver.iterate(ubar1_0))

        decay = np.broadcast_to(wavenumbers(grid).xi_h_sq, grid.shape)
        window: Deque[_Snapshot] = deque(maxlen=3)
        pending: List[Tuple[int, float, Dict[str, float]]] = []
        result = DecompositionResult(
            ledger=ledger,
            final=None,  # type: ignore[arg-type]
            bootstrap=None,  # type: ignore[arg-type]
            initial_checks=initial_checks,
        )
        integrals = {"f": 0.0, "g_h": 0.0, "hbar": 0.0, "f_h": 0.0}
        previous_weights: Optional[Tuple[float, Dict[str, float]]] = None
        energy0: Optional[float] = None
        state: Optional[DecompositionState] = None

        for records in zip(*streams):
            record, layer_record = records[0], records[1]
            t = record.t
            ubar = layered.to_fields(layer_record.layers)
            vF = horizontal_heat(u3_hh, t)
            w = record.u.vertical - vF
            vh = (record.u.components[0] - ubar[0], record.u.components[1] - ubar[1])
            window.append(_Snapshot(record.step, t, record.u, ubar, w, vh))
            if energy0 is None:
                energy0 = record.energy
            drift = energy_drift(record.energy, record.dissipation, energy0)
            result.max_energy_drift = max(result.max_energy_drift, drift)

            if record.monitor:
                v = VecField((vh[0], vh[1], record.u.vertical))
                state = DecompositionState(t, record.u, ubar, v, vF, w, pressure_diagnostic(record.u))
                ubar1 = split_solver.to_fields(records[2].layers) if constants.split_ubar else None
                values, fields = self._channel_norms(state, ubar1, ladder)
                weights = self._weights(values)
                if previous_weights is not None:
                    t_prev, w_prev = previous_weights
                    for name, value in weights.items():
                        integrals[name] += 0.5 * (t - t_prev) * (w_prev[name] + value)
                previous_weights = (t, weights)

                self._accumulate(ledger, t, state, fields, weights, integrals)
                row = dict(values)
                row.update(
                    {
                        "energy": record.energy,
                        "dissipation": record.dissipation,
                        "energy_drift": drift,
                        "divergence_residual": record.u.divergence_residual(),
                        "v_divergence_residual": _relative_divergence(v, record.u),
                        "velocity_max": record.velocity_max,
                    }
                )
                row.update(weights)
                row.update({f"int_{name}": integrals[name] for name in weights})
                row.update(self._cl_columns(ledger, integrals, constants))
                pending.append((record.step, t, row))
            self._flush(pending, window, decay, ledger, result, final=False)

        self._flush(pending, window, decay, ledger, result, final=True)
        assert state is not None
        result.final = state
        result.bootstrap = bootstrap_monitor(ledger, constants.C_threshold)
        logger.info(
            f"Разложение завершено: {len(ledger)} моментов, "
            f"max невязка w {max(result.w_residuals, default=0.0):.3e}"
        )
        return result

    def _accumulate(
        self,
        ledger: NormLedger,
        t: float,
        state: DecompositionState,
        fields: Dict[str, Any],
        weights: Dict[str, float],
        integrals: Dict[str, float],
    ) -> None:
        """Обновить накопители L̃^p_T и взвешенные накопители L̃²_{T,f}."""
        c = self.constants
        ledger.cl_accumulate(math.inf, "ubar", t, fields["ubar"])
        ledger.cl_accumulate(2, "grad_ubar", t, fields["grad_ubar"])
        ledger.cl_accumulate(4, "ubar", t, fields["ubar"], BlockKind.B4_0HALF)
        ledger.cl_accumulate(math.inf, "inv_lambda_d3_ubar", t, fields["inv_lambda_d3_ubar"])
        ledger.cl_accumulate(
            2, "grad_inv_lambda_d3_ubar", t, gradient_h_components(fields["inv_lambda_d3_ubar"])
        )
        ledger.cl_accumulate(math.inf, "d3_ubar", t, fields["d3_ubar"])
        ledger.cl_accumulate(2, "grad_d3_ubar", t, gradient_h_components(fields["d3_ubar"]))
        ledger.cl_accumulate(math.inf, "vh", t, fields["vh"])
        ledger.cl_accumulate(2, "grad_vh", t, gradient_h_components(fields["vh"]))
        ledger.cl_accumulate(math.inf, "w", t, state.w)
        ledger.cl_accumulate(2, "grad_w", t, gradient_h_components(state.w))
        ledger.cl_accumulate(math.inf, "vF", t, state.vF, BlockKind.B4_NEG)
        ledger.cl_accumulate(2, "grad_vF", t, gradient_h_components(state.vF), BlockKind.B4_NEG)

        damp_f = math.exp(-c.lam * integrals["f"])
        damp_g = math.exp(-c.gamma * integrals["g_h"])
        damp_hbar = math.exp(-c.mu * integrals["hbar"])
        ledger.weighted_cl_accumulate("vh_f", weights["f"], t, [a * damp_f for a in fields["vh"]])
        ledger.weighted_cl_accumulate("w_f", weights["f"], t, state.w * damp_f)
        ledger.weighted_cl_accumulate(
            "vh_hbar", weights["hbar"], t, [a * damp_hbar for a in fields["vh"]]
        )
        ledger.weighted_cl_accumulate(
            "inv_lambda_d3_ubar_g",
            weights["g_h"],
            t,
            [a * damp_g for a in fields["inv_lambda_d3_ubar"]],
        )
        if "ubar2" in fields:
            damp_fh = math.exp(-c.kappa * integrals["f_h"])
            ledger.weighted_cl_accumulate(
                "ubar2_fh", weights["f_h"], t, [a * damp_fh for a in fields["ubar2"]]
            )

    @staticmethod
    def _cl_columns(
        ledger: NormLedger, integrals: Dict[str, float], c: DecompositionConstants
    ) -> Dict[str, float]:
        """Нормы B^{0,1/2}(t), B₄^{-1/2,1/2}(t) и взвешенные нормы на текущий момент."""
        columns = {
            "ubar_B_t": ledger.cl_norm(math.inf, "ubar") + ledger.cl_norm(2, "grad_ubar"),
            "ubar_L4_b4": ledger.cl_norm(4, "ubar", BlockKind.B4_0HALF),
            "inv_lambda_d3_ubar_B_t": ledger.cl_norm(math.inf, "inv_lambda_d3_ubar")
            + ledger.cl_norm(2, "grad_inv_lambda_d3_ubar"),
            "d3_ubar_B_t": ledger.cl_norm(math.inf, "d3_ubar") + ledger.cl_norm(2, "grad_d3_ubar"),
            "vh_B_t": ledger.cl_norm(math.inf, "vh") + ledger.cl_norm(2, "grad_vh"),
            "w_B_t": ledger.cl_norm(math.inf, "w") + ledger.cl_norm(2, "grad_w"),
            "vF_B4neg_t": ledger.cl_norm(math.inf, "vF", BlockKind.B4_NEG)
            + ledger.cl_norm(2, "grad_vF", BlockKind.B4_NEG),
            "vh_weighted_f": ledger.weighted_norm("vh_f"),
            "w_weighted_f": ledger.weighted_norm("w_f"),
            "vh_weighted_hbar": ledger.weighted_norm("vh_hbar"),
            "inv_lambda_d3_ubar_weighted_g": ledger.weighted_norm("inv_lambda_d3_ubar_g"),
            "damping_f": math.exp(-c.lam * integrals["f"]),
            "damping_hbar": math.exp(-c.mu * integrals["hbar"]),
        }
        if c.split_ubar:
            columns["ubar2_weighted_fh"] = ledger.weighted_norm("ubar2_fh")
        return columns

    def _flush(
        self,
        pending: List[Tuple[int, float, Dict[str, float]]],
        window: Sequence[_Snapshot],
        decay: np.ndarray,
        ledger: NormLedger,
        result: DecompositionResult,
        final: bool,
    ) -> None:
        """Записать строки, для которых уже доступна конечная разность по времени."""
        while pending:
            step, t, row = pending[0]
            stencil = self._stencil(window, step, final)
            if stencil is None and not final:
                return
            if stencil is not None:
                w_rel, vh_rel = self._residuals(stencil[0], stencil[1], decay)
                row["w_residual"] = w_rel
                row["vh_residual"] = vh_rel
                result.residual_times.append(t)
                result.w_residuals.append(w_rel)
                result.vh_residuals.append(vh_rel)
            ledger.record(t, row)
            pending.pop(0)


def _relative_divergence(v: VecField, u: VecField) -> float:
    """max|ξ·v̂| относительно max|û|."""
    table = wavenumbers(v.grid)
    div = sum(1j * xi * c.coeffs for xi, c in zip(table.xi, v.components))
    scale = max(c.max_abs() for c in u.components)
    return float(np.max(np.abs(div))) / scale if scale > 0.0 else 0.0


def run_decomposition(
    u0: VecField,
    config: Optional[SolverConfig] = None,
    constants: Optional[DecompositionConstants] = None,
    ladder: Optional[DyadicLadder] = None,
    config_hash: str = "",
) -> DecompositionResult:
    """Разложение u = (ū^h, 0) + v с журналом величин мониторинга."""
    return DecompositionService(config, constants, ladder, config_hash).run(u0)
