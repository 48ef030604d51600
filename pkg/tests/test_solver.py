"""
Тесты решателя: IF-RK4 для анизотропной системы и послойная двумерная система.
"""

import math

import numpy as np
import pytest

from aniso_ns.services.decomposition_service import DecompositionConstants, run_decomposition
from aniso_ns.services.solver_service import (
    AnisotropicSolver,
    CFLViolationError,
    SolverConfig,
    TruncationError,
    advection,
    energy_drift,
    layer_pressure,
    pressure_diagnostic,
    solve_2dns_layers,
    step_ans,
    truncate_to_dealias_band,
)
from aniso_ns.spectral.fields import Field, FieldError, VecField
from aniso_ns.spectral.operators import horizontal_heat, leray_project

from .conftest import random_field, random_solenoidal, taylor_green_2d


class TestSolverConfig:
    """Сетка по времени."""

    def test_time_grid_divides_horizon(self):
        steps, dt = SolverConfig(dt=0.3, horizon=1.0).time_grid()
        assert steps == 4
        assert dt == pytest.approx(0.25)

    def test_zero_horizon(self):
        assert SolverConfig(dt=0.01, horizon=0.0).time_grid() == (0, 0.01)

    def test_exact_division(self):
        assert SolverConfig(dt=0.01, horizon=0.1).time_grid()[0] == 10

    def test_energy_drift(self):
        assert energy_drift(0.5, 0.5, 1.0) == 0.0
        assert energy_drift(0.0, 0.25, 0.0) == 0.25


class TestAnisotropicSolver:
    """Трёхмерный интегратор."""

    def test_taylor_green_decay(self, grid16):
        """Для двумерного вихря Тейлора-Грина нелинейность - градиент, E(t) = E(0)e^{-4t}."""
        u0 = taylor_green_2d(grid16)
        config = SolverConfig(dt=0.01, horizon=0.1, monitor_every=5)
        result = AnisotropicSolver(grid16, config).integrate(u0)
        energy = result.ledger.column("energy")
        times = result.ledger.times
        assert energy[0] == pytest.approx(0.5)
        assert np.allclose(energy, 0.5 * np.exp(-4.0 * times), rtol=1e-10)
        assert result.max_energy_drift < 1e-8
        assert result.t_final == pytest.approx(0.1)

    def test_horizontal_heat_flow(self, grid16):
        """u = (0, 0, g(x_h)) решает u₃' = Δ_h u₃."""
        x1, x2, _ = grid16.coordinates()
        g = Field.from_physical(grid16, np.cos(x1) + 0.5 * np.sin(2 * x2) * np.cos(x1))
        zero = Field.zeros(grid16)
        u0 = VecField((zero, zero, g), True)
        config = SolverConfig(dt=0.01, horizon=0.1)
        result = AnisotropicSolver(grid16, config).integrate(u0)
        expected = horizontal_heat(g, 0.1)
        assert np.allclose(result.u_final.vertical.coeffs, expected.coeffs, atol=1e-12)
        assert result.u_final.components[0].max_abs() < 1e-12

    def test_energy_balance_random_data(self, grid16):
        u0 = random_solenoidal(grid16, 31)
        config = SolverConfig(dt=0.005, horizon=0.05, monitor_every=2)
        result = AnisotropicSolver(grid16, config).integrate(u0)
        assert result.max_energy_drift < 1e-6
        assert np.all(result.ledger.column("divergence_residual") < 1e-10)
        assert np.all(np.diff(result.ledger.column("energy")) <= 0.0)

    def test_cfl_violation(self, grid16):
        config = SolverConfig(dt=0.5, horizon=1.0)
        with pytest.raises(CFLViolationError) as info:
            AnisotropicSolver(grid16, config).integrate(taylor_green_2d(grid16))
        assert info.value.step == 1
        assert info.value.velocity_max == pytest.approx(1.0)

    def test_monitor_rows(self, grid16):
        config = SolverConfig(dt=0.01, horizon=0.1, monitor_every=5)
        result = AnisotropicSolver(grid16, config).integrate(taylor_green_2d(grid16))
        assert len(result.ledger) == 3
        assert np.allclose(result.ledger.times, [0.0, 0.05, 0.1])
        assert result.trajectory is None

    def test_keep_states(self, grid16):
        config = SolverConfig(dt=0.01, horizon=0.1, monitor_every=5)
        result = AnisotropicSolver(grid16, config).integrate(taylor_green_2d(grid16), keep_states=True)
        assert result.trajectory is not None
        assert np.allclose(result.trajectory.times, result.ledger.times)
        assert result.trajectory.states[-1] is result.u_final

    def test_on_monitor_callback(self, grid16):
        seen = []
        config = SolverConfig(dt=0.01, horizon=0.1, monitor_every=5)
        AnisotropicSolver(grid16, config).integrate(
            taylor_green_2d(grid16), on_monitor=lambda record, _: seen.append(record.step)
        )
        assert seen == [0, 5, 10]

    def test_step_rejects_non_positive_dt(self, grid16):
        with pytest.raises(ValueError):
            step_ans(taylor_green_2d(grid16), 0.0)

    def test_step_rejects_divergent_input(self, grid16):
        components = tuple(random_field(grid16, 32 + i) for i in range(3))
        with pytest.raises(FieldError):
            step_ans(VecField(components), 0.01)

    def test_step_keeps_solenoidal(self, grid16):
        u = step_ans(random_solenoidal(grid16, 35), 0.01)
        assert u.divergence_free
        assert u.divergence_residual() < 1e-12


def with_vertical_mode(grid, amplitude: float, wavenumber: int = 6) -> VecField:
    """Тейлор-Грин плюс u₃ = A cos(m x₁); при m = 6 на сетке 16 мода лежит за срезкой 16/3."""
    u = taylor_green_2d(grid)
    x1, _, _ = grid.coordinates()
    u3 = Field.from_physical(grid, amplitude * np.cos(wavenumber * x1))
    return VecField((u.components[0], u.components[1], u3), True)


class TestDealiasTruncation:
    """Начальные данные вне полосы деалиасинга."""

    def test_small_tail_is_removed(self, grid16):
        masked, fraction = truncate_to_dealias_band(with_vertical_mode(grid16, 1e-3))
        assert fraction == pytest.approx(1e-3, rel=1e-5)
        assert masked.vertical.max_abs() < 1e-12
        assert masked.divergence_free

    def test_band_limited_data_untouched(self, grid16):
        u0 = taylor_green_2d(grid16)
        masked, fraction = truncate_to_dealias_band(u0)
        assert fraction < 1e-14
        assert np.allclose(masked.components[0].coeffs, u0.components[0].coeffs, rtol=0.0, atol=1e-15)

    def test_mass_outside_band_rejected(self, grid16):
        x1, _, _ = grid16.coordinates()
        zero = Field.zeros(grid16)
        u0 = VecField((zero, zero, Field.from_physical(grid16, np.cos(6 * x1))), True)
        with pytest.raises(TruncationError) as info:
            truncate_to_dealias_band(u0)
        assert info.value.removed_fraction == pytest.approx(1.0)
        with pytest.raises(FieldError):
            AnisotropicSolver(grid16, SolverConfig(dt=0.01, horizon=0.01)).integrate(u0)

    def test_simulate_and_decompose_share_initial_energy(self, grid16):
        """Оба пути видят одно и то же усечённое u₀."""
        u0 = with_vertical_mode(grid16, 1e-3)
        config = SolverConfig(dt=0.01, horizon=0.02, monitor_every=1)
        simulated = AnisotropicSolver(grid16, config).integrate(u0).ledger.column("energy")
        decomposed = run_decomposition(
            u0, config, DecompositionConstants(split_ubar=False)
        ).ledger.column("energy")
        assert simulated[0] == pytest.approx(0.5, rel=1e-12)
        assert decomposed[0] == pytest.approx(simulated[0], rel=1e-12)

    def test_step_truncates(self, grid16):
        u = step_ans(with_vertical_mode(grid16, 1e-3), 0.01)
        assert u.vertical.max_abs() < 1e-12

    def test_without_dealiasing_mode_survives(self, grid16):
        u = step_ans(with_vertical_mode(grid16, 1e-3), 0.01, SolverConfig(dealias=False))
        assert u.vertical.max_abs() > 1e-4


class TestDiagnostics:
    """Давление и адвекция."""

    def test_taylor_green_pressure(self, grid16):
        x1, x2, _ = grid16.coordinates()
        expected = -0.25 * (np.cos(2 * x1) + np.cos(2 * x2))
        u = taylor_green_2d(grid16)
        assert np.allclose(pressure_diagnostic(u).to_physical(), expected, atol=1e-12)
        assert np.allclose(layer_pressure(u.horizontal).to_physical(), expected, atol=1e-12)

    def test_taylor_green_advection_is_gradient(self, grid16):
        projected = leray_project(VecField(advection(taylor_green_2d(grid16))))
        assert all(c.max_abs() < 1e-13 for c in projected.components)


class TestLayeredSolver:
    """Послойная двумерная система."""

    def test_layers_balance(self, grid16):
        u = taylor_green_2d(grid16)
        config = SolverConfig(dt=0.01, horizon=0.1, monitor_every=5)
        trajectory = solve_2dns_layers(u.horizontal, config)
        assert len(trajectory.times) == 3
        assert float(np.max(trajectory.layer_drift())) < 1e-7
        energy = np.array(trajectory.layer_energy)
        assert np.all(energy[-1] < energy[0])
        assert np.allclose(energy[-1], energy[0] * math.exp(-0.4), rtol=1e-8)
        assert np.allclose(trajectory.d3_quantity(), 0.0, atol=1e-20)

    def test_final_fields(self, grid16):
        u = taylor_green_2d(grid16)
        trajectory = solve_2dns_layers(u.horizontal, SolverConfig(dt=0.01, horizon=0.1))
        assert trajectory.final is not None
        u1, _ = trajectory.final
        assert np.allclose(u1.coeffs, math.exp(-0.2) * u.components[0].coeffs, atol=1e-12)

    def test_rejects_horizontal_divergence(self, grid16):
        x1, _, _ = grid16.coordinates()
        ubar = (Field.from_physical(grid16, np.cos(x1)), Field.zeros(grid16))
        with pytest.raises(FieldError):
            solve_2dns_layers(ubar, SolverConfig(dt=0.01, horizon=0.1))
