"""
Приёмочные прогоны: законы масштабирования, энергетические тождества и
стандартный набор проверок. Запуск: pytest -m slow.
"""

import math

import numpy as np
import pytest

from aniso_ns.commands.runner import loglog_slope
from aniso_ns.littlewood_paley.cutoffs import DEFAULT_CUTOFFS
from aniso_ns.norms.besov import norm_B4_neg
from aniso_ns.services.decomposition_service import BOOTSTRAP_COLUMN, run_decomposition
from aniso_ns.services.initial_data_service import (
    DataFamilySpec,
    SmallnessConstants,
    generate,
    smallness_report,
)
from aniso_ns.services.solver_service import AnisotropicSolver, SolverConfig
from aniso_ns.services.verifier_service import (
    VerifierConfig,
    VerifierService,
    verify_energy_layers_suite,
)
from aniso_ns.spectral.grid import Grid

from .conftest import random_solenoidal

pytestmark = pytest.mark.slow

EPSILONS = (0.25, 0.125, 0.0625)
PHI_1 = float(DEFAULT_CUTOFFS.phi(1.0))
PHI_2 = float(DEFAULT_CUTOFFS.phi(2.0))


@pytest.fixture(scope="module")
def sweep_grid() -> Grid:
    return Grid(n_h=64, n_v=32)


@pytest.fixture(scope="module")
def oscillatory_data(sweep_grid):
    return {eps: generate(DataFamilySpec(epsilon=eps), sweep_grid) for eps in EPSILONS}


class TestOscillatoryScaling:
    """‖u₀^ε‖_{B₄^{-1/2,1/2}} ~ ε^{1/2}."""

    def test_loglog_slope(self, oscillatory_data):
        norms = np.array([norm_B4_neg(oscillatory_data[eps]).value for eps in EPSILONS])
        slope = loglog_slope(np.array(EPSILONS), norms)
        assert slope == pytest.approx(0.5, abs=0.1)

    def test_halving_epsilon(self, oscillatory_data):
        for coarse, fine in zip(EPSILONS, EPSILONS[1:]):
            ratio = norm_B4_neg(oscillatory_data[fine]).value / norm_B4_neg(oscillatory_data[coarse]).value
            assert ratio == pytest.approx(2**-0.5, rel=0.15)

    def test_smallness_lhs_decreases(self, oscillatory_data):
        constants = SmallnessConstants(L=0.0)
        lhs = [smallness_report(oscillatory_data[eps], constants).lhs_18 for eps in EPSILONS]
        assert all(b < a for a, b in zip(lhs, lhs[1:]))


class TestEnergyLaws:
    """Энергетические тождества на полном горизонте."""

    def test_anisotropic_energy_law(self):
        grid = Grid(n_h=48, n_v=48)
        u0 = random_solenoidal(grid, 51)
        result = AnisotropicSolver(grid, SolverConfig(dt=1e-3, horizon=1.0, monitor_every=100)).integrate(u0)
        assert result.max_energy_drift < 1e-6
        assert float(np.max(result.ledger.column("divergence_residual"))) < 1e-10

    def test_drift_converges_with_dt(self):
        grid = Grid(n_h=48, n_v=48)
        u0 = random_solenoidal(grid, 52)
        drifts = [
            AnisotropicSolver(grid, SolverConfig(dt=dt, horizon=0.25, monitor_every=1000))
            .integrate(u0)
            .max_energy_drift
            for dt in (2e-3, 1e-3)
        ]
        assert drifts[0] >= 8.0 * drifts[1]

    def test_layer_energy_identity(self):
        report = verify_energy_layers_suite(Grid(n_h=64, n_v=16), SolverConfig(dt=1e-3, horizon=1.0))
        assert report.passed
        assert report.metrics["max_layer_drift"] < 1e-6
        assert report.metrics["decay_law_error"] < 1e-6


class TestBootstrap:
    """
    ‖v^h‖_{B^{0,1/2}(t)} для осциллирующих данных с ε = 1/16 на сетке 64²×32.

    u₀^h = (0, sin16x₁·cos x₂·sin x₃), ‖u₀^h‖²_{L²} = 1/8. Градиентная часть
    v₀^h несёт долю 1/257 энергии, вертикальная частота 1 попадает в оболочки
    -1 и 0, поэтому в момент 0 норма равна (φ(1) + φ(2)/√2)·(1/(8·257))^{1/2}.
    """

    @pytest.fixture(scope="class")
    def bootstrap_run(self):
        u0 = generate(DataFamilySpec(epsilon=0.0625), Grid(n_h=64, n_v=32))
        return run_decomposition(u0, SolverConfig(dt=1e-3, horizon=1.0, monitor_every=10))

    def test_initial_value(self, bootstrap_run):
        values = bootstrap_run.ledger.column(BOOTSTRAP_COLUMN)
        expected = (PHI_1 + PHI_2 * 2.0**-0.5) * math.sqrt(1.0 / (8.0 * 257.0))
        assert values[0] > 0.0
        assert values[0] == pytest.approx(expected, rel=1e-10)

    def test_growth_is_bounded(self, bootstrap_run):
        values = bootstrap_run.ledger.column(BOOTSTRAP_COLUMN)
        assert np.all(np.diff(values) >= -1e-15)
        assert values[-1] > values[0]
        assert float(np.max(values)) <= 4.0 * values[0]
        assert max(bootstrap_run.w_residuals) < 1e-4

    def test_status_matches_column(self, bootstrap_run):
        values = bootstrap_run.ledger.column(BOOTSTRAP_COLUMN)
        status = bootstrap_run.bootstrap
        assert status.threshold == pytest.approx(1.0 / 16.0)
        assert status.max_value == pytest.approx(float(np.max(values)))
        assert (status.crossing_time is None) == (status.max_value < status.threshold)
        if status.crossing_time is not None:
            assert 0.0 <= status.crossing_time <= 1.0


class TestDefaultVerification:
    def test_default_suites_pass(self):
        report = VerifierService(VerifierConfig()).run_all()
        assert report.failed_hard_suites == []
        assert report.passed
