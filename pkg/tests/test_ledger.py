"""
Тесты норм-журнала: строки, накопители L̃^p_T, взвешенные накопители и CSV.
"""

import math

import numpy as np
import pytest
from scipy.integrate import trapezoid

from aniso_ns.norms.besov import norm_B0half, norm_B4_0half, norm_B4_neg
from aniso_ns.norms.ledger import (
    LEDGER_SCHEMA,
    BlockKind,
    LedgerError,
    NormLedger,
    Trajectory,
    cl_accumulate,
    parse_exponent,
    weighted_cl_accumulate,
)
from aniso_ns.spectral.fields import VecField
from aniso_ns.spectral.operators import horizontal_heat

from .conftest import random_field


def constant_in_time(ledger: NormLedger, a, horizon: float, samples: int, p, kind=BlockKind.B0HALF):
    for t in np.linspace(0.0, horizon, samples):
        cl_accumulate(ledger, p, "a", float(t), a, kind)
    return ledger


class TestRows:
    """Строки журнала."""

    def test_record_and_read(self, grid16):
        ledger = NormLedger(grid16)
        ledger.record(0.0, {"energy": 1.0})
        ledger.record(0.5, {"energy": 0.5, "dissipation": 0.5})
        assert len(ledger) == 2
        assert ledger.columns == ["energy", "dissipation"]
        assert ledger.last("energy") == 0.5
        assert math.isnan(ledger.column("dissipation")[0])
        assert np.allclose(ledger.times, [0.0, 0.5])

    def test_time_must_increase(self, grid16):
        ledger = NormLedger(grid16)
        ledger.record(1.0, {"x": 1.0})
        with pytest.raises(LedgerError):
            ledger.record(1.0, {"x": 1.0})

    @pytest.mark.parametrize("value", [-1e-3, math.nan])
    def test_invalid_values_rejected(self, grid16, value):
        ledger = NormLedger(grid16)
        with pytest.raises(LedgerError):
            ledger.record(0.0, {"x": value})
        assert len(ledger) == 0

    def test_infinite_value_is_kept(self, grid16):
        ledger = NormLedger(grid16)
        ledger.record(0.0, {"lhs": math.inf})
        assert ledger.last("lhs") == math.inf

    def test_snapshot_is_independent(self, grid16):
        ledger = NormLedger(grid16)
        ledger.record(0.0, {"x": 1.0})
        snapshot = ledger.snapshot()
        ledger.record(1.0, {"x": 2.0})
        assert len(snapshot) == 1
        assert len(ledger) == 2


class TestAccumulators:
    """Накопители норм Шемена-Лерне."""

    @pytest.mark.parametrize("p, power", [(1, 1.0), (2, 0.5), (4, 0.25), ("inf", 0.0)])
    def test_constant_trajectory(self, grid16, p, power):
        a = random_field(grid16, 1)
        horizon = 2.0
        ledger = constant_in_time(NormLedger(grid16), a, horizon, 11, p)
        expected = horizon**power * norm_B0half(a).value
        assert ledger.cl_norm(p, "a") == pytest.approx(expected, rel=1e-12)

    def test_b4_kinds_constant_trajectory(self, grid16):
        a = random_field(grid16, 2)
        ledger = NormLedger(grid16)
        constant_in_time(ledger, a, 1.0, 5, math.inf, BlockKind.B4_0HALF)
        constant_in_time(ledger, a, 1.0, 5, math.inf, BlockKind.B4_NEG)
        assert ledger.cl_norm(math.inf, "a", BlockKind.B4_0HALF) == pytest.approx(norm_B4_0half(a).value)
        assert ledger.cl_norm(math.inf, "a", BlockKind.B4_NEG) == pytest.approx(norm_B4_neg(a).value)

    def test_sup_of_decaying_trajectory_is_initial(self, grid16):
        a = random_field(grid16, 3)
        ledger = NormLedger(grid16)
        for t in np.linspace(0.0, 1.0, 6):
            ledger.cl_accumulate(math.inf, "heat", float(t), horizontal_heat(a, float(t)))
        assert np.allclose(ledger.cl_shells(math.inf, "heat"), norm_B0half(a).shells, rtol=1e-14)

    def test_cl_norm_dominates_time_norm_of_b_norm(self, grid16):
        a = random_field(grid16, 4)
        ledger = NormLedger(grid16)
        times = np.linspace(0.0, 1.0, 21)
        values = []
        for t in times:
            h = horizontal_heat(a, float(t))
            ledger.cl_accumulate(2, "heat", float(t), h)
            values.append(norm_B0half(h).value)
        # Минковский: ‖‖a‖_B‖_{L²_T} <= ‖a‖_{L̃²_T(B)}
        l2_of_norm = math.sqrt(trapezoid(np.square(values), times))
        assert l2_of_norm <= ledger.cl_norm(2, "heat") * (1.0 + 1e-12)

    def test_weighted_unit_weight_matches_p2(self, grid16):
        a = random_field(grid16, 5)
        ledger = NormLedger(grid16)
        for t in np.linspace(0.0, 1.5, 7):
            ledger.cl_accumulate(2, "a", float(t), a)
            weighted_cl_accumulate(ledger, "a_f", 1.0, float(t), a)
        assert ledger.weighted_norm("a_f") == pytest.approx(ledger.cl_norm(2, "a"), rel=1e-14)

    def test_exponential_weight(self, grid16):
        a = random_field(grid16, 6)
        ledger = NormLedger(grid16)
        horizon = 1.0
        for t in np.linspace(0.0, horizon, 2001):
            ledger.weighted_cl_accumulate("a_f", math.exp(-t), float(t), a)
        expected = math.sqrt(1.0 - math.exp(-horizon)) * norm_B0half(a).value
        assert ledger.weighted_norm("a_f") == pytest.approx(expected, rel=1e-6)

    def test_negative_weight_rejected(self, grid16):
        ledger = NormLedger(grid16)
        with pytest.raises(LedgerError):
            ledger.weighted_cl_accumulate("a_f", -1.0, 0.0, random_field(grid16, 7))

    def test_accumulator_time_must_increase(self, grid16):
        a = random_field(grid16, 8)
        ledger = NormLedger(grid16)
        ledger.cl_accumulate(2, "a", 0.5, a)
        with pytest.raises(LedgerError):
            ledger.cl_accumulate(2, "a", 0.5, a)

    def test_unknown_accumulator(self, grid16):
        ledger = NormLedger(grid16)
        with pytest.raises(LedgerError):
            ledger.cl_norm(2, "missing")
        assert not ledger.has_accumulator("missing", 2)

    @pytest.mark.parametrize("p", [0, 3, -1, 2.5])
    def test_unsupported_exponent(self, p):
        with pytest.raises(LedgerError):
            parse_exponent(p)

    def test_exponent_spellings(self):
        assert parse_exponent("inf") == math.inf
        assert parse_exponent(2) == 2.0


class TestCsv:
    """Сериализация журнала."""

    def fill(self, grid) -> NormLedger:
        ledger = NormLedger(grid, config_hash="abc")
        ledger.record(0.0, {"energy": 1.0, "lhs": math.inf})
        ledger.record(0.25, {"energy": 0.75})
        return ledger

    def test_header(self, grid16):
        lines = self.fill(grid16).to_csv_text().splitlines()
        assert lines[0] == f"#schema={LEDGER_SCHEMA}"
        assert lines[1].startswith("#n_h=16;n_v=16;")
        assert lines[1].endswith("config=abc")
        assert lines[2] == "t,energy,lhs"
        assert lines[3] == "0.0,1.0,inf"
        assert lines[4] == "0.25,0.75,"

    def test_deterministic_output(self, grid16, tmp_path):
        first = self.fill(grid16).to_csv(tmp_path / "a.csv").read_bytes()
        second = self.fill(grid16).to_csv(tmp_path / "b.csv").read_bytes()
        assert first == second


class TestTrajectory:
    """Траектория: состояния и журнал."""

    def test_append(self, grid16):
        trajectory = Trajectory(NormLedger(grid16))
        u = VecField.zeros(grid16)
        trajectory.append(0.0, u)
        trajectory.append(0.1, u)
        assert trajectory.times == [0.0, 0.1]
        with pytest.raises(LedgerError):
            trajectory.append(0.1, u)
