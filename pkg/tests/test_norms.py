"""
Тесты анизотропных норм H^{s,s'}, B^{0,1/2}, B₄^{0,1/2} и B₄^{-1/2,1/2}.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from aniso_ns.littlewood_paley.cutoffs import DEFAULT_CUTOFFS
from aniso_ns.norms.besov import (
    Measure,
    l4h_l2v,
    norm_B0half,
    norm_B4_0half,
    norm_B4_neg,
    norm_H,
)
from aniso_ns.services.verifier_service import dyadic_rescale
from aniso_ns.spectral.fields import Field, random_band_limited
from aniso_ns.spectral.grid import Grid

from .conftest import random_field

PHI_1 = float(DEFAULT_CUTOFFS.phi(1.0))
PHI_2 = float(DEFAULT_CUTOFFS.phi(2.0))


def mixed_mode(grid: Grid) -> Field:
    """e^{ix₁}e^{ix₃}."""
    coeffs = np.zeros(grid.shape, dtype=complex)
    coeffs[1, 0, 1] = 1.0
    return Field(grid, coeffs, reality=False)


class TestNormH:
    """Норма H^{s,s'}."""

    def test_horizontal_cosine(self, grid16):
        x1, _, _ = grid16.coordinates()
        a = Field.from_physical(grid16, np.cos(x1))
        assert norm_H(a, 1.0, 0.0).value == pytest.approx(1.0 / math.sqrt(2.0))
        assert norm_H(a, 0.0, 1.0).value == 0.0

    def test_zero_exponents_give_l2(self, grid16):
        a = random_field(grid16, 1, zero_mean=False)
        assert norm_H(a, 0.0, 0.0).value == pytest.approx(a.l2_norm(), rel=1e-14)

    def test_singular_weight_skips_modes(self, grid16):
        _, _, x3 = grid16.coordinates()
        a = Field.from_physical(grid16, np.cos(x3))
        result = norm_H(a, -0.5, 0.0)
        assert result.value == 0.0
        assert result.skipped_mass_fraction == pytest.approx(1.0)

    def test_extensive_measure(self, grid16):
        x1, _, _ = grid16.coordinates()
        a = Field.from_physical(grid16, np.cos(x1))
        volume = grid16.volume
        assert norm_H(a, 0.0, 0.0, Measure.EXTENSIVE).value == pytest.approx(
            math.sqrt(volume / 2.0)
        )


class TestNormB0Half:
    """Норма B^{0,1/2}."""

    def test_vertical_cosine_two_shells(self, grid16):
        _, _, x3 = grid16.coordinates()
        a = Field.from_physical(grid16, np.broadcast_to(np.cos(x3), grid16.shape))
        expected = (PHI_1 + PHI_2 * 2.0**-0.5) / math.sqrt(2.0)
        result = norm_B0half(a)
        assert result.value == pytest.approx(expected, rel=1e-13)
        assert result.vertical_mean == 0.0
        active = [l for l, v in zip(result.shell_indices, result.shells) if v > 0.0]
        assert active == [-1, 0]

    def test_vertical_mean_reported_separately(self, grid16):
        x1, _, _ = grid16.coordinates()
        a = Field.from_physical(grid16, np.cos(x1))
        result = norm_B0half(a)
        assert result.value == 0.0
        assert result.vertical_mean == pytest.approx(1.0 / math.sqrt(2.0))

    def test_vector_components_add_in_quadrature(self, grid16):
        a = random_field(grid16, 2)
        assert norm_B0half([a, a]).value == pytest.approx(math.sqrt(2.0) * norm_B0half(a).value)

    @given(seed=st.integers(min_value=0, max_value=2**16), scale=st.floats(0.1, 10.0))
    @settings(max_examples=20, deadline=None)
    def test_homogeneity(self, seed, scale):
        grid = Grid(n_h=16, n_v=16)
        a = random_field(grid, seed)
        assert norm_B0half(a * scale).value == pytest.approx(scale * norm_B0half(a).value, rel=1e-12)

    @given(seed=st.integers(min_value=0, max_value=2**16))
    @settings(max_examples=20, deadline=None)
    def test_triangle_inequality(self, seed):
        grid = Grid(n_h=16, n_v=16)
        a = random_field(grid, seed)
        b = random_field(grid, seed + 1)
        assert norm_B0half(a + b).value <= norm_B0half(a).value + norm_B0half(b).value + 1e-12


class TestNormB4:
    """Нормы B₄^{0,1/2} и B₄^{-1/2,1/2}."""

    def test_l4_l2_of_constant(self, grid16):
        one = Field.from_physical(grid16, np.ones(grid16.shape))
        assert l4h_l2v(one) == pytest.approx(1.0)

    def test_l4_l2_of_horizontal_cosine(self, grid16):
        x1, _, _ = grid16.coordinates()
        a = Field.from_physical(grid16, np.cos(x1))
        assert l4h_l2v(a) == pytest.approx((3.0 / 8.0) ** 0.25, rel=1e-13)

    def test_b4_0half_of_mixed_mode(self, grid16):
        a = mixed_mode(grid16)
        assert norm_B4_0half(a).value == pytest.approx(PHI_1 + PHI_2 * 2.0**-0.5, rel=1e-13)

    def test_b4_neg_of_mixed_mode(self, grid16):
        a = mixed_mode(grid16)
        horizontal = math.sqrt(PHI_1**2 + 2.0 * PHI_2**2)
        expected = horizontal * (PHI_1 + PHI_2 * 2.0**-0.5)
        assert norm_B4_neg(a).value == pytest.approx(expected, rel=1e-12)

    def test_b4_neg_low_part_for_vertical_mode(self, grid16):
        _, _, x3 = grid16.coordinates()
        a = Field.from_physical(grid16, np.broadcast_to(np.cos(4.0 * x3), grid16.shape))
        # ξ_h = 0: только низкочастотная часть S^h_{ℓ-1}Δ_ℓ^v
        assert norm_B4_neg(a).value == pytest.approx(norm_B0half(a).value, rel=1e-13)

    @given(seed=st.integers(min_value=0, max_value=2**16))
    @settings(max_examples=10, deadline=None)
    def test_b4_neg_homogeneity(self, seed):
        grid = Grid(n_h=16, n_v=16)
        a = random_field(grid, seed)
        assert norm_B4_neg(a * 3.0).value == pytest.approx(3.0 * norm_B4_neg(a).value, rel=1e-12)


class TestScaling:
    """Инвариантность норм относительно диадического растяжения."""

    @given(seed=st.integers(min_value=0, max_value=2**16))
    @settings(max_examples=10, deadline=None)
    def test_rescaled_norms_match(self, seed):
        grid = Grid(n_h=16, n_v=16)
        a = random_band_limited(grid, np.random.default_rng(seed), 7, 7)
        scaled = dyadic_rescale(a)
        for norm in (norm_B0half, norm_B4_neg):
            original = norm(a, measure=Measure.EXTENSIVE).value
            rescaled = norm(scaled, measure=Measure.EXTENSIVE).value
            assert abs(rescaled - original) < 1e-10 * original

    def test_volume_measure_is_not_invariant(self, grid16):
        a = random_field(grid16, 3)
        scaled = dyadic_rescale(a)
        assert norm_B0half(scaled).value != pytest.approx(norm_B0half(a).value, rel=1e-3)
