import cmath
import math

import numpy as np
import pytest

from qwire import (
    TransferMatrix,
    canonical_step,
    coefficients_from_matrix,
    gap_condition,
    general_coefficients,
    identity,
    j_from_coefficients,
    normalize_phase,
    phase_forward,
    phase_inverse,
    radius_factor,
    random_su11,
    tb_model,
)
from qwire.canonical import phase_inverse_grid
from qwire.errors import ComplexCoefficients, SingularK, StepOverflow

from conftest import mod_pi_distance


class TestCoefficients:
    def test_identity_is_degenerate(self):
        c = coefficients_from_matrix(identity())
        assert (c.sbar, c.s, c.kfun) == (1.0, 1.0, 0.0)
        assert c.is_degenerate

    def test_free_propagation(self):
        ka = math.pi / 3
        m = TransferMatrix(cmath.exp(1j * ka), 0, 0, cmath.exp(-1j * ka))
        c = coefficients_from_matrix(m)
        assert abs(c.sbar - 0.5) < 1e-15
        assert abs(c.s - 0.5) < 1e-15
        assert abs(c.kfun - math.sin(ka)) < 1e-15
        # the recursion J = sbar + s*K/K reproduces Psi' = 2cos(ka) Psi - Psi''
        assert abs(j_from_coefficients(c, c) - 2 * math.cos(ka)) < 1e-15

    def test_real_parity_makes_sbar_equal_s(self):
        m = TransferMatrix(math.sqrt(2), 1j, -1j, math.sqrt(2))
        c = coefficients_from_matrix(m)
        assert c.sbar == c.s == math.sqrt(2)

    def test_real_class_reduction_matches_general_formulas(self, rng):
        for _ in range(100):
            m = random_su11(rng)
            c = coefficients_from_matrix(m)
            gs, g_s, gk = general_coefficients(m)
            assert abs(c.sbar - gs.real) < 1e-12 and abs(gs.imag) < 1e-12
            assert abs(c.s - g_s.real) < 1e-12 and abs(g_s.imag) < 1e-12
            # general kfun is i times the real one for SU(1,1) matrices
            assert abs(c.kfun - gk.imag) < 1e-12 and abs(gk.real) < 1e-12
            # direct Re/Im formulas
            assert abs(c.sbar - (m.m11.real + m.m12.real)) < 1e-12
            assert abs(c.s - (m.m11.real - m.m12.real)) < 1e-12
            assert abs(c.kfun - (m.m11.imag - m.m12.imag)) < 1e-12

    def test_complex_matrix_rejected(self):
        a, b, c = 1.2 + 0.1j, 0.3 - 0.2j, 0.15 + 0.4j
        m = TransferMatrix(a, b, c, (1 + b * c) / a)
        with pytest.raises(ComplexCoefficients):
            coefficients_from_matrix(m)


class TestCanonicalStep:
    def test_single_step(self):
        ka = 0.4
        assert canonical_step(1.0, 0.0, 2 * math.cos(ka), 1.0) == 2 * math.cos(ka)

    def test_period_four_orbit_at_band_center(self):
        psi, prev = 1.0, 0.0
        seen = []
        for _ in range(8):
            psi, prev = canonical_step(psi, prev, 0.0, 1.0), psi
            seen.append(psi)
        assert seen == [0.0, -1.0, 0.0, 1.0, 0.0, -1.0, 0.0, 1.0]

    def test_free_chain_chebyshev_ratios(self):
        ka = 0.37
        j = 2 * math.cos(ka)
        psi, prev = math.sin(ka), 0.0
        for n in range(2, 6):
            psi, prev = canonical_step(psi, prev, j, 1.0), psi
            assert abs(psi - math.sin(n * ka)) < 1e-14

    def test_overflow_guard(self):
        with pytest.raises(StepOverflow):
            canonical_step(1e280, 0.0, 10.0, 1.0)


class TestPhaseForward:
    def test_half_pi_maps_to_zero(self):
        for k_ratio in (1.0, -2.5, 0.7):
            out = phase_forward(math.pi / 2, 1.3, k_ratio)
            assert mod_pi_distance(out, 0.0) < 1e-15

    def test_tight_binding_hand_value(self):
        # J = 0, k_ratio = 1, theta = pi/4: arctan(1/(0-1)) -> 3pi/4
        assert abs(phase_forward(math.pi / 4, 0.0, 1.0) - 3 * math.pi / 4) < 1e-15

    def test_forward_inverse_round_trip(self, rng):
        for _ in range(1000):
            j = rng.normal() * 3
            k_ratio = rng.normal()
            if abs(k_ratio) < 1e-3:
                continue
            theta = rng.uniform(1e-6, math.pi - 1e-6)
            back = phase_inverse(theta, j, k_ratio) % math.pi
            assert mod_pi_distance(phase_forward(back, j, k_ratio), theta) < 1e-12


class TestPhaseInverse:
    def test_tight_binding_at_half_pi(self):
        for e, eps in ((0.5, 0.0), (2.0, 1.0), (-1.0, 0.3)):
            assert abs(phase_inverse(math.pi / 2, e - eps, 1.0) - math.atan(e - eps)) < 1e-15

    def test_limits_at_zero(self):
        assert phase_inverse(0.0, 1.7, 2.0) == -math.pi / 2
        assert phase_inverse(0.0, 1.7, -2.0) == math.pi / 2

    def test_limit_near_pi(self):
        assert abs(phase_inverse(math.pi - 1e-12, 0.3, 1.0) - math.pi / 2) < 1e-9
        assert abs(phase_inverse(math.pi - 1e-12, 0.3, -1.0) + math.pi / 2) < 1e-9

    def test_monotonicity(self):
        grid = np.linspace(0.0, math.pi, 1024)
        for k_ratio in (0.8, 2.0):
            vals = phase_inverse_grid(grid, -0.7, k_ratio)
            assert np.all(np.diff(vals) > 0)
            vals = phase_inverse_grid(grid, -0.7, -k_ratio)
            assert np.all(np.diff(vals) < 0)

    def test_grid_matches_scalar(self):
        grid = np.linspace(0.0, math.pi, 257)
        vals = phase_inverse_grid(grid, 1.2, -0.6)
        for th, v in zip(grid, vals):
            assert abs(phase_inverse(float(th), 1.2, -0.6) - v) < 1e-14


class TestRadiusFactor:
    def test_half_pi(self):
        assert abs(radius_factor(math.pi / 2, 5.0, -1.3) - 1.3**2) < 1e-12

    def test_tight_binding_at_theta_zero(self):
        # F(0) = 1 + (E - eps)^2
        assert abs(radius_factor(0.0, 1.7, 1.0) - (1 + 1.7**2)) < 1e-15

    def test_tight_binding_closed_form(self, rng):
        # F = 1 - J sin(2 th) + J^2 cos^2 th for K = 1
        for _ in range(50):
            th = rng.uniform(0, math.pi)
            j = rng.normal() * 2
            ref = 1 - j * math.sin(2 * th) + j * j * math.cos(th) ** 2
            assert abs(radius_factor(th, j, 1.0) - ref) < 1e-12

    def test_matches_explicit_two_vector_map(self, rng):
        for _ in range(200):
            th = rng.uniform(0, math.pi)
            j, k_ratio = rng.normal() * 2, rng.normal()
            x, y = math.cos(th), math.sin(th)
            x2, y2 = j * x - k_ratio * y, x
            assert abs(radius_factor(th, j, k_ratio) - (x2 * x2 + y2 * y2) / (x * x + y * y)) < 1e-12

    def test_positive_everywhere(self):
        grid = np.linspace(0, math.pi, 4096)
        for j, k_ratio in ((0.0, 1.0), (2.5, -0.3), (-1.0, 0.01)):
            vals = [radius_factor(float(t), j, k_ratio) for t in grid]
            assert min(vals) > 1e-30


class TestGapCondition:
    def test_pure_chain_outside_band(self):
        assert gap_condition(tb_model([1.0], 4.0)) is True  # |E - eps| = 3

    def test_pure_chain_at_center(self):
        assert gap_condition(tb_model([1.0], 1.0)) is False

    def test_binary_gap(self):
        assert gap_condition(tb_model([-3.0, 3.0], 0.0)) is True

    def test_singular_k(self):
        from qwire.models import TabulatedModel

        model = TabulatedModel(((1.0,),), (0.0,), 0.0)
        with pytest.raises(SingularK):
            gap_condition(model)


def test_normalize_phase():
    point = normalize_phase(3.5 * math.pi)
    assert point.winding == 3 and abs(point.theta - 0.5 * math.pi) < 1e-12
    assert abs(point.extended - 3.5 * math.pi) < 1e-12
    theta, n = normalize_phase(-0.25)
    assert n == -1 and abs(theta - (math.pi - 0.25)) < 1e-12
    theta, n = normalize_phase(0.0)
    assert (theta, n) == (0.0, 0)
