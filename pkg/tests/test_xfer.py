import cmath
import math

import numpy as np
import pytest

from qwire import (
    SymmetryClass,
    TransferMatrix,
    apply_cutoff,
    asymptotic_matrix_from_solutions,
    classify_symmetry,
    compose,
    compose_scattering,
    delta_matrix,
    identity,
    random_su11,
    scattering_amplitudes,
)
from qwire.errors import (
    DegenerateSolutions,
    MismatchedWavenumber,
    NotUnimodular,
    ResonancePole,
    SingularMatrix,
)

from conftest import random_unimodular


def mat_close(m: TransferMatrix, arr, tol=1e-12) -> bool:
    return np.max(np.abs(m.as_array() - np.asarray(arr, dtype=complex))) < tol


class TestCompose:
    def test_identity_pair(self):
        assert mat_close(compose([identity(), identity()]), np.eye(2))

    def test_phase_addition(self):
        p = cmath.exp(1j * math.pi / 4)
        m = TransferMatrix(p, 0, 0, p.conjugate())
        assert mat_close(compose([m, m]), [[1j, 0], [0, -1j]])

    def test_ordering_first_element_applied_first(self, rng):
        a = random_su11(rng)
        b = random_su11(rng)
        prod = compose([a, b])
        # product must be B @ A, not A @ B
        assert mat_close(prod, b.as_array() @ a.as_array(), 1e-10)

    def test_mismatched_wavenumber(self):
        with pytest.raises(MismatchedWavenumber):
            compose([identity(1.0), identity(1.0 + 1e-6)])

    def test_determinant_over_long_products(self, rng):
        ms = [random_unimodular(rng) for _ in range(10_000)]
        assert abs(compose(ms).det - 1.0) <= 1e-10


class TestScatteringAmplitudes:
    def test_identity(self):
        s = scattering_amplitudes(identity())
        assert s.t == 1.0 and s.r_left == 0.0 and s.r_right == 0.0

    def test_delta_matrix_half_transmission(self):
        # hand-solved delta matching conditions, v = 2, k = 1
        m = TransferMatrix(1 + 1j, 1j, -1j, 1 - 1j)
        assert abs(m.det - 1.0) < 1e-15
        assert abs(scattering_amplitudes(m).transmission - 0.5) < 1e-14
        # the packaged constructor differs only by the sign convention of v
        assert abs(scattering_amplitudes(delta_matrix(2.0, 1.0)).transmission - 0.5) < 1e-14

    def test_flux_conservation_random_su11(self, rng):
        for _ in range(200):
            s = scattering_amplitudes(random_su11(rng))
            assert 0.0 <= s.transmission <= 1.0
            assert abs(s.transmission + abs(s.r_left) ** 2 - 1.0) < 1e-12

    def test_left_right_reflection_moduli_equal(self, rng):
        for _ in range(200):
            s = scattering_amplitudes(random_su11(rng))
            assert abs(abs(s.r_left) - abs(s.r_right)) < 1e-12

    def test_singular(self):
        with pytest.raises(SingularMatrix):
            scattering_amplitudes(TransferMatrix(1.0, 1.0, 1.0, 0.0))


class TestComposeScattering:
    def test_free_second_unit(self, rng):
        s1 = scattering_amplitudes(random_su11(rng))
        free = scattering_amplitudes(identity())
        out = compose_scattering(s1, free)
        assert abs(out.t - s1.t) < 1e-14
        assert abs(out.r_left - s1.r_left) < 1e-14
        assert abs(out.r_right - s1.r_right) < 1e-14

    def test_opaque_first_unit(self, rng):
        from qwire import ScatteringAmplitudes

        s1 = ScatteringAmplitudes(0.0, 0.9j, -0.3)
        s2 = scattering_amplitudes(random_su11(rng))
        assert compose_scattering(s1, s2).t == 0.0

    @staticmethod
    def _check_pair(m1, m2, tol=1e-12):
        s1, s2 = scattering_amplitudes(m1), scattering_amplitudes(m2)
        via_rules = compose_scattering(s1, s2)
        via_product = scattering_amplitudes(compose([m1, m2]))
        assert abs(via_rules.t - via_product.t) < tol
        assert abs(via_rules.r_left - via_product.r_left) < tol
        assert abs(via_rules.r_right - via_product.r_right) < tol
        return abs(s2.r_left * s1.r_right)

    def test_matches_matrix_product_on_random_su11_pairs(self, rng):
        for _ in range(1000):
            self._check_pair(random_su11(rng), random_su11(rng))

    def test_matches_matrix_product_beyond_series_radius(self, rng):
        # |rL| < 1 for real potentials, so the beyond-radius regime needs
        # complex-potential unimodular matrices with |m12|, |m21| > |m22|
        def lossy(rng):
            m12 = rng.uniform(1.1, 2.0) * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
            m21 = rng.uniform(1.1, 2.0) * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
            m22 = rng.uniform(0.3, 0.8) * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
            m11 = (1.0 + m12 * m21) / m22
            return TransferMatrix(m11, m12, m21, m22)

        beyond = 0
        for _ in range(200):
            beyond += self._check_pair(lossy(rng), lossy(rng), 1e-11) > 1.0
        assert beyond > 150

    def test_two_delta_units(self):
        m = delta_matrix(2.0, 1.0)
        direct = scattering_amplitudes(compose([m, m]))
        rules = compose_scattering(scattering_amplitudes(m), scattering_amplitudes(m))
        assert abs(direct.t - rules.t) < 1e-14

    def test_resonance_pole(self):
        from qwire import ScatteringAmplitudes

        s = ScatteringAmplitudes(1.0, 1.0, 1.0)
        with pytest.raises(ResonancePole):
            compose_scattering(s, s)


class TestSymmetryClassification:
    def test_real_parity_table_row(self):
        m = TransferMatrix(math.sqrt(2), 1j, -1j, math.sqrt(2))
        assert classify_symmetry(m) is SymmetryClass.REAL_PARITY

    def test_real_generic(self, rng):
        m = random_su11(rng)
        assert classify_symmetry(m) is SymmetryClass.REAL

    def test_complex_pt_table_row(self):
        b = c = 0.5
        alpha = math.sqrt(1 - b * c) * cmath.exp(0.3j)  # |alpha|^2 + bc = 1
        m = TransferMatrix(alpha, 1j * b, 1j * c, alpha.conjugate())
        assert classify_symmetry(m) is SymmetryClass.COMPLEX_PT

    def test_complex_parity_table_row(self):
        beta = 0.4 + 0.2j
        alpha = 1.1 + 0.3j
        gamma = (1 - beta * beta) / alpha  # alpha*gamma + beta^2 = 1
        m = TransferMatrix(alpha, beta, -beta, gamma)
        assert classify_symmetry(m) is SymmetryClass.COMPLEX_PARITY
        # parity implies equal reflection amplitudes (not just moduli)
        s = scattering_amplitudes(m)
        assert abs(s.r_left - s.r_right) < 1e-12

    def test_general_complex_fallback(self):
        a, b, c = 1.2 + 0.1j, 0.3 - 0.2j, 0.15 + 0.4j
        d = (1 + b * c) / a
        m = TransferMatrix(a, b, c, d)
        assert classify_symmetry(m) is SymmetryClass.GENERAL_COMPLEX

    def test_stable_under_tolerance_scaling(self):
        cases = [
            TransferMatrix(math.sqrt(2), 1j, -1j, math.sqrt(2)),
            TransferMatrix(math.cosh(0.5) * cmath.exp(0.2j), math.sinh(0.5),
                           math.sinh(0.5), math.cosh(0.5) * cmath.exp(-0.2j)),
        ]
        for m in cases:
            assert classify_symmetry(m, 1e-9) is classify_symmetry(m, 1e-8)

    def test_not_unimodular(self):
        with pytest.raises(NotUnimodular):
            classify_symmetry(TransferMatrix(2.0, 0.0, 0.0, 2.0))


class TestCutoff:
    def test_zero_lengths_are_identity_operation(self, rng):
        m = random_su11(rng)
        assert mat_close(apply_cutoff(m, m.k, 0.0, 0.0), m.as_array())

    def test_half_pi_phases_give_minus_identity(self):
        out = apply_cutoff(identity(), 1.0, math.pi / 2, math.pi / 2)
        assert mat_close(out, [[-1, 0], [0, -1]])

    def test_determinant_preserved(self, rng):
        for _ in range(20):
            m = random_su11(rng)
            out = apply_cutoff(m, m.k, rng.uniform(0, 2), rng.uniform(0, 2))
            assert abs(out.det - m.det) < 1e-12

    def test_asymmetric_phases(self):
        # off-diagonal picks up e^{+-ik(d2-d1)} only
        m = TransferMatrix(1.0, 0.5j, -0.5j, 1.0 + 0.25)  # det != 1 is fine here
        out = apply_cutoff(m, 2.0, 0.3, 0.7)
        assert abs(out.m12 - 0.5j * cmath.exp(1j * 2.0 * 0.4)) < 1e-14
        assert abs(out.m21 - (-0.5j) * cmath.exp(-1j * 2.0 * 0.4)) < 1e-14


def _square_well_asym_coeffs(v0: float, d: float, k: float):
    """Plane-wave coefficients at +-infinity of the real elementary solutions
    u = cos(kappa x), v = sin(kappa x) of a square well -v0 on [-d, d]."""
    kappa = math.sqrt(k * k + v0)

    def continue_right(val, der):
        a = 0.5 * (val + der / (1j * k))
        b = 0.5 * (val - der / (1j * k))
        return a * cmath.exp(-1j * k * d), b * cmath.exp(1j * k * d)

    u1p, u2p = continue_right(math.cos(kappa * d), -kappa * math.sin(kappa * d))
    v1p, v2p = continue_right(math.sin(kappa * d), kappa * math.cos(kappa * d))
    # u even, v odd
    u1m, u2m = u2p, u1p
    v1m, v2m = -v2p, -v1p
    wronskian = -kappa  # v u' - u v' for this pair
    return u1p, u2p, v1p, v2p, u1m, u2m, v1m, v2m, wronskian


class TestAsymptoticMatrix:
    def test_free_particle_is_identity(self):
        k = 1.3
        m = asymptotic_matrix_from_solutions(1, 0, 0, 1, 1, 0, 0, 1, 2j * k, k)
        assert mat_close(m, np.eye(2))

    def test_square_well_determinant_and_transmission(self):
        v0, d, k = 1.3, 0.7, 0.9
        coeffs = _square_well_asym_coeffs(v0, d, k)
        m = asymptotic_matrix_from_solutions(*coeffs, k)
        assert abs(m.det - 1.0) < 1e-12
        kappa = math.sqrt(k * k + v0)
        t_exact = 1.0 / (
            1.0 + v0**2 * math.sin(2 * kappa * d) ** 2 / (4 * k * k * (k * k + v0))
        )
        assert abs(scattering_amplitudes(m).transmission - t_exact) < 1e-12

    def test_degenerate_solutions(self):
        with pytest.raises(DegenerateSolutions):
            asymptotic_matrix_from_solutions(1, 0, 0, 1, 1, 0, 0, 1, 0.0, 1.0)
