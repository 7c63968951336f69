"""Continuous transmission matrices for one-dimensional potentials.

A transfer matrix relates the plane-wave amplitudes (A, B) of the state
A e^{ikx} + B e^{-ikx} on the two sides of a potential,

    (A_R, B_R) = M (A_L, B_L).

det M = 1 for every potential; real potentials give matrices in SU(1,1).
Composition convention: a chain listed left to right multiplies as
M_N ... M_2 M_1, the first list element acting first.
"""

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateSolutions,
    MismatchedWavenumber,
    NotUnimodular,
    ResonancePole,
    SingularMatrix,
)

#: default tolerance on |det - 1|
DET_TOL = 1e-10
#: default tolerance for symmetry classification
SYMMETRY_TOL = 1e-9


@dataclass(frozen=True)
class TransferMatrix:
    """2x2 complex transfer matrix at wavenumber k (units 1/length)."""

    m11: complex
    m12: complex
    m21: complex
    m22: complex
    k: float = 1.0

    @property
    def det(self) -> complex:
        return self.m11 * self.m22 - self.m12 * self.m21

    def as_array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]], dtype=complex)

    @classmethod
    def from_array(cls, m, k: float = 1.0) -> "TransferMatrix":
        return cls(complex(m[0][0]), complex(m[0][1]), complex(m[1][0]), complex(m[1][1]), k)

    def require_unimodular(self, tol: float = DET_TOL) -> None:
        if abs(self.det - 1.0) > tol:
            raise NotUnimodular(f"|det - 1| = {abs(self.det - 1.0):.3e} exceeds {tol:.1e}")


@dataclass(frozen=True)
class ScatteringAmplitudes:
    """Complex transmission and left/right reflection amplitudes."""

    t: complex
    r_left: complex
    r_right: complex

    @property
    def transmission(self) -> float:
        return abs(self.t) ** 2

    @property
    def reflection(self) -> float:
        return abs(self.r_left) ** 2


class SymmetryClass(enum.Enum):
    """Symmetry classes of the transmission matrix (most specific wins)."""

    GENERAL_COMPLEX = "general-complex"
    REAL = "real"
    REAL_PARITY = "real-parity"
    COMPLEX_PARITY = "complex-parity"
    COMPLEX_PT = "complex-pt"


def identity(k: float = 1.0) -> TransferMatrix:
    """Free matrix of a zero-length region."""
    return TransferMatrix(1.0, 0.0, 0.0, 1.0, k)


def delta_matrix(strength: float, k: float) -> TransferMatrix:
    """Transfer matrix of a delta potential v*delta(x).

    Derived by hand from the matching conditions of psi'' = (V - k^2) psi,
    i.e. psi'(0+) - psi'(0-) = v psi(0); not a formula taken from any
    reference. strength > 0 is a repulsive barrier.
    """
    g = 0.5j * strength / k
    return TransferMatrix(1.0 - g, -g, g, 1.0 + g, k)


def compose(ms: Sequence[TransferMatrix], renormalize_every: int = 64) -> TransferMatrix:
    """Product M_N ... M_1 of a chain of matrices, first element applied first.

    Partial products are renormalized by det^{-1/2} every `renormalize_every`
    factors so that unimodularity survives long chains (the determinant is
    exactly 1 analytically; the renormalization removes roundoff drift only).
    """
    if not ms:
        raise ValueError("compose() needs at least one matrix")
    k0 = ms[0].k
    for m in ms:
        if abs(m.k - k0) > 1e-12 * max(abs(k0), 1.0):
            raise MismatchedWavenumber(f"k = {m.k} differs from {k0}")
    a11, a12, a21, a22 = ms[0].m11, ms[0].m12, ms[0].m21, ms[0].m22
    for i, m in enumerate(ms[1:], start=1):
        b11, b12, b21, b22 = m.m11, m.m12, m.m21, m.m22
        a11, a12, a21, a22 = (
            b11 * a11 + b12 * a21,
            b11 * a12 + b12 * a22,
            b21 * a11 + b22 * a21,
            b21 * a12 + b22 * a22,
        )
        if i % renormalize_every == 0:
            det = a11 * a22 - a12 * a21
            if det == 0:
                raise NotUnimodular(f"partial product became singular at factor {i}")
            scale = 1.0 / cmath.sqrt(det)
            a11, a12, a21, a22 = scale * a11, scale * a12, scale * a21, scale * a22
    return TransferMatrix(a11, a12, a21, a22, k0)


def scattering_amplitudes(m: TransferMatrix) -> ScatteringAmplitudes:
    """t = 1/M22, r_left = -M21/M22, r_right = M12/M22."""
    if abs(m.m22) < 1e-300:
        raise SingularMatrix("M22 vanishes; bound-state pole at real energy")
    return ScatteringAmplitudes(1.0 / m.m22, -m.m21 / m.m22, m.m12 / m.m22)


def compose_scattering(s1: ScatteringAmplitudes, s2: ScatteringAmplitudes) -> ScatteringAmplitudes:
    """Amplitudes of two potentials in series (s1 first), summing all
    multiple reflections at the junction.  Algebraically identical to the
    matrix product, so it is valid even when |rL2*rR1| >= 1.
    """
    denom = 1.0 - s2.r_left * s1.r_right
    if abs(denom) < 1e-14:
        raise ResonancePole("1 - rL2*rR1 vanishes")
    t = s1.t * s2.t / denom
    r_left = s1.r_left + s2.r_left * s1.t * s1.t / denom
    r_right = s2.r_right + s1.r_right * s2.t * s2.t / denom
    return ScatteringAmplitudes(t, r_left, r_right)


def classify_symmetry(m: TransferMatrix, tol: float = SYMMETRY_TOL) -> SymmetryClass:
    """Most specific symmetry class whose defining relations hold within tol.

    Checked relations: real potential (M22 = M11*, M21 = M12*), parity
    (M21 = -M12) and PT symmetry (M22 = M11*, off-diagonals pure imaginary).
    Intersections of two classes always collapse to REAL_PARITY.
    """
    m.require_unimodular(tol)
    is_real = abs(m.m22 - m.m11.conjugate()) <= tol and abs(m.m21 - m.m12.conjugate()) <= tol
    is_parity = abs(m.m21 + m.m12) <= tol
    is_pt = (
        abs(m.m22 - m.m11.conjugate()) <= tol
        and abs(m.m12.real) <= tol
        and abs(m.m21.real) <= tol
    )
    if is_real and is_parity:
        return SymmetryClass.REAL_PARITY
    if is_real:
        return SymmetryClass.REAL
    if is_pt:
        return SymmetryClass.COMPLEX_PT
    if is_parity:
        return SymmetryClass.COMPLEX_PARITY
    return SymmetryClass.GENERAL_COMPLEX


def apply_cutoff(m_asymptotic: TransferMatrix, k: float, d1: float, d2: float) -> TransferMatrix:
    """Matrix of the potential cut off to [-d1, d2].

    Diagonal elements gain phases e^{+-ik(d2+d1)}, off-diagonal elements
    e^{+-ik(d2-d1)}; the determinant is unchanged.
    """
    if k <= 0:
        raise ValueError("k must be positive")
    if d1 < 0 or d2 < 0:
        raise ValueError("cut-off lengths must be non-negative")
    p_sum = cmath.exp(1j * k * (d2 + d1))
    p_dif = cmath.exp(1j * k * (d2 - d1))
    return TransferMatrix(
        m_asymptotic.m11 * p_sum,
        m_asymptotic.m12 * p_dif,
        m_asymptotic.m21 / p_dif,
        m_asymptotic.m22 / p_sum,
        k,
    )


def asymptotic_matrix_from_solutions(
    u1_plus: complex,
    u2_plus: complex,
    v1_plus: complex,
    v2_plus: complex,
    u1_minus: complex,
    u2_minus: complex,
    v1_minus: complex,
    v2_minus: complex,
    wronskian: complex,
    k: float,
) -> TransferMatrix:
    """Asymptotic transfer matrix from the plane-wave coefficients of the
    elementary solutions u, v at x -> +-infinity:

        u(+-inf) = U1 e^{ikx} + U2 e^{-ikx},  v(+-inf) = V1 e^{ikx} + V2 e^{-ikx}.

    wronskian = v u' - u v' (x independent).
    """
    if abs(wronskian) < 1e-14:
        raise DegenerateSolutions("elementary solutions are linearly dependent")
    pref = 2j * k / wronskian
    return TransferMatrix(
        pref * (u1_plus * v2_minus - v1_plus * u2_minus),
        pref * (v1_plus * u1_minus - u1_plus * v1_minus),
        pref * (u2_plus * v2_minus - v2_plus * u2_minus),
        pref * (v2_plus * u1_minus - u2_plus * v1_minus),
        k,
    )


def random_su11(rng: np.random.Generator, k: float = 1.0, max_rapidity: float = 3.0) -> TransferMatrix:
    """Random SU(1,1) matrix [[a, b], [b*, a*]] with |a|^2 - |b|^2 = 1."""
    r = rng.uniform(0.0, max_rapidity)
    phi, psi = rng.uniform(0.0, 2.0 * math.pi, size=2)
    a = math.cosh(r) * cmath.exp(1j * phi)
    b = math.sinh(r) * cmath.exp(1j * psi)
    return TransferMatrix(a, b, b.conjugate(), a.conjugate(), k)
