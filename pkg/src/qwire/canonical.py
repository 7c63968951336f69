"""Canonical three-term recursion and its two-dimensional phase map.

Every one-dimensional cell model reduces to

    Psi_{j+1} = J(g_{j-1}, g_j) Psi_j - (K(g_j)/K(g_{j-1})) Psi_{j-1},

with species-dependent real functions J and K of the energy.  In polar
coordinates (x, y) = (Psi_{j+1}, Psi_j) = rho (cos th, sin th) the step
becomes a phase map th -> T(th) and a radial growth factor F(th).
Phases are stored in [0, pi); extra winding is tracked as an integer.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ComplexCoefficients, SingularK, StepOverflow
from .xfer import TransferMatrix

#: amplitudes above this must be rescaled by the caller
OVERFLOW_GUARD = 1e280
#: |K| below this counts as a singular (degenerate) energy
K_FLOOR = 1e-12


@dataclass(frozen=True)
class CanonicalCoefficients:
    """Real coefficients (sbar, s, kfun) of one cell's transfer matrix.

    For a real-potential matrix [[a, b], [b*, a*]] these are
    sbar = Re a + Re b, s = Re a - Re b, kfun = Im a - Im b.
    """

    sbar: float
    s: float
    kfun: float

    @property
    def is_degenerate(self) -> bool:
        return abs(self.kfun) < K_FLOOR


def general_coefficients(m: TransferMatrix) -> tuple[complex, complex, complex]:
    """Raw half-sum combinations of the matrix elements.

    sbar = (m11+m12+m21+m22)/2, s = (m11-m12-m21+m22)/2,
    kfun = (m11-m22+m21-m12)/2.  For a real-potential matrix sbar and s
    are real while kfun is pure imaginary (i times the real K).
    """
    sbar = 0.5 * (m.m11 + m.m12 + m.m21 + m.m22)
    s = 0.5 * (m.m11 - m.m12 - m.m21 + m.m22)
    kfun = 0.5 * (m.m11 - m.m22 + m.m21 - m.m12)
    return sbar, s, kfun


def coefficients_from_matrix(m: TransferMatrix, tol: float = 1e-9) -> CanonicalCoefficients:
    """Real-reduced canonical coefficients of a real-potential matrix.

    The general kfun of an SU(1,1) matrix is i times the real form, so the
    reduction takes its imaginary part; only K ratios enter the recursion,
    which makes the two conventions physically identical.  Raises
    ComplexCoefficients when the matrix is not real-class reducible.
    """
    sbar, s, kfun = general_coefficients(m)
    if abs(sbar.imag) > tol or abs(s.imag) > tol or abs(kfun.real) > tol:
        raise ComplexCoefficients(
            "matrix does not reduce to real canonical coefficients "
            f"(residuals {abs(sbar.imag):.2e}, {abs(s.imag):.2e}, {abs(kfun.real):.2e})"
        )
    return CanonicalCoefficients(sbar.real, s.real, kfun.imag)


def j_from_coefficients(prev: CanonicalCoefficients, cur: CanonicalCoefficients) -> float:
    """J of a step entering a `cur` cell after a `prev` cell:
    J = sbar_cur + s_prev * (kfun_cur / kfun_prev)."""
    if prev.is_degenerate:
        raise SingularK("previous cell has kfun = 0")
    return cur.sbar + prev.s * (cur.kfun / prev.kfun)


def canonical_step(psi_j: float, psi_jm1: float, j_coeff: float, k_ratio: float) -> float:
    """One recursion step J*psi_j - k_ratio*psi_jm1 with an overflow guard."""
    out = j_coeff * psi_j - k_ratio * psi_jm1
    if abs(out) > OVERFLOW_GUARD:
        raise StepOverflow("amplitude exceeded 1e280; rescale the state")
    return out


def phase_forward(theta: float, j_coeff: float, k_ratio: float) -> float:
    """Phase map T(th) = arctan{(J - k_ratio tan th)^{-1}} in [0, pi).

    Evaluated as atan2(cos th, J cos th - k_ratio sin th) so the tan poles
    at th = pi/2 need no special casing.
    """
    c = math.cos(theta)
    s = math.sin(theta)
    out = math.atan2(c, j_coeff * c - k_ratio * s) % math.pi
    return 0.0 if out == math.pi else out


def phase_inverse(theta: float, j_coeff: float, k_ratio: float) -> float:
    """Inverse phase map on [0, pi), principal value in [-pi/2, pi/2].

    T^{-1}(th) = arctan{(J - cot th)/k_ratio}, with the limits
    T^{-1}(0) = -pi/2 and T^{-1}(pi) = +pi/2 for k_ratio > 0 (signs swap
    for k_ratio < 0).  Strictly increasing in th iff k_ratio > 0.
    """
    s = math.sin(theta)
    if s <= 1e-300:
        # th = 0 (or pi within roundoff): cot th diverges
        sign = -1.0 if (k_ratio > 0) == (theta < 0.5 * math.pi) else 1.0
        return sign * 0.5 * math.pi
    return math.atan((j_coeff - math.cos(theta) / s) / k_ratio)


def phase_inverse_grid(thetas: np.ndarray, j_coeff: float, k_ratio: float) -> np.ndarray:
    """Vectorized phase_inverse for a grid covering [0, pi]."""
    out = np.empty_like(thetas)
    interior = (thetas > 0.0) & (thetas < math.pi)
    th = thetas[interior]
    out[interior] = np.arctan((j_coeff - np.cos(th) / np.sin(th)) / k_ratio)
    half = 0.5 * math.pi if k_ratio < 0 else -0.5 * math.pi
    out[thetas <= 0.0] = half
    out[thetas >= math.pi] = -half
    return out


def radius_factor(theta: float, j_coeff: float, k_ratio: float) -> float:
    """Squared radial growth F(th) = cos^2 th + (J cos th - k_ratio sin th)^2."""
    c = math.cos(theta)
    s = math.sin(theta)
    return c * c + (j_coeff * c - k_ratio * s) ** 2


class PhasePoint(NamedTuple):
    """Phase in [0, pi) plus the integer winding of the extended branch."""

    theta: float
    winding: int = 0

    @property
    def extended(self) -> float:
        return self.theta + self.winding * math.pi


def normalize_phase(angle: float) -> PhasePoint:
    """Split an angle into theta in [0, pi) and winding n, angle = theta + n*pi."""
    n = math.floor(angle / math.pi)
    theta = angle - n * math.pi
    if theta >= math.pi:  # guard against roundoff at the top edge
        theta -= math.pi
        n += 1
    return PhasePoint(theta, n)


class CanonicalModel:
    """Species-resolved J/K provider plus the derived phase maps.

    Subclasses implement j(prev, cur, energy) and k(cur, energy); the phase
    maps, growth factor and gap test are derived here.  `energy` is the
    default evaluation energy for engines that do not sweep.  Plugins for
    new cell models only need to subclass this and provide j and k.
    """

    n_species: int = 1
    energy: float = 0.0

    def j(self, prev: int, cur: int, energy: float | None = None) -> float:
        raise NotImplementedError

    def k(self, cur: int, energy: float | None = None) -> float:
        raise NotImplementedError

    def k_ratio(self, prev: int, cur: int, energy: float | None = None) -> float:
        k_prev = self.k(prev, energy)
        if abs(k_prev) < K_FLOOR:
            raise SingularK(f"K({prev}) = 0 at E = {self.energy if energy is None else energy}")
        return self.k(cur, energy) / k_prev

    def forward(self, theta: float, prev: int, cur: int, energy: float | None = None) -> float:
        return phase_forward(theta, self.j(prev, cur, energy), self.k_ratio(prev, cur, energy))

    def t_inverse(self, theta: float, prev: int, cur: int, energy: float | None = None) -> float:
        return phase_inverse(theta, self.j(prev, cur, energy), self.k_ratio(prev, cur, energy))

    def growth(self, theta: float, prev: int, cur: int, energy: float | None = None) -> float:
        return radius_factor(theta, self.j(prev, cur, energy), self.k_ratio(prev, cur, energy))

    def validate_energy(self, energy: float | None = None) -> None:
        """Raise SingularK if any species has K = 0 at this energy."""
        for g in range(self.n_species):
            if abs(self.k(g, energy)) < K_FLOOR:
                raise SingularK(
                    f"K({g}) = 0 at E = {self.energy if energy is None else energy}"
                )


def gap_condition(model: CanonicalModel, energy: float | None = None) -> bool:
    """True iff J^2(g', g) > 4 K(g)/K(g') for every ordered species pair.

    Energies satisfying this for all pairs cannot carry eigenvalues, so DOS
    engines should report g(E) = 0 there.
    """
    model.validate_energy(energy)
    for prev in range(model.n_species):
        for cur in range(model.n_species):
            jj = model.j(prev, cur, energy)
            if jj * jj <= 4.0 * model.k_ratio(prev, cur, energy):
                return False
    return True
