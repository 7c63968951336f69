"""Concrete cell models and ordered-chain analytic references.

The tight-binding chain with unit transfer integrals is the reference
model: J(eps_j) = E - eps_j and K = 1 for every species.  Any other cell
model plugs in by subclassing CanonicalModel (see model_from_matrices for
the transfer-matrix route).
"""

import math
from dataclasses import dataclass
from typing import Sequence

from . import canonical
from .canonical import CanonicalCoefficients, CanonicalModel
from .errors import OutOfBand, SingularK
from .xfer import TransferMatrix


@dataclass(frozen=True)
class TightBindingSpecies:
    """On-site energy of one species; transfer integrals are fixed to 1."""

    epsilon: float


@dataclass(frozen=True)
class TightBindingModel(CanonicalModel):
    """Diagonal-disorder tight-binding chain: J = E - eps_cur, K = 1."""

    epsilons: tuple[float, ...] = (0.0,)
    energy: float = 0.0

    @property
    def n_species(self) -> int:  # type: ignore[override]
        return len(self.epsilons)

    def at_energy(self, energy: float) -> "TightBindingModel":
        return TightBindingModel(self.epsilons, energy)

    def j(self, prev: int, cur: int, energy: float | None = None) -> float:
        e = self.energy if energy is None else energy
        return e - self.epsilons[cur]

    def k(self, cur: int, energy: float | None = None) -> float:
        return 1.0


def tb_model(
    species: Sequence[TightBindingSpecies] | Sequence[float], energy: float
) -> TightBindingModel:
    """Tight-binding model from a list of species (or bare on-site energies)."""
    if len(species) == 0:
        raise ValueError("species list must be non-empty")
    eps = tuple(s.epsilon if isinstance(s, TightBindingSpecies) else float(s) for s in species)
    return TightBindingModel(eps, energy)


def binary_species(eps: float) -> tuple[float, float]:
    """Binary-chain convention: on-site energies (-eps, +eps)."""
    return (-eps, eps)


def pure_chain_lambda(epsilon: float, energy: float) -> float:
    """Lyapunov exponent of the ordered chain: 0 inside the band
    |E - eps| < 2, arccosh(|E - eps|/2) outside."""
    x = abs(energy - epsilon) / 2.0
    if x <= 1.0:
        return 0.0
    return math.acosh(x)


def pure_chain_dos(epsilon: float, energy: float) -> float:
    """DOS per atom of the ordered chain, 1/(pi sqrt(4 - (E-eps)^2))."""
    d = energy - epsilon
    if abs(d) >= 2.0:
        raise OutOfBand(f"|E - eps| = {abs(d)} is not inside the band")
    return 1.0 / (math.pi * math.sqrt(4.0 - d * d))


def pure_chain_idos(epsilon: float, energy: float) -> float:
    """Integrated DOS of the ordered chain, clipped to [0, 1]."""
    d = energy - epsilon
    if d <= -2.0:
        return 0.0
    if d >= 2.0:
        return 1.0
    return 1.0 - math.acos(d / 2.0) / math.pi


@dataclass(frozen=True)
class TabulatedModel(CanonicalModel):
    """Canonical model frozen at one energy, with explicit J and K tables.

    j_table[prev][cur] and k_table[cur] must already be the real canonical
    coefficients.  Engines that sweep energy cannot use this model.
    """

    j_table: tuple[tuple[float, ...], ...] = ((0.0,),)
    k_table: tuple[float, ...] = (1.0,)
    energy: float = 0.0

    @property
    def n_species(self) -> int:  # type: ignore[override]
        return len(self.k_table)

    def _check(self, energy: float | None) -> None:
        if energy is not None and energy != self.energy:
            raise ValueError("TabulatedModel is frozen at a single energy")

    def j(self, prev: int, cur: int, energy: float | None = None) -> float:
        self._check(energy)
        return self.j_table[prev][cur]

    def k(self, cur: int, energy: float | None = None) -> float:
        self._check(energy)
        return self.k_table[cur]


def model_from_matrices(ms: Sequence[TransferMatrix], energy: float) -> TabulatedModel:
    """Canonical model of a chain built from one transfer matrix per species.

    J(prev, cur) combines the cells' canonical coefficients,
    J = sbar_cur + s_prev * kfun_cur / kfun_prev, and K(cur) = kfun_cur.
    """
    coeffs: list[CanonicalCoefficients] = [canonical.coefficients_from_matrix(m) for m in ms]
    for i, c in enumerate(coeffs):
        if c.is_degenerate:
            raise SingularK(f"species {i} has kfun = 0 at this energy")
    j_table = tuple(
        tuple(canonical.j_from_coefficients(prev, cur) for cur in coeffs) for prev in coeffs
    )
    return TabulatedModel(j_table, tuple(c.kfun for c in coeffs), energy)
