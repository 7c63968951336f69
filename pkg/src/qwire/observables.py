"""Localization and spectral observables on finite chains.

Lyapunov exponents come either from the transmission (lambda = -log T / 2N)
or from the state growth (lambda = log|Psi_N| / N, always the largest
exponent).  The integrated DOS comes from node counting: the ratio
recursion s_{j,j+1} = J - k_ratio / s_{j-1,j} is tallied per species where
s < 0, and the per-species derivatives are combined with sgn K weights.

Sign conventions: with unit transfer integrals the band disperses as
E = eps + 2 cos q, so the raw tally (strict sign oppositions of Psi) counts
eigenvalues ABOVE E; the envelope count (sign changes of (-1)^j Psi_j)
counts eigenvalues below and is the integrated DOS reported here.
"""

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .canonical import CanonicalModel
from .chain import DisorderSpec, StateTrajectory, WireSequence, generate_sequence
from .errors import ZeroState, ZeroTransmission


@dataclass(frozen=True)
class LyapunovEstimate:
    """Lyapunov exponent (per site) with its inverse, the localization length."""

    lam: float
    xi: float
    n_sites: int
    method: str

    @classmethod
    def of(cls, lam: float, n_sites: int, method: str) -> "LyapunovEstimate":
        xi = 1.0 / lam if lam > 0.0 else math.inf
        return cls(lam, xi, n_sites, method)


def lyapunov_from_transmission(transmission: float, n_sites: int) -> LyapunovEstimate:
    """lambda = -log T / (2N).  T must be positive; for chains long enough
    that T underflows, use lyapunov_from_log_transmission."""
    if n_sites < 1:
        raise ValueError("n_sites must be >= 1")
    if not 0.0 < transmission <= 1.0 + 1e-12:
        if transmission == 0.0:
            raise ZeroTransmission("T underflowed; use the log-T accumulator")
        raise ValueError(f"T = {transmission} is not in (0, 1]")
    lam = max(0.0, -math.log(min(transmission, 1.0)) / (2.0 * n_sites))
    return LyapunovEstimate.of(lam, n_sites, "from-T")


def lyapunov_from_log_transmission(log_abs_t: float, n_sites: int) -> LyapunovEstimate:
    """Same estimator fed with log|t| from a rescaled chain product."""
    lam = max(0.0, -log_abs_t / n_sites)
    return LyapunovEstimate.of(lam, n_sites, "from-T")


def lyapunov_from_state(trajectory: StateTrajectory) -> LyapunovEstimate:
    """lambda = (1/N) sum log|Psi_{j+1}/Psi_j|, telescoped to the log norm of
    the final state pair; this always estimates the largest exponent."""
    lam = trajectory.log_norm / trajectory.n_sites
    return LyapunovEstimate.of(max(0.0, lam), trajectory.n_sites, "from-state")


def complex_lyapunov(trajectory: StateTrajectory, n_sites: int | None = None) -> tuple[float, float]:
    """(re, im) of the complex Lyapunov exponent of a real-amplitude chain.

    re is the ordinary exponent; im is pi times the fraction of sites where
    the state envelope changes sign, so the integrated DOS is im / pi.
    """
    n = trajectory.n_sites if n_sites is None else n_sites
    re = trajectory.log_norm / n
    im = math.pi * trajectory.envelope_changes / n
    return re, im


def ipr(amplitudes: Sequence[float]) -> float:
    """Inverse participation ratio sum|Psi|^4 / (sum|Psi|^2)^2 in [1/N, 1]."""
    a = np.abs(np.asarray(amplitudes, dtype=float))
    peak = a.max(initial=0.0)
    if peak == 0.0:
        raise ZeroState("all amplitudes vanish")
    a = a / peak  # scale invariance; avoids overflow for growing states
    s2 = float(np.sum(a * a))
    s4 = float(np.sum(a**4))
    return s4 / (s2 * s2)


@dataclass(frozen=True)
class NodeCountTally:
    """Per-species counts of negative s-ratio events over one chain."""

    counts: np.ndarray
    site_counts: np.ndarray
    energy: float
    n_steps: int

    @property
    def fractions(self) -> np.ndarray:
        """Per-species sign-change concentrations N_alpha(E)."""
        return self.counts / self.n_steps


def sign_change_tally(
    model: CanonicalModel, seq: WireSequence, energy: float | None = None
) -> NodeCountTally:
    """Tally negative s_{j,j+1} per species via the overflow-free ratio
    recursion s = J - k_ratio / s.

    Projective conventions: 1/inf = 0 (so s_next = J), and s = 0 maps to
    -inf*sgn(k_ratio), which counts as a crossing when negative.
    """
    e = model.energy if energy is None else energy
    model.validate_energy(e)
    n_sp = model.n_species
    jt = [[model.j(p, c, e) for c in range(n_sp)] for p in range(n_sp)]
    kr = [[model.k_ratio(p, c, e) for c in range(n_sp)] for p in range(n_sp)]
    species = seq.species.tolist()
    counts = [0] * n_sp
    sites = [0] * n_sp
    inf = math.inf
    s = inf  # s_{0,1} = Psi_1/Psi_0 with the hard wall at Psi_0 = 0
    prev_sp = species[0]
    for cur_sp in species:
        if s == 0.0:
            s = -inf if kr[prev_sp][cur_sp] > 0.0 else inf
        elif s == inf or s == -inf:
            s = jt[prev_sp][cur_sp]
        else:
            s = jt[prev_sp][cur_sp] - kr[prev_sp][cur_sp] / s
        if s < 0.0:
            counts[cur_sp] += 1
        sites[cur_sp] += 1
        prev_sp = cur_sp
    return NodeCountTally(
        np.asarray(counts), np.asarray(sites), e, len(species)
    )


class NodeDosResult(NamedTuple):
    """Node-counting DOS table over an energy grid with frozen disorder."""

    energies: np.ndarray
    dos: np.ndarray
    idos: np.ndarray
    seed: int


def node_count_dos(
    model: CanonicalModel,
    spec: DisorderSpec,
    energies: Sequence[float],
    n_sites: int,
) -> NodeDosResult:
    """DOS per atom g(E) = |sum_a sgn K(a) dN_a/dE| on an energy grid.

    One disorder realization (from spec.seed) is frozen across the whole
    grid so the numerical derivative sees only spectral motion.  Central
    differences inside the grid, one-sided at the ends.  The returned IDOS
    is 1 - sum_a sgn K(a) N_a(E), valid for models with K > 0.
    """
    e_grid = np.asarray(energies, dtype=float)
    if e_grid.size < 2:
        raise ValueError("need at least two energies to differentiate")
    seq = generate_sequence(spec, n_sites)
    n_sp = model.n_species
    fractions = np.empty((e_grid.size, n_sp))
    signs = np.empty((e_grid.size, n_sp))
    for i, e in enumerate(e_grid):
        tally = sign_change_tally(model, seq, float(e))
        fractions[i] = tally.fractions
        signs[i] = [math.copysign(1.0, model.k(g, float(e))) for g in range(n_sp)]
    weighted = np.sum(signs * fractions, axis=1)
    grad = np.gradient(weighted, e_grid)
    dos = np.abs(grad)
    idos = 1.0 - weighted
    return NodeDosResult(e_grid, dos, idos, spec.seed)


def lce_pair_defect(model: CanonicalModel, seq: WireSequence, energy: float | None = None) -> float:
    """(1/N) log|det P_N ... P_1|, which vanishes in the thermodynamic limit
    because the two Lyapunov exponents come as a pair {+lambda, -lambda}.
    det P_j = k_ratio_j, so the sum telescopes over the K values."""
    e = model.energy if energy is None else energy
    model.validate_energy(e)
    species = seq.species.tolist()
    total = 0.0
    prev_sp = species[0]
    for cur_sp in species:
        total += math.log(abs(model.k_ratio(prev_sp, cur_sp, e)))
        prev_sp = cur_sp
    return total / len(species)


def idos_from_transmission_phase(t_values: Sequence[complex], n_sites: int) -> np.ndarray:
    """Cross-check IDOS n(E) = (1/pi N) arg t*(E) from the transmission
    amplitude on a dense increasing energy grid.

    The phase is unwrapped along the grid and anchored so that the first
    grid point (which must lie below the spectrum) has n = 0.
    """
    phases = np.unwrap([cmath.phase(t) for t in t_values])
    n_of_e = -(phases - phases[0]) / (math.pi * n_sites)
    return n_of_e
