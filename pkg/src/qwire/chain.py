"""Disorder sequences and finite-chain propagation engines.

Engines acting on a finite wire:
  * propagate_canonical: the three-term recursion under hard-wall boundary
    conditions, with periodic rescaling of the state pair.
  * transmission_discretized: scattering of a sampled continuous potential
    through the product of discretized-Schroedinger companion matrices.
  * transmission_p_matrix: scattering of a canonical (lattice) chain through
    the product of its P matrices, between ideal eps = 0 leads.
  * transmission_matrix_chain: scattering from a product of continuous
    transfer matrices with log-magnitude accumulation.
"""

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .canonical import CanonicalModel
from .errors import (
    InvalidSpec,
    MismatchedWavenumber,
    OutOfBand,
    SingularMatrix,
    UnstableProduct,
)
from .xfer import ScatteringAmplitudes, TransferMatrix

#: RNG algorithm recorded in sequence metadata; bit-exact given a 64-bit seed
RNG_ALGORITHM = "PCG64"

_NORM_TOL = 1e-12


@dataclass(frozen=True)
class DisorderSpec:
    """Species concentrations, optional pair-probability rows, RNG seed.

    pair_probabilities[g][b] is the probability that a b cell follows a g
    cell; None means uncorrelated disorder, p[g][b] = c[b].  The
    concentrations must be the stationary composition of the pair chain.
    """

    concentrations: tuple[float, ...]
    pair_probabilities: tuple[tuple[float, ...], ...] | None = None
    seed: int = 0

    def __post_init__(self):
        c = self.concentrations
        if len(c) == 0:
            raise InvalidSpec("at least one species required")
        if any(x < 0.0 or x > 1.0 for x in c):
            raise InvalidSpec("concentrations must lie in [0, 1]")
        if abs(sum(c) - 1.0) > _NORM_TOL:
            raise InvalidSpec(f"concentrations sum to {sum(c)!r}, not 1")
        p = self.pair_probabilities
        if p is not None:
            n = len(c)
            if len(p) != n or any(len(row) != n for row in p):
                raise InvalidSpec("pair-probability table must be square")
            for g, row in enumerate(p):
                if any(x < 0.0 or x > 1.0 for x in row):
                    raise InvalidSpec(f"row {g} has entries outside [0, 1]")
                if abs(sum(row) - 1.0) > _NORM_TOL:
                    raise InvalidSpec(f"row {g} sums to {sum(row)!r}, not 1")
            for b in range(n):
                flux = sum(c[g] * p[g][b] for g in range(n))
                if abs(flux - c[b]) > _NORM_TOL:
                    raise InvalidSpec(
                        f"concentrations are not stationary: sum_g c_g p_gb = {flux!r} "
                        f"for species {b}, expected {c[b]!r}"
                    )

    @property
    def n_species(self) -> int:
        return len(self.concentrations)

    @property
    def is_uncorrelated(self) -> bool:
        return self.pair_probabilities is None

    @property
    def pair_matrix(self) -> np.ndarray:
        """Effective p[g][b]; for uncorrelated disorder the rows repeat c."""
        if self.pair_probabilities is None:
            return np.tile(np.asarray(self.concentrations), (self.n_species, 1))
        return np.asarray(self.pair_probabilities)

    @classmethod
    def uncorrelated(cls, concentrations: Sequence[float], seed: int = 0) -> "DisorderSpec":
        return cls(tuple(float(x) for x in concentrations), None, seed)

    @classmethod
    def single_species(cls, seed: int = 0) -> "DisorderSpec":
        return cls((1.0,), None, seed)


@dataclass(frozen=True)
class WireSequence:
    """Ordered species ids of one disorder realization."""

    species: np.ndarray
    seed: int
    rng: str = RNG_ALGORITHM

    def __post_init__(self):
        self.species.flags.writeable = False

    def __len__(self) -> int:
        return len(self.species)


def generate_sequence(spec: DisorderSpec, n: int) -> WireSequence:
    """Sample n sites: the first from the stationary composition c, each
    successor from the pair-probability row of its predecessor.
    Deterministic given (spec, seed, n)."""
    if n < 1:
        raise ValueError("sequence length must be >= 1")
    rng = np.random.default_rng(spec.seed)
    if spec.is_uncorrelated:
        species = rng.choice(spec.n_species, size=n, p=np.asarray(spec.concentrations))
        return WireSequence(species.astype(np.int64), spec.seed)
    rows = np.cumsum(spec.pair_matrix, axis=1).tolist()
    start = np.cumsum(np.asarray(spec.concentrations)).tolist()
    u = rng.random(n)
    out = np.empty(n, dtype=np.int64)
    last = spec.n_species - 1
    s = min(bisect_right(start, u[0]), last)
    out[0] = s
    for i in range(1, n):
        s = min(bisect_right(rows[s], u[i]), last)
        out[i] = s
    return WireSequence(out, spec.seed)


def constant_sequence(species_id: int, n: int) -> WireSequence:
    """Ordered chain of a single species (no randomness)."""
    return WireSequence(np.full(n, species_id, dtype=np.int64), seed=0, rng="constant")


def write_sequence(seq: WireSequence, path) -> None:
    """Debug export, one line per site: index and species id."""
    with open(path, "w") as fh:
        fh.write(f"# seed={seq.seed} rng={seq.rng} n={len(seq)}\n")
        for i, s in enumerate(seq.species.tolist()):
            fh.write(f"{i} {s}\n")


@dataclass(frozen=True)
class StateTrajectory:
    """Result of one hard-wall propagation.

    log_norm is log of the Euclidean norm of the final pair
    (Psi_{N+1}, Psi_N) including all accumulated rescalings, so
    log_norm / n_sites estimates the largest Lyapunov exponent.
    raw_changes counts strict sign oppositions of consecutive non-zero
    amplitudes (zeros bridged); envelope_changes counts sign changes of
    (-1)^j Psi_j, the quantity whose density is the integrated DOS.
    signs holds the per-site amplitude signs; per-site log magnitudes are
    kept only when the propagation stored amplitudes.
    """

    n_sites: int
    log_norm: float
    raw_changes: int
    envelope_changes: int
    theta: float
    signs: np.ndarray
    log_abs: np.ndarray | None = None

    def amplitudes(self) -> np.ndarray:
        """Stored amplitudes for sites 1..N, normalized to max |Psi| = 1."""
        if self.log_abs is None:
            raise ValueError("propagation was run without store_amplitudes=True")
        top = np.max(self.log_abs[np.isfinite(self.log_abs)])
        out = np.exp(self.log_abs - top)
        out[~np.isfinite(self.log_abs)] = 0.0
        return out * self.signs


def propagate_canonical(
    model: CanonicalModel,
    seq: WireSequence,
    store_amplitudes: bool = False,
    rescale_every: int = 32,
) -> StateTrajectory:
    """Run Psi_{j+1} = J Psi_j - (K_j/K_{j-1}) Psi_{j-1} with Psi_0 = 0,
    Psi_1 = 1 over the whole sequence.

    The state pair is renormalized by its max-abs every `rescale_every`
    steps, with the log accumulated, so log magnitudes stay finite for any
    chain length.  The leading step has no defined predecessor species; it
    uses the first site's species, which is irrelevant because Psi_0 = 0
    kills the K-ratio term.
    """
    model.validate_energy()
    n_sp = model.n_species
    jt = [[model.j(p, c) for c in range(n_sp)] for p in range(n_sp)]
    kr = [[model.k_ratio(p, c) for c in range(n_sp)] for p in range(n_sp)]
    species = seq.species.tolist()
    n = len(species)
    log_abs = np.empty(n, dtype=float) if store_amplitudes else None
    signs = np.empty(n, dtype=np.int8)
    signs[0] = 1

    psi_prev = 0.0
    psi = 1.0
    log_scale = 0.0
    raw = 0
    env = 0
    last_sign = 1  # sign of Psi_1
    last_idx = 1
    if store_amplitudes:
        log_abs[0] = 0.0
    prev_sp = species[0]
    logf = math.log
    for j in range(1, n + 1):
        cur_sp = species[j - 1]
        psi, psi_prev = jt[prev_sp][cur_sp] * psi - kr[prev_sp][cur_sp] * psi_prev, psi
        prev_sp = cur_sp
        if psi != 0.0:
            sgn = 1 if psi > 0.0 else -1
            gap = j + 1 - last_idx
            flip = sgn != last_sign
            raw += flip
            env += flip == (gap % 2 == 0)
            last_sign = sgn
            last_idx = j + 1
        if j < n:
            signs[j] = 0 if psi == 0.0 else (1 if psi > 0.0 else -1)
            if store_amplitudes:
                mag = abs(psi)
                log_abs[j] = logf(mag) + log_scale if mag > 0.0 else -math.inf
        if j % rescale_every == 0:
            m = max(abs(psi), abs(psi_prev))
            if m > 0.0:
                psi /= m
                psi_prev /= m
                log_scale += logf(m)
    log_norm = log_scale + logf(math.hypot(psi, psi_prev))
    theta = math.atan2(psi_prev, psi) % math.pi
    return StateTrajectory(n, log_norm, raw, env, theta, signs, log_abs)


class LatticeTransmission(NamedTuple):
    """Transmission of a finite chain between ideal leads, with the running
    log|t| trace when checkpoints were requested."""

    transmission: float
    reflection: float
    log_abs_t: float
    lengths: np.ndarray
    log_t_trace: np.ndarray


def _companion_transmission(
    a, b, c, d, cos_q: float, sin_q: float, log_scale: float
) -> tuple[float, float, float]:
    """T, R and log|t| from a (rescaled) companion-matrix product and the
    lead Bloch phase q, by matching e^{iqn} + r e^{-iqn} -> t e^{iqn}.

    cos_q and sin_q are passed separately so callers can evaluate them
    without the ill-conditioned arccos near the band edges."""
    eiq = complex(cos_q, sin_q)
    denom = c - b + d * eiq - a / eiq
    mag = abs(denom)
    if mag == 0.0 or not math.isfinite(mag):
        raise UnstableProduct("boundary-matching denominator is singular")
    log_t = math.log(2.0 * abs(sin_q)) - log_scale - math.log(mag)
    transmission = math.exp(2.0 * log_t) if 2.0 * log_t > -745.0 else 0.0
    reflection = (abs(a - d + b / eiq - c * eiq) / mag) ** 2
    return transmission, reflection, log_t


def transmission_discretized(
    potential_samples: Sequence[float], dx: float, k: float
) -> tuple[float, float]:
    """T and R of a sampled potential from the discretized Schroedinger
    recursion psi_{n+1} = {(V_n - k^2) dx^2 + 2} psi_n - psi_{n-1}.

    Lead matching uses the lattice Bloch phase phi = arccos(1 - (k dx)^2/2),
    which equals k dx + O((k dx)^3) and makes the zero potential exactly
    transparent at any step size.
    """
    if dx <= 0.0:
        raise ValueError("dx must be positive")
    kdx = k * dx
    if not 0.0 < kdx < math.pi:
        raise ValueError("k*dx must lie in (0, pi)")
    k2dx2 = (k * k) * (dx * dx)
    cos_phi = 1.0 - 0.5 * k2dx2  # exactly half the free diagonal element
    if cos_phi <= -1.0:
        raise OutOfBand("k*dx >= 2: lead phase not resolvable on this grid")
    sin_phi = math.sqrt((0.5 * k2dx2) * (2.0 - 0.5 * k2dx2))
    a, b = 1.0, 0.0
    c, d = 0.0, 1.0
    log_scale = 0.0
    for i, v in enumerate(potential_samples):
        diag = v * dx * dx - k2dx2 + 2.0
        a, b, c, d = diag * a - c, diag * b - d, a, b
        if i % 64 == 63:
            m = max(abs(a), abs(b), abs(c), abs(d))
            if not math.isfinite(m):
                raise UnstableProduct("matrix product overflowed between rescales")
            if m > 1e100:
                a /= m
                b /= m
                c /= m
                d /= m
                log_scale += math.log(m)
    transmission, reflection, _ = _companion_transmission(
        a, b, c, d, cos_phi, sin_phi, log_scale
    )
    return transmission, reflection


def transmission_p_matrix(
    model: CanonicalModel,
    seq: WireSequence,
    energy: float | None = None,
    record_every: int = 0,
) -> LatticeTransmission:
    """Scattering of a canonical chain between ideal tight-binding leads.

    The chain's P-matrix product is accumulated in rescaled form (both
    basis columns share one scale) and matched to lead waves with Bloch
    phase q = arccos(E/2).  Requires |E| < 2 (propagating leads) and a
    model with K = 1, i.e. unit-determinant P matrices.
    """
    e = model.energy if energy is None else energy
    if abs(e) >= 2.0:
        raise OutOfBand(f"E = {e} is outside the lead band (-2, 2)")
    n_sp = model.n_species
    for g in range(n_sp):
        if abs(model.k(g, energy) - 1.0) > 1e-9:
            raise ValueError("transmission_p_matrix requires a K = 1 model")
    cos_q = 0.5 * e
    sin_q = math.sqrt((1.0 - cos_q) * (1.0 + cos_q))
    jt = [[model.j(p, c, energy) for c in range(n_sp)] for p in range(n_sp)]
    species = seq.species.tolist()
    n = len(species)
    # columns of the running product: (a, c) = P...(1, 0), (b, d) = P...(0, 1)
    a, b = 1.0, 0.0
    c, d = 0.0, 1.0
    log_scale = 0.0
    lengths: list[int] = []
    trace: list[float] = []
    prev_sp = species[0]
    for j in range(1, n + 1):
        cur_sp = species[j - 1]
        jj = jt[prev_sp][cur_sp]
        a, b, c, d = jj * a - c, jj * b - d, a, b
        prev_sp = cur_sp
        if j % 32 == 0:
            m = max(abs(a), abs(b), abs(c), abs(d))
            if m > 0.0:
                a /= m
                b /= m
                c /= m
                d /= m
                log_scale += math.log(m)
        if record_every and (j % record_every == 0 or j == n):
            _, _, log_t = _companion_transmission(a, b, c, d, cos_q, sin_q, log_scale)
            lengths.append(j)
            trace.append(log_t)
    transmission, reflection, log_t = _companion_transmission(a, b, c, d, cos_q, sin_q, log_scale)
    return LatticeTransmission(
        transmission, reflection, log_t, np.asarray(lengths), np.asarray(trace)
    )


def transmission_matrix_chain(
    ms: Sequence[TransferMatrix], with_log_t: bool = False
) -> ScatteringAmplitudes | tuple[ScatteringAmplitudes, float]:
    """Scattering amplitudes of a chain of continuous transfer matrices.

    The product is accumulated with max-abs rescaling so log|t| stays exact
    for chains up to ~1e6 units even when T itself underflows; in that case
    the returned t is a complex zero and the log should be used instead.
    """
    if not ms:
        raise ValueError("chain must be non-empty")
    k0 = ms[0].k
    a, b, c, d = ms[0].m11, ms[0].m12, ms[0].m21, ms[0].m22
    log_scale = 0.0
    for i, m in enumerate(ms[1:], start=1):
        if abs(m.k - k0) > 1e-12 * max(abs(k0), 1.0):
            raise MismatchedWavenumber(f"wavenumber mismatch at unit {i}")
        b11, b12, b21, b22 = m.m11, m.m12, m.m21, m.m22
        a, b, c, d = (
            b11 * a + b12 * c,
            b11 * b + b12 * d,
            b21 * a + b22 * c,
            b21 * b + b22 * d,
        )
        if i % 32 == 0:
            mx = max(abs(a), abs(b), abs(c), abs(d))
            if not math.isfinite(mx):
                raise UnstableProduct("transfer-matrix product overflowed")
            if mx > 0.0:
                a /= mx
                b /= mx
                c /= mx
                d /= mx
                log_scale += math.log(mx)
    if abs(d) < 1e-300:
        raise SingularMatrix("M22 of the composed chain vanishes")
    log_abs_t = -log_scale - math.log(abs(d))
    phase = d.conjugate() / abs(d)
    t = phase * math.exp(log_abs_t) if log_abs_t > -745.0 else 0.0j
    amps = ScatteringAmplitudes(t, -c / d, b / d)
    if with_log_t:
        return amps, log_abs_t
    return amps
