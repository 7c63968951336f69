"""Functional equations for the phase distributions in the thermodynamic limit.

For each species g there is a monotone distribution function W_g on [0, pi)
with W_g(0) = 0, W_g(pi) = 1 and the branch rule W_g(th + n pi) = W_g(th) + n,
fixed by

    W_g(th) = sum_b p_gb | W_b(Tinv(th; b, g)) - W_b(pi/2) + delta(b, g) |,

where delta(b, g) = 1 if K(g)/K(b) > 0 and 0 otherwise.  The solution gives
the inverse localization length

    1/xi = 1/2 sum_{g,b} c_g p_gb  int dW_g(th) log F(th; g, b)

and the DOS per atom g(E) = | sum_g sgn K(g) c_g dW_g(pi/2)/dE |.

The solver iterates the operator from the uniform ramp W = th/pi with
optional damping; there is no solution algorithm to inherit, so plain
damped fixed-point iteration with oscillation detection is used.
"""

import math
import time
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .canonical import CanonicalModel, phase_inverse_grid
from .chain import DisorderSpec, generate_sequence
from .errors import WireError

_MONOTONE_SLACK = 1e-9


@dataclass(frozen=True)
class PhaseDistributionTable:
    """W_g tabulated on the uniform grid th_i = i pi / n_theta, i = 0..n_theta."""

    values: np.ndarray
    species: int
    energy: float

    def __post_init__(self):
        v = self.values
        if v.ndim != 1 or v.size < 3 or (v.size - 1) % 2:
            raise ValueError("values must cover an even grid including both endpoints")
        if v[0] != 0.0 or v[-1] != 1.0:
            raise ValueError("table must be pinned to W(0) = 0, W(pi) = 1")
        if np.any(np.diff(v) < -_MONOTONE_SLACK):
            raise WireError("distribution table is not monotone within slack")
        v.flags.writeable = False

    @property
    def n_theta(self) -> int:
        return self.values.size - 1

    @property
    def thetas(self) -> np.ndarray:
        return np.linspace(0.0, math.pi, self.values.size)

    @property
    def at_half_pi(self) -> float:
        return float(self.values[self.n_theta // 2])

    def evaluate(self, angles) -> np.ndarray:
        """W at arbitrary angles using W(th + n pi) = W(th) + n and linear
        interpolation on the fundamental interval."""
        x = np.asarray(angles, dtype=float)
        winding = np.floor(x / math.pi)
        frac = x - winding * math.pi
        return np.interp(frac, self.thetas, self.values) + winding

    def write(self, path) -> None:
        """Two-column text export (theta, W) for plotting."""
        np.savetxt(
            path,
            np.column_stack([self.thetas, self.values]),
            header=f"species={self.species} energy={self.energy}",
        )


@dataclass(frozen=True)
class SolverReport:
    iterations: int
    residual: float
    converged: bool
    wall_time: float
    damping: float


class _OperatorData:
    """Grid-mapped inverse phase positions for every (predecessor, target) pair."""

    def __init__(self, model: CanonicalModel, spec: DisorderSpec, energy: float, n_theta: int):
        model.validate_energy(energy)
        if n_theta % 2:
            raise ValueError("n_theta must be even so that pi/2 is a grid node")
        self.thetas = np.linspace(0.0, math.pi, n_theta + 1)
        self.half_index = n_theta // 2
        self.pair = spec.pair_matrix
        n_sp = model.n_species
        self.n_species = n_sp
        self.positions = {}
        self.wrap = {}
        self.delta = {}
        self.all_increasing = True
        for cur in range(n_sp):
            for prev in range(n_sp):
                kr = model.k_ratio(prev, cur, energy)
                x = phase_inverse_grid(self.thetas, model.j(prev, cur, energy), kr)
                wrap = x < 0.0
                self.positions[prev, cur] = np.where(wrap, x + math.pi, x)
                self.wrap[prev, cur] = wrap.astype(float)
                self.delta[prev, cur] = 1.0 if kr > 0.0 else 0.0
                self.all_increasing &= kr > 0.0

    def apply(self, values: list[np.ndarray]) -> list[np.ndarray]:
        out = []
        for cur in range(self.n_species):
            acc = np.zeros_like(self.thetas)
            for prev in range(self.n_species):
                w = values[prev]
                mapped = np.interp(self.positions[prev, cur], self.thetas, w)
                arg = mapped - self.wrap[prev, cur] - w[self.half_index] + self.delta[prev, cur]
                if self.all_increasing and float(arg.min()) < -1e-9:
                    raise WireError(
                        "operator argument went negative for an all-increasing model"
                    )
                acc += self.pair[cur, prev] * np.abs(arg)
            acc[0] = 0.0
            acc[-1] = 1.0
            out.append(acc)
        return out


def _as_tables(values, species_energy) -> list[PhaseDistributionTable]:
    energy = species_energy
    tables = []
    for g, v in enumerate(values):
        v = np.clip(v, 0.0, 1.0)
        if np.any(np.diff(v) < -_MONOTONE_SLACK):
            raise WireError(f"solved W_{g} violates monotonicity beyond slack")
        v = np.maximum.accumulate(v)
        v[0], v[-1] = 0.0, 1.0
        tables.append(PhaseDistributionTable(v, g, energy))
    return tables


def functional_operator(
    tables: Sequence[PhaseDistributionTable], model: CanonicalModel, spec: DisorderSpec
) -> list[PhaseDistributionTable]:
    """One application of the functional-equation operator to per-species
    tables sharing one grid and energy."""
    energy = tables[0].energy
    n_theta = tables[0].n_theta
    if any(t.energy != energy or t.n_theta != n_theta for t in tables):
        raise ValueError("tables must share grid size and energy")
    data = _OperatorData(model, spec, energy, n_theta)
    out = data.apply([t.values for t in tables])
    return _as_tables(out, energy)


def solve_phase_distributions(
    model: CanonicalModel,
    spec: DisorderSpec,
    energy: float | None = None,
    n_theta: int = 4096,
    tol: float = 1e-10,
    max_iter: int = 100_000,
    damping: float = 1.0,
    initial: Sequence[PhaseDistributionTable] | None = None,
) -> tuple[list[PhaseDistributionTable], SolverReport]:
    """Damped fixed-point iteration of the functional equations.

    Starts from the uniform ramp W = th/pi (exact for the free chain) unless
    warm-start tables are given.  If the best residual seen so far stops
    improving for 20 consecutive iterations at full damping (the signature
    of a rotation-like neutral mode), the step is halved once; such
    ballistic energies may still exhaust max_iter, in which case the report
    carries converged = False.
    """
    e = model.energy if energy is None else energy
    data = _OperatorData(model, spec, e, n_theta)
    n_sp = model.n_species
    ramp = data.thetas / math.pi
    if initial is not None:
        if len(initial) != n_sp or initial[0].n_theta != n_theta:
            raise ValueError("warm-start tables do not match the requested grid")
        values = [np.array(t.values) for t in initial]
    else:
        values = [ramp.copy() for _ in range(n_sp)]
    t0 = time.perf_counter()
    omega = damping
    residual = math.inf
    best = math.inf
    stall = 0
    iterations = 0
    for iterations in range(1, max_iter + 1):
        updated = data.apply(values)
        new_residual = 0.0
        for g in range(n_sp):
            if omega != 1.0:
                updated[g] = (1.0 - omega) * values[g] + omega * updated[g]
            step = float(np.max(np.abs(updated[g] - values[g])))
            if step > new_residual:
                new_residual = step
        values = updated
        residual = new_residual
        if residual < tol:
            break
        if residual < 0.999 * best:
            best = residual
            stall = 0
        else:
            stall += 1
            if stall >= 20 and omega == 1.0:
                omega = 0.5
                stall = 0
    converged = residual < tol
    report = SolverReport(iterations, residual, converged, time.perf_counter() - t0, omega)
    return _as_tables(values, e), report


def tl_lyapunov(
    tables: Sequence[PhaseDistributionTable],
    model: CanonicalModel,
    spec: DisorderSpec,
    energy: float | None = None,
) -> float:
    """Inverse localization length as the Stieltjes sum
    1/2 sum_{g,b} c_g p_gb sum_i log F(th_{i+1/2}; g, b) (w_{i+1} - w_i)."""
    e = tables[0].energy if energy is None else energy
    thetas = tables[0].thetas
    mid = 0.5 * (thetas[1:] + thetas[:-1])
    cos_m, sin_m = np.cos(mid), np.sin(mid)
    pair = spec.pair_matrix
    conc = np.asarray(spec.concentrations)
    total = 0.0
    for g, table in enumerate(tables):
        dw = np.diff(table.values)
        for b in range(model.n_species):
            jj = model.j(g, b, e)
            kr = model.k_ratio(g, b, e)
            log_f = np.log(cos_m**2 + (jj * cos_m - kr * sin_m) ** 2)
            total += conc[g] * pair[g, b] * float(np.dot(log_f, dw))
    return 0.5 * total


def tl_localization_length(
    tables: Sequence[PhaseDistributionTable],
    model: CanonicalModel,
    spec: DisorderSpec,
    energy: float | None = None,
) -> float:
    """Localization length xi = 1/lambda; inf when lambda is below 1e-12."""
    lam = tl_lyapunov(tables, model, spec, energy)
    return 1.0 / lam if lam > 1e-12 else math.inf


class TlDosResult(NamedTuple):
    """Thermodynamic-limit DOS sweep; idos is sum_g c_g W_g(pi/2), the
    integrated DOS for models with K > 0."""

    energies: np.ndarray
    dos: np.ndarray
    idos: np.ndarray
    converged: np.ndarray


def tl_dos(
    model: CanonicalModel,
    spec: DisorderSpec,
    energies: Sequence[float],
    n_theta: int = 4096,
    tol: float = 1e-10,
    max_iter: int = 100_000,
) -> TlDosResult:
    """g(E) = |sum_g sgn K(g) c_g dW_g(pi/2)/dE| across an energy grid.

    Each solve warm-starts from the previous grid point; the derivative is
    taken across the grid (central differences, one-sided at the ends).
    Non-converged energies are flagged, never interpolated over.
    """
    e_grid = np.asarray(energies, dtype=float)
    if e_grid.size < 2:
        raise ValueError("need at least two energies to differentiate")
    conc = np.asarray(spec.concentrations)
    weighted = np.empty(e_grid.size)
    idos = np.empty(e_grid.size)
    flags = np.empty(e_grid.size, dtype=bool)
    tables = None
    for i, e in enumerate(e_grid):
        tables, report = solve_phase_distributions(
            model, spec, float(e), n_theta=n_theta, tol=tol, max_iter=max_iter, initial=tables
        )
        signs = np.array([math.copysign(1.0, model.k(g, float(e))) for g in range(model.n_species)])
        half = np.array([t.at_half_pi for t in tables])
        weighted[i] = float(np.dot(signs * conc, half))
        idos[i] = float(np.dot(conc, half))
        flags[i] = report.converged
    dos = np.abs(np.gradient(weighted, e_grid))
    return TlDosResult(e_grid, dos, idos, flags)


def empirical_phase_cdf(
    model: CanonicalModel,
    spec: DisorderSpec,
    energy: float | None = None,
    n: int = 1_000_000,
    seed: int | None = None,
    burn_in: int = 1000,
    n_theta: int = 4096,
) -> list[PhaseDistributionTable]:
    """Brute-force oracle: iterate the forward phase map along one disorder
    realization and return per-species empirical CDFs of theta mod pi,
    conditioned on the species just traversed."""
    e = model.energy if energy is None else energy
    model.validate_energy(e)
    if n < 10_000:
        raise ValueError("need at least 1e4 samples for a meaningful CDF")
    run_spec = spec if seed is None else DisorderSpec(
        spec.concentrations, spec.pair_probabilities, seed
    )
    seq = generate_sequence(run_spec, burn_in + n + 1)
    n_sp = model.n_species
    jt = [[model.j(p, c, e) for c in range(n_sp)] for p in range(n_sp)]
    kr = [[model.k_ratio(p, c, e) for c in range(n_sp)] for p in range(n_sp)]
    species = seq.species.tolist()
    samples: list[list[float]] = [[] for _ in range(n_sp)]
    theta = 0.0  # (x, y) = (Psi_1, Psi_0) = (1, 0) under hard-wall start
    atan2, cos, sin = math.atan2, math.cos, math.sin
    pi = math.pi
    prev_sp = species[0]
    for step, cur_sp in enumerate(species):
        c = cos(theta)
        s = sin(theta)
        theta = atan2(c, jt[prev_sp][cur_sp] * c - kr[prev_sp][cur_sp] * s) % pi
        if theta == pi:
            theta = 0.0
        if step >= burn_in:
            samples[cur_sp].append(theta)
        prev_sp = cur_sp
    thetas = np.linspace(0.0, math.pi, n_theta + 1)
    tables = []
    for g in range(n_sp):
        got = np.sort(np.asarray(samples[g]))
        if got.size == 0:
            raise WireError(f"species {g} never appeared; increase n or its concentration")
        values = np.searchsorted(got, thetas, side="left") / got.size
        values[0], values[-1] = 0.0, 1.0
        tables.append(PhaseDistributionTable(values, g, e))
    return tables


def ks_distance(a: PhaseDistributionTable, b: PhaseDistributionTable) -> float:
    """Kolmogorov distance between two tables on the same grid."""
    if a.n_theta != b.n_theta:
        raise ValueError("tables use different grids")
    return float(np.max(np.abs(a.values - b.values)))


def simplified_operator(
    w: PhaseDistributionTable, model: CanonicalModel, spec: DisorderSpec
) -> PhaseDistributionTable:
    """Single-equation operator for uncorrelated disorder on models with
    K = 1 and J depending only on the entered species:

        W(th) <- sum_g c_g W(Tinv(th; g)) - W(pi/2) + 1.
    """
    _require_simplifiable(model, spec)
    energy = w.energy
    thetas = w.thetas
    acc = np.zeros_like(w.values)
    half = w.at_half_pi
    for g in range(model.n_species):
        x = phase_inverse_grid(thetas, model.j(0, g, energy), 1.0)
        wrap = x < 0.0
        mapped = np.interp(np.where(wrap, x + math.pi, x), thetas, w.values) - wrap
        acc += spec.concentrations[g] * mapped
    acc += 1.0 - half
    acc[0], acc[-1] = 0.0, 1.0
    return _as_tables([acc], energy)[0]


def solve_simplified(
    model: CanonicalModel,
    spec: DisorderSpec,
    energy: float | None = None,
    n_theta: int = 4096,
    tol: float = 1e-10,
    max_iter: int = 100_000,
) -> tuple[PhaseDistributionTable, SolverReport]:
    """Fixed point of the simplified single equation (uncorrelated, K = 1)."""
    e = model.energy if energy is None else energy
    _require_simplifiable(model, spec)
    thetas = np.linspace(0.0, math.pi, n_theta + 1)
    table = PhaseDistributionTable(thetas / math.pi, 0, e)
    t0 = time.perf_counter()
    omega = 1.0
    residual = math.inf
    best = math.inf
    stall = 0
    iterations = 0
    for iterations in range(1, max_iter + 1):
        new = simplified_operator(table, model, spec)
        vals = new.values if omega == 1.0 else (1.0 - omega) * table.values + omega * new.values
        residual = float(np.max(np.abs(vals - table.values)))
        table = _as_tables([np.array(vals)], e)[0]
        if residual < tol:
            break
        if residual < 0.999 * best:
            best = residual
            stall = 0
        else:
            stall += 1
            if stall >= 20 and omega == 1.0:
                omega = 0.5
                stall = 0
    report = SolverReport(iterations, residual, residual < tol, time.perf_counter() - t0, omega)
    return table, report


def _require_simplifiable(model: CanonicalModel, spec: DisorderSpec) -> None:
    if not spec.is_uncorrelated:
        raise ValueError("simplified path requires uncorrelated disorder")
    for g in range(model.n_species):
        if abs(model.k(g) - 1.0) > 1e-12:
            raise ValueError("simplified path requires K = 1 for every species")
        if any(model.j(p, g) != model.j(0, g) for p in range(model.n_species)):
            raise ValueError("simplified path requires J independent of the predecessor")
