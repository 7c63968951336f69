"""Batch command-line front end.

Subcommands `transmit`, `dos` and `lyapunov` read a single JSON config,
sweep an energy grid and emit one record per energy (per engine in `both`
mode) as CSV or JSON.  Exit codes: 0 success, 2 config error, 3 numerical
failure.  CSV columns are a public contract:

    energy,T,R,lambda,xi,g,idos,ipr,engine,converged,seed
"""

import argparse
import concurrent.futures
import hashlib
import json
import math
import os
import sys
import time
from dataclasses import dataclass, field
from typing import Any, Sequence

from . import __version__, chain, models, observables, tlsolver
from .chain import RNG_ALGORITHM, DisorderSpec
from .errors import ConfigError, WireError

CSV_COLUMNS = ["energy", "T", "R", "lambda", "xi", "g", "idos", "ipr", "engine", "converged", "seed"]


@dataclass
class EnergyScanRecord:
    """One output row; missing values stay None and serialize as empty."""

    energy: float
    engine: str
    seed: int | None = None
    T: float | None = None
    R: float | None = None
    lam: float | None = None
    xi: float | None = None
    g: float | None = None
    idos: float | None = None
    ipr: float | None = None
    converged: bool | None = None

    def as_dict(self) -> dict[str, Any]:
        return {
            "energy": self.energy,
            "T": self.T,
            "R": self.R,
            "lambda": self.lam,
            "xi": self.xi,
            "g": self.g,
            "idos": self.idos,
            "ipr": self.ipr,
            "engine": self.engine,
            "converged": self.converged,
            "seed": self.seed,
        }

    def csv_row(self) -> str:
        def fmt(v):
            if v is None:
                return ""
            if isinstance(v, bool):
                return "true" if v else "false"
            if isinstance(v, float):
                return "" if math.isnan(v) else repr(float(v))
            return str(v)

        d = self.as_dict()
        return ",".join(fmt(d[c]) for c in CSV_COLUMNS)


@dataclass
class RunConfig:
    """Validated run configuration."""

    model_type: str
    epsilons: tuple[float, ...]
    barrier_height: float
    barrier_length: float
    concentrations: tuple[float, ...]
    pair_probabilities: tuple[tuple[float, ...], ...] | None
    seed: int
    engine: str
    energies: tuple[float, ...]
    n_sites: int
    n_theta: int
    tol: float
    de: float
    dx: float
    max_iter: int
    output: str | None
    fmt: str
    raw: dict[str, Any] = field(repr=False, default_factory=dict)

    @property
    def disorder(self) -> DisorderSpec:
        return DisorderSpec(self.concentrations, self.pair_probabilities, self.seed)

    def tb(self, energy: float = 0.0) -> models.TightBindingModel:
        return models.tb_model(self.epsilons, energy)


def _get(d: dict, path: str, default=None):
    node = d
    for part in path.split("."):
        if not isinstance(node, dict) or part not in node:
            return default
        node = node[part]
    return node


def load_config(raw: dict[str, Any]) -> RunConfig:
    """Validate a config dict, aggregating every finding into one error."""
    problems: list[str] = []

    def need(cond: bool, msg: str):
        if not cond:
            problems.append(msg)

    model_type = _get(raw, "model.type", "tight-binding")
    need(
        model_type in ("tight-binding", "square-barrier", "zero-potential"),
        f"model.type: unknown type {model_type!r}",
    )
    eps = _get(raw, "model.epsilons", [0.0])
    need(
        isinstance(eps, list) and len(eps) >= 1 and all(isinstance(x, (int, float)) for x in eps),
        "model.epsilons: must be a non-empty list of numbers",
    )
    barrier_height = _get(raw, "model.height", 1.0)
    barrier_length = _get(raw, "model.length", 1.0)
    need(isinstance(barrier_height, (int, float)), "model.height: must be a number")
    need(
        isinstance(barrier_length, (int, float)) and barrier_length > 0,
        "model.length: must be a positive number",
    )

    conc = _get(raw, "disorder.concentrations")
    if conc is None and isinstance(eps, list):
        conc = [1.0 / len(eps)] * len(eps)
    need(
        isinstance(conc, list) and all(isinstance(x, (int, float)) for x in conc),
        "disorder.concentrations: must be a list of numbers",
    )
    pair = _get(raw, "disorder.pair_probabilities")
    if pair is not None:
        need(
            isinstance(pair, list) and all(isinstance(r, list) for r in pair),
            "disorder.pair_probabilities: must be a list of rows",
        )
    seed = _get(raw, "disorder.seed", 12345)
    need(isinstance(seed, int), "disorder.seed: must be an integer")

    engine = _get(raw, "engine", "finite")
    need(engine in ("finite", "tl", "both"), f"engine: must be finite|tl|both, got {engine!r}")

    energies: list[float] = []
    e_block = _get(raw, "energies")
    if isinstance(e_block, dict) and "values" in e_block:
        vals = e_block["values"]
        if isinstance(vals, list) and all(isinstance(x, (int, float)) for x in vals) and vals:
            energies = [float(x) for x in vals]
        else:
            problems.append("energies.values: must be a non-empty list of numbers")
    elif isinstance(e_block, dict):
        lo, hi, step = e_block.get("min"), e_block.get("max"), e_block.get("step")
        if all(isinstance(x, (int, float)) for x in (lo, hi, step)) and step > 0 and hi >= lo:
            n = int(round((hi - lo) / step)) + 1
            energies = [round(lo + i * step, 12) for i in range(n)]
        else:
            problems.append("energies: need min <= max and step > 0, or an explicit values list")
    else:
        problems.append("energies: block is required")

    params = _get(raw, "parameters", {}) or {}
    n_sites = params.get("n_sites", 100_000)
    n_theta = params.get("n_theta", 4096)
    tol = params.get("tol", 1e-10)
    de = params.get("de", 1e-3)
    dx = params.get("dx", 0.0)
    max_iter = params.get("max_iter", 100_000)
    need(isinstance(n_sites, int) and n_sites >= 2, "parameters.n_sites: integer >= 2 required")
    need(
        isinstance(n_theta, int) and n_theta >= 16 and n_theta % 2 == 0,
        "parameters.n_theta: even integer >= 16 required",
    )
    need(isinstance(tol, (int, float)) and tol > 0, "parameters.tol: positive number required")
    need(isinstance(de, (int, float)) and de > 0, "parameters.de: positive number required")
    need(isinstance(dx, (int, float)) and dx >= 0, "parameters.dx: non-negative number required")
    need(isinstance(max_iter, int) and max_iter >= 1, "parameters.max_iter: integer >= 1 required")

    output = _get(raw, "output.path")
    fmt = _get(raw, "output.format", "csv")
    need(fmt in ("csv", "json"), f"output.format: must be csv or json, got {fmt!r}")

    if not problems and isinstance(conc, list) and isinstance(eps, list):
        if len(conc) != len(eps):
            problems.append("disorder.concentrations: length must match model.epsilons")
        else:
            try:
                DisorderSpec(
                    tuple(float(x) for x in conc),
                    tuple(tuple(float(x) for x in r) for r in pair) if pair else None,
                    seed,
                )
            except WireError as exc:
                problems.append(f"disorder: {exc}")

    if problems:
        raise ConfigError("invalid configuration:\n  " + "\n  ".join(problems))

    return RunConfig(
        model_type=model_type,
        epsilons=tuple(float(x) for x in eps),
        barrier_height=float(barrier_height),
        barrier_length=float(barrier_length),
        concentrations=tuple(float(x) for x in conc),
        pair_probabilities=tuple(tuple(float(x) for x in r) for r in pair) if pair else None,
        seed=seed,
        engine=engine,
        energies=tuple(energies),
        n_sites=n_sites,
        n_theta=n_theta,
        tol=float(tol),
        de=float(de),
        dx=float(dx),
        max_iter=max_iter,
        output=output,
        fmt=fmt,
        raw=raw,
    )


def _transmit_point(args) -> EnergyScanRecord:
    cfg, energy = args
    if cfg.model_type == "tight-binding":
        seq = chain.generate_sequence(cfg.disorder, cfg.n_sites)
        res = chain.transmission_p_matrix(cfg.tb(energy), seq, energy)
        return EnergyScanRecord(
            energy, "finite", cfg.seed, T=res.transmission, R=res.reflection, converged=True
        )
    if energy <= 0.0:
        raise WireError(f"continuous potentials need E > 0, got {energy}")
    k = math.sqrt(energy)
    dx = cfg.dx if cfg.dx > 0 else min(0.01 / k, cfg.barrier_length / 100.0)
    n = max(1, int(round(cfg.barrier_length / dx)))
    height = 0.0 if cfg.model_type == "zero-potential" else cfg.barrier_height
    t, r = chain.transmission_discretized([height] * n, dx, k)
    return EnergyScanRecord(energy, "finite", None, T=t, R=r, converged=True)


def _finite_point(args) -> EnergyScanRecord:
    cfg, energy = args
    model = cfg.tb(energy)
    seq = chain.generate_sequence(cfg.disorder, cfg.n_sites)
    traj = chain.propagate_canonical(model, seq, store_amplitudes=True)
    est = observables.lyapunov_from_state(traj)
    _, im = observables.complex_lyapunov(traj)
    state_ipr = observables.ipr(traj.amplitudes())
    return EnergyScanRecord(
        energy,
        "finite",
        cfg.seed,
        lam=est.lam,
        xi=est.xi if math.isfinite(est.xi) else None,
        idos=im / math.pi,
        ipr=state_ipr,
        converged=True,
    )


def _pool_map(fn, items, threads: int):
    if threads == 0:
        threads = os.cpu_count() or 1
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with concurrent.futures.ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def cmd_transmit(cfg: RunConfig, threads: int = 1) -> list[EnergyScanRecord]:
    return _pool_map(_transmit_point, [(cfg, e) for e in cfg.energies], threads)


def cmd_lyapunov(cfg: RunConfig, mode: str, threads: int = 1) -> list[EnergyScanRecord]:
    records: list[EnergyScanRecord] = []
    if mode in ("finite", "both"):
        records.extend(_pool_map(_finite_point, [(cfg, e) for e in cfg.energies], threads))
    if mode in ("tl", "both"):
        tables = None
        for e in cfg.energies:
            model = cfg.tb(e)
            tables, report = tlsolver.solve_phase_distributions(
                model, cfg.disorder, e, n_theta=cfg.n_theta, tol=cfg.tol,
                max_iter=cfg.max_iter, initial=tables,
            )
            lam = tlsolver.tl_lyapunov(tables, model, cfg.disorder, e)
            lam = lam if lam > 1e-12 else 0.0
            records.append(
                EnergyScanRecord(
                    e,
                    "tl",
                    cfg.seed,
                    lam=lam,
                    xi=1.0 / lam if lam else None,
                    converged=report.converged,
                )
            )
    return records


def cmd_dos(cfg: RunConfig, mode: str, threads: int = 1) -> list[EnergyScanRecord]:
    # dense sweeps differentiate across the requested grid; sparse requests
    # fall back to a local +-de stencil around each point
    energies = list(cfg.energies)
    if len(energies) >= 3:
        eval_grid = energies
        pick = range(len(energies))
    else:
        points = set()
        for e in energies:
            points.update((e - cfg.de, e, e + cfg.de))
        eval_grid = sorted(points)
        pick = [eval_grid.index(e) for e in energies]

    records: list[EnergyScanRecord] = []
    if mode in ("finite", "both"):
        model = cfg.tb()
        result = observables.node_count_dos(model, cfg.disorder, eval_grid, cfg.n_sites)
        for i in pick:
            records.append(
                EnergyScanRecord(
                    float(result.energies[i]),
                    "finite",
                    cfg.seed,
                    g=float(result.dos[i]),
                    idos=float(result.idos[i]),
                    converged=True,
                )
            )
    if mode in ("tl", "both"):
        model = cfg.tb()
        result = tlsolver.tl_dos(
            model, cfg.disorder, eval_grid, n_theta=cfg.n_theta, tol=cfg.tol,
            max_iter=cfg.max_iter,
        )
        for i in pick:
            records.append(
                EnergyScanRecord(
                    float(result.energies[i]),
                    "tl",
                    cfg.seed,
                    g=float(result.dos[i]),
                    idos=float(result.idos[i]),
                    converged=bool(result.converged[i]),
                )
            )
    return records


def _config_hash(raw: dict) -> str:
    return hashlib.sha256(json.dumps(raw, sort_keys=True).encode()).hexdigest()[:16]


def write_records(
    records: Sequence[EnergyScanRecord],
    cfg: RunConfig,
    command: str,
    stream,
    fmt: str,
) -> None:
    records = sorted(records, key=lambda r: (r.energy, r.engine))
    meta = {
        "tool": f"qwire {__version__}",
        "command": command,
        "rng": RNG_ALGORITHM,
        "seed": cfg.seed,
        "config_sha256": _config_hash(cfg.raw),
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    if fmt == "json":
        json.dump({"metadata": meta, "records": [r.as_dict() for r in records]}, stream, indent=1)
        stream.write("\n")
        return
    for key, value in meta.items():
        stream.write(f"# {key}: {value}\n")
    stream.write(",".join(CSV_COLUMNS) + "\n")
    for rec in records:
        stream.write(rec.csv_row() + "\n")


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="qwire", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("transmit", "transmission and reflection per energy"),
        ("dos", "density of states per energy"),
        ("lyapunov", "Lyapunov exponent and localization length per energy"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", required=True, help="path to the JSON run config")
        p.add_argument("--output", default=None, help="output file (default: stdout)")
        p.add_argument("--format", default=None, choices=["csv", "json"])
        p.add_argument("--threads", type=int, default=1, help="worker processes, 0 = auto")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        if name != "transmit":
            p.add_argument(
                "--mode",
                default=None,
                choices=["finite", "tl", "both"],
                help="engine selection; defaults to the config's engine field",
            )
    args = parser.parse_args(argv)

    try:
        with open(args.config) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        cfg = load_config(raw)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.seed is not None:
        cfg.seed = args.seed
    if args.format is not None:
        cfg.fmt = args.format
    if args.output is not None:
        cfg.output = args.output
    mode = getattr(args, "mode", None) or cfg.engine

    try:
        if args.command == "transmit":
            records = cmd_transmit(cfg, args.threads)
            command = "transmit"
        elif args.command == "dos":
            records = cmd_dos(cfg, mode, args.threads)
            command = f"dos --mode {mode}"
        else:
            records = cmd_lyapunov(cfg, mode, args.threads)
            command = f"lyapunov --mode {mode}"
    except WireError as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return 3

    flagged = [r for r in records if r.converged is False]
    if cfg.output:
        with open(cfg.output, "w") as fh:
            write_records(records, cfg, command, fh, cfg.fmt)
    else:
        write_records(records, cfg, command, sys.stdout, cfg.fmt)
    if records and len(flagged) / len(records) > 0.10:
        print(
            f"warning: {len(flagged)}/{len(records)} rows did not converge",
            file=sys.stderr,
        )
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
