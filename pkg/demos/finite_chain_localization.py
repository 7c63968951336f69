"""Localization in a finite binary chain.

Generates one realization of an uncorrelated binary tight-binding wire,
then measures the Lyapunov exponent three ways: from the state growth,
from the transmission, and from the thermodynamic-limit functional
equations.  The running log|t|(N) trace shows the exponential decay of the
transmission with the TL slope drawn through it.

Run:  python3 demos/finite_chain_localization.py [--plot out.png]
"""

import argparse
import math

import numpy as np

from qwire import (
    DisorderSpec,
    binary_species,
    complex_lyapunov,
    generate_sequence,
    ipr,
    lyapunov_from_log_transmission,
    lyapunov_from_state,
    propagate_canonical,
    solve_phase_distributions,
    tb_model,
    tl_lyapunov,
    transmission_p_matrix,
)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--plot", default=None, help="save a log|t| vs N figure")
    args = parser.parse_args()

    eps, conc, energy, n = 1.0, 0.5, 0.5, 100_000
    spec = DisorderSpec.uncorrelated((conc, 1 - conc), seed=20240)
    model = tb_model(binary_species(eps), energy)
    seq = generate_sequence(spec, n)

    print(f"binary chain eps = +-{eps}, c1 = {conc}, E = {energy}, N = {n}")

    traj = propagate_canonical(model, seq, store_amplitudes=True)
    est_state = lyapunov_from_state(traj)
    re, im = complex_lyapunov(traj)
    print(f"lambda (state)     : {est_state.lam:.5f}   xi = {est_state.xi:.1f} sites")
    print(f"IDOS at E          : {im / math.pi:.5f}")
    print(f"IPR                : {ipr(traj.amplitudes()):.4f}")

    res = transmission_p_matrix(model, seq, record_every=1000)
    est_t = lyapunov_from_log_transmission(res.log_abs_t, n)
    print(f"lambda (log T)     : {est_t.lam:.5f}")

    tables, report = solve_phase_distributions(model, spec, energy)
    lam_tl = tl_lyapunov(tables, model, spec)
    print(f"lambda (TL solver) : {lam_tl:.5f}   converged = {report.converged} "
          f"in {report.iterations} iterations")

    keep = res.lengths >= n // 10
    slope = np.polyfit(res.lengths[keep], res.log_t_trace[keep], 1)[0]
    print(f"log|t| slope       : {slope:+.5f}  (TL prediction {-lam_tl:+.5f})")

    if args.plot:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot(res.lengths, res.log_t_trace, lw=0.8, label="one realization")
        ax.plot(res.lengths, -lam_tl * res.lengths, "r--", label="TL slope")
        ax.set_xlabel("N")
        ax.set_ylabel("log |t|")
        ax.legend()
        fig.tight_layout()
        fig.savefig(args.plot, dpi=150)
        print(f"wrote {args.plot}")


if __name__ == "__main__":
    main()
