"""Transfer-matrix basics.

Walks through the single-potential machinery: build a delta barrier and a
square well, read off transmission and reflection, check that composing two
units through the multiple-reflection rules reproduces the matrix product,
classify the symmetry of each matrix, and wrap an asymptotic matrix with a
cut-off so it can be placed on a lattice.

Run:  python3 demos/scattering_basics.py
"""

import math

from qwire import (
    apply_cutoff,
    classify_symmetry,
    compose,
    compose_scattering,
    delta_matrix,
    scattering_amplitudes,
    transmission_discretized,
)


def main():
    k = 1.0

    print("== single delta barrier, strength v = 2, k = 1 ==")
    m = delta_matrix(2.0, k)
    s = scattering_amplitudes(m)
    print(f"det M              : {m.det:.12f}")
    print(f"T                  : {s.transmission:.6f}")
    print(f"R                  : {abs(s.r_left)**2:.6f}")
    print(f"T + R              : {s.transmission + abs(s.r_left)**2:.6f}")
    print(f"symmetry class     : {classify_symmetry(m).value}")

    print("\n== two deltas: multiple-reflection rules vs matrix product ==")
    via_rules = compose_scattering(s, s)
    via_product = scattering_amplitudes(compose([m, m]))
    print(f"t via rules        : {via_rules.t:.12f}")
    print(f"t via product      : {via_product.t:.12f}")
    print(f"difference         : {abs(via_rules.t - via_product.t):.2e}")

    print("\n== delta lattice unit: cut-off adds propagation phases ==")
    spacing = 1.0
    unit = apply_cutoff(m, k, spacing / 2, spacing / 2)
    bloch = 0.5 * (unit.m11 + unit.m22)  # half trace = cos(q a) in a band
    print(f"unit det           : {unit.det:.12f}")
    print(f"half trace         : {bloch.real:+.6f} -> "
          f"{'allowed band' if abs(bloch.real) < 1 else 'gap'} at k = {k}")

    print("\n== square barrier through the discretized engine ==")
    v0, length, energy = 1.0, 2.0, 2.0
    kk = math.sqrt(energy)
    t_exact = 1.0 / (1.0 + v0**2 * math.sin(math.sqrt(energy - v0) * length) ** 2
                     / (4 * energy * (energy - v0)))
    dx = 1e-3
    t_num, r_num = transmission_discretized([v0] * int(length / dx), dx, kk)
    print(f"T exact            : {t_exact:.8f}")
    print(f"T discretized      : {t_num:.8f}   (dx = {dx})")
    print(f"flux T + R         : {t_num + r_num:.10f}")


if __name__ == "__main__":
    main()
