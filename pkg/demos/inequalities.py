"""Discrete Hardy-Littlewood-Sobolev and Pitt quotients on Gaussians.

For a centred Gaussian both quotients have closed forms, and both are
invariant under dilations, so the values printed here should barely move as
the temperature changes or the grid is refined.  The Pitt quotient of a
Gaussian is Gamma((3 + gamma)/2) / Gamma((3 - gamma)/2); it sits below the
sharp constant 2^gamma [Gamma((3 + gamma)/4) / Gamma((3 - gamma)/4)]^2.
The Pitt quotient on the Gaussian exceeds 1 at gamma = -2 (4/3).

Run with ``python demos/inequalities.py``.
"""

from scipy.special import gamma as Gamma

from softlandau import cell_averaged_tables, hls_ratio, make_grid, pitt_ratio
from softlandau.inequalities import hls_exponent, node_power_weights


def main():
    print("HLS quotient  int int f(v) g(w) |v - w|^gamma / (||f||_r ||g||_r)")
    for g in (-1.5, -1.0):
        row = []
        for n in (16, 24):
            tables = cell_averaged_tables(make_grid(n, 5.0), g)
            m = tables.grid.maxwellian()
            row.append(hls_ratio(m, m, tables))
        print(f"  gamma = {g:5.2f}  r = {hls_exponent(g):.4f}  n=16: {row[0]:.5f}  "
              f"n=24: {row[1]:.5f}")

    print("Pitt quotient on Gaussians of temperature s^2 (n = 32, L = 6)")
    grid = make_grid(32, 6.0)
    for g in (-2.0, -1.0):
        w = node_power_weights(grid, g)
        vals = [pitt_ratio(grid.maxwellian(temperature=s * s), grid, g, w) for s in (1.0, 0.8)]
        exact = Gamma((3 + g) / 2) / Gamma((3 - g) / 2)
        sharp = 2 ** g * (Gamma((3 + g) / 4) / Gamma((3 - g) / 4)) ** 2
        print(f"  gamma = {g:5.2f}  s=1: {vals[0]:.4f}  s=0.8: {vals[1]:.4f}  "
              f"Gaussian exact {exact:.4f}  sharp constant {sharp:.4f}")


if __name__ == "__main__":
    main()
