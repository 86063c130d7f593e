"""Portrait of the degenerate-wave mode multipliers.

Samples the fundamental pair (v1, v2) along time for a few frequencies,
confirms the unit Wronskian, and shows the special-function plumbing the
multipliers rest on: the hypergeometric kernel factor near its endpoint
and the Gamma/Beta closure identities.
"""

from __future__ import annotations

import numpy as np

from tricomi_lab.specfun import (
    gamma_beta_identities,
    hypergeom_F16,
    multiplier_arrays,
    phi,
)


def main() -> None:
    lams = np.array([0.5, 2.0, 6.0])
    print("v1 (position-data multiplier) along time; oscillation rate ~ phi(t)")
    header = "  t    phi(t) " + "".join(f"  lam={lam:<6g}" for lam in lams)
    print(header)
    for t in (0.0, 0.5, 1.0, 2.0, 3.0, 4.0):
        v1 = multiplier_arrays(t, lams)[0]
        cells = "".join(f"  {v:>10.6f}" for v in v1)
        print(f"  {t:<4g} {phi(t):>6.3f}{cells}")

    t_grid = np.linspace(0.0, 4.0, 9)
    lam_grid = np.linspace(0.0, 8.0, 17)
    worst = 0.0
    for t in t_grid:
        v1, v2, v1t, v2t = multiplier_arrays(float(t), lam_grid)
        worst = max(worst, float(np.max(np.abs(v1 * v2t - v2 * v1t - 1.0))))
    print(f"\nWronskian defect over a {t_grid.size}x{lam_grid.size} grid: {worst:.2e}")

    z = np.array([0.0, 0.5, 0.9, 0.99, 1.0 - 1e-6])
    fz = hypergeom_F16(z)
    print("\nkernel factor F(1/6,1/6;1;z): bounded below by 1, nondecreasing")
    for zi, fi in zip(z, fz):
        print(f"  z={zi:<10g} F={fi:.12f}")

    gb = gamma_beta_identities()
    print(f"\nGamma/Beta closure: ratio error {gb.gamma_ratio_error:.1e}, "
          f"2*pi error {gb.two_pi_error:.1e}, passed={gb.passed}")


if __name__ == "__main__":
    main()
