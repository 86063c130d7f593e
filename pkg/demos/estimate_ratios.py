"""Estimate machinery in action: dyadic bank, ensembles, slab scaling.

Checks the dyadic partition of unity, measures square-function constants
on two resolutions, runs small homogeneous and inhomogeneous ensembles
for one index tuple per case, and fits the slab-concentration scaling on
a coarse time grid (the full fit lives in the acceptance suite).
"""

from __future__ import annotations

import numpy as np

from tricomi_lab.exponents import wellposedness_indices
from tricomi_lab.grids import GridSpec
from tricomi_lab.strichartz import (
    LittlewoodPaleyBank,
    empirical_homogeneous_ratio,
    empirical_inhomogeneous_ratio,
    knapp_experiment,
    square_function_constants,
)


def main() -> None:
    bank = LittlewoodPaleyBank(-10, 10)
    tau = np.logspace(-10.0, 10.0, 2001, base=2.0)
    dev = float(np.max(np.abs(bank.partition(tau) - 1.0)))
    print(f"dyadic partition of unity: max deviation {dev:.2e} on 2001 points")

    print("\nsquare-function constants (20-member ensembles)")
    for N in (64, 128):
        rep = square_function_constants(GridSpec(n=2, L=8.0, N=N),
                                        LittlewoodPaleyBank(-2, 3), ensemble=20)
        print(f"  N={N:>3}: c_upper={rep.c_upper:.4f}, c_lower={rep.c_lower:.4f}")

    print("\nempirical estimate ratios, 8 members, one tuple per case")
    grids = [GridSpec(n=2, L=16.0, N=32), GridSpec(n=2, L=16.0, N=64)]
    for p in (2.25, 2.5, 2.9):
        idx = wellposedness_indices(p)
        hom = empirical_homogeneous_ratio(8, idx, grids, seed=0)
        inhom = empirical_inhomogeneous_ratio(8, idx.q, idx.r, idx.q, idx.r,
                                              grids, seed=0)
        print(f"  case {idx.case_tag} (p={p:g}): hom maxima "
              f"{[f'{m:.4f}' for m in hom.maxima]}, inhom maxima "
              f"{[f'{m:.4f}' for m in inhom.maxima]}")

    print("\nslab-concentration scaling, coarse time grid (n_t=6)")
    deltas = [2.0 ** -j for j in range(3, 8)]
    rep = knapp_experiment(deltas, 7.5, 2.5, n_t=6)
    print(f"  (q,r)=(7.5,2.5): fitted slope {rep.fitted_slope:.4f}, "
          f"theory {rep.theory_slope:.4f}")


if __name__ == "__main__":
    main()
