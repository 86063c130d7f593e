"""Tour of the exponent algebra: thresholds, regimes, and index tuples.

Prints the critical and conformal powers across dimensions, classifies a
few sample powers, and walks the three n = 2 index cases with their
admissibility checks.
"""

from __future__ import annotations

from tricomi_lab.exponents import (
    admissible_check,
    classify_regime,
    exponent_report,
    wellposedness_case_ranges,
    wellposedness_indices,
)


def main() -> None:
    print("thresholds by dimension (quadratic-root residual should vanish)")
    print(f"{'n':>3} {'p_crit':>12} {'p_conf':>10} {'residual':>10}")
    for n in range(2, 8):
        rep = exponent_report(n)
        print(f"{n:>3} {rep.p_crit:>12.8f} {rep.p_conf:>10.6f} {rep.residual:>10.1e}")

    print("\nregime of a few sample powers")
    for n, p in ((2, 1.5), (2, 2.5), (2, 3.0), (2, 4.0), (3, 1.8)):
        print(f"  n={n} p={p:<4} -> {classify_regime(n, p).regime}")

    print("\nn = 2 index cases and their validity windows")
    for tag, (lo, hi) in wellposedness_case_ranges().items():
        print(f"  case {tag:>3}: p in ({lo:.6f}, {hi:.6f}]")

    print("\nindex tuples on one representative power per case")
    for p in (2.25, 2.5, 2.9):
        idx = wellposedness_indices(p)
        ok = admissible_check(idx.q, idx.r)
        print(f"  p={p}: case {idx.case_tag}, q={idx.q:.6f}, r={idx.r:.6f}, "
              f"s={idx.s:.6f}, admissible={ok}")


if __name__ == "__main__":
    main()
