"""Exponent thresholds and Strichartz index algebra.

Everything here is closed-form arithmetic for the degenerate wave operator
d^2/dt^2 - t*Laplacian with source |u|^p in n space dimensions.  The critical
power p_crit(n) is the positive root of

    (3n - 2) p^2 - 3n p - 6 = 0,

the conformal power is p_conf(n) = (3n + 6)/(3n - 2), and the mixed-norm
well-posedness range for n = 2 splits into three index cases whose union is
(p_crit(2), 3].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

__all__ = [
    "ExponentReport",
    "StrichartzIndices",
    "RegimeClassification",
    "critical_exponent",
    "conformal_exponent",
    "exponent_report",
    "classify_regime",
    "wellposedness_indices",
    "wellposedness_case_ranges",
    "admissible_check",
    "strichartz_regularity",
]

_EQUALITY_TOL = 1e-12


@dataclass(frozen=True)
class ExponentReport:
    """Critical and conformal powers for one dimension, with the quadratic
    residual of p_crit as a self-check (should be ~0)."""

    n: int
    p_crit: float
    p_conf: float
    residual: float


@dataclass(frozen=True)
class StrichartzIndices:
    """One admissible index tuple (q, r) with its dual-source exponents and
    the Sobolev regularity s it pairs with.

    q, r        time / radial Lebesgue exponents of the solution norm
    qt_prime... exponents of the source norm (q/p and r/p)
    s           homogeneous Sobolev order, s = 1 - 4/(3(p-1))
    case_tag    "I", "II", or "III"
    """

    q: float
    r: float
    qt_prime: float
    rt_prime: float
    s: float
    case_tag: str


@dataclass(frozen=True)
class RegimeClassification:
    n: int
    p: float
    regime: str
    p_crit: float
    p_conf: float


def critical_exponent(n: int) -> float:
    """Positive root of (3n-2)p^2 - 3np - 6 = 0.

    The leading coefficient is positive for n >= 2, so there is exactly
    one positive root and the + branch of the quadratic formula picks it.
    """
    if not isinstance(n, (int,)) or isinstance(n, bool):
        raise DomainError(f"dimension must be an integer, got {n!r}")
    if n < 2:
        raise DomainError(f"dimension must be >= 2, got {n}")
    a = 3.0 * n - 2.0
    b = -3.0 * n
    disc = 9.0 * n * n + 24.0 * a
    return (-b + math.sqrt(disc)) / (2.0 * a)


def conformal_exponent(n: int) -> float:
    """p_conf(n) = (3n + 6)/(3n - 2)."""
    if not isinstance(n, (int,)) or isinstance(n, bool):
        raise DomainError(f"dimension must be an integer, got {n!r}")
    if n < 2:
        raise DomainError(f"dimension must be >= 2, got {n}")
    return (3.0 * n + 6.0) / (3.0 * n - 2.0)


def exponent_report(n: int) -> ExponentReport:
    p = critical_exponent(n)
    residual = abs((3.0 * n - 2.0) * p * p - 3.0 * n * p - 6.0)
    return ExponentReport(n=n, p_crit=p, p_conf=conformal_exponent(n), residual=residual)


def classify_regime(n: int, p: float) -> RegimeClassification:
    """Place p relative to p_crit(n) and p_conf(n).

    Exact-equality bands of width 1e-12 map to "critical" at p_crit and to
    "conformal_or_above" at p_conf, so the four regimes partition (1, inf).
    """
    p = float(p)
    if not p > 1.0:
        raise DomainError(f"power must exceed 1, got {p}")
    pc = critical_exponent(n)
    pf = conformal_exponent(n)
    if abs(p - pc) <= _EQUALITY_TOL:
        regime = "critical"
    elif p < pc:
        regime = "subcritical"
    elif p < pf - _EQUALITY_TOL:
        regime = "supercritical_subconformal"
    else:
        regime = "conformal_or_above"
    return RegimeClassification(n=n, p=p, regime=regime, p_crit=pc, p_conf=pf)


def _case_i(p: float) -> tuple[float, float]:
    return p * (p - 1.0) / (3.0 - p), p


def _case_ii(p: float) -> tuple[float, float]:
    # the source's printed numerator factor (p - 11) fails 1/q + 3/r = 2/(p-1);
    # (p - 1) is forced by that relation with r = p + 1/3
    return (3.0 * p + 1.0) * (p - 1.0) / (11.0 - 3.0 * p), p + 1.0 / 3.0


def _case_iii(p: float) -> tuple[float, float]:
    return (p * p - 1.0) / (5.0 - p), p + 1.0


def wellposedness_case_ranges() -> dict[str, tuple[float, float]]:
    """Validity interval of each index case (n = 2).

    Case I is open at the left endpoint p_crit(2); the others are closed
    intervals.  Lower/upper endpoints are roots of the binding constraints:
    admissibility 1/q + 3/(2r) <= 1 for II, q >= p for III, and q <= 2p for
    the upper ends of I and II.
    """
    pc2 = critical_exponent(2)
    return {
        "I": (pc2, 7.0 / 3.0),
        "II": ((7.0 + math.sqrt(409.0)) / 12.0, (4.0 + math.sqrt(17.0)) / 3.0),
        "III": ((5.0 + math.sqrt(33.0)) / 4.0, 3.0),
    }


def wellposedness_indices(p: float) -> StrichartzIndices:
    """Index tuple for the mixed-norm well-posedness range p in (p_crit(2), 3].

    The case with the smallest roman numeral containing p wins where the
    validity intervals overlap.
    """
    p = float(p)
    pc2 = critical_exponent(2)
    if not (p > pc2 and p <= 3.0 + _EQUALITY_TOL):
        raise DomainError(
            f"p = {p} outside the well-posedness range ({pc2:.12f}, 3]"
        )
    p = min(p, 3.0)
    if p <= 7.0 / 3.0:
        q, r = _case_i(p)
        tag = "I"
    elif p <= (4.0 + math.sqrt(17.0)) / 3.0:
        q, r = _case_ii(p)
        tag = "II"
    else:
        q, r = _case_iii(p)
        tag = "III"
    s = 1.0 - 4.0 / (3.0 * (p - 1.0))
    return StrichartzIndices(
        q=q, r=r, qt_prime=q / p, rt_prime=r / p, s=s, case_tag=tag
    )


def admissible_check(q: float, r: float) -> bool:
    """Admissibility 1/q <= 1 - (3/2)(1/r) for q, r in [2, inf]."""
    for name, v in (("q", q), ("r", r)):
        if not (v >= 2.0):  # rejects NaN too
            raise DomainError(f"{name} must lie in [2, inf], got {v}")
    inv_q = 0.0 if math.isinf(q) else 1.0 / q
    inv_r = 0.0 if math.isinf(r) else 1.0 / r
    return inv_q <= 1.0 - 1.5 * inv_r + _EQUALITY_TOL


def strichartz_regularity(q: float, r: float) -> float:
    """Scaling regularity s = 2(1/2 - 1/r) - (2/3)(1/q) of the (q, r) pair."""
    if not (q >= 1.0 and r >= 1.0):
        raise DomainError(f"exponents must be >= 1, got q={q}, r={r}")
    inv_q = 0.0 if math.isinf(q) else 1.0 / q
    inv_r = 0.0 if math.isinf(r) else 1.0 / r
    return 2.0 * (0.5 - inv_r) - (2.0 / 3.0) * inv_q
