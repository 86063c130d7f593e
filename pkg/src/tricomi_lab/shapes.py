"""Smooth cutoffs and compactly supported test data.

All cutoffs are built from the C-infinity transition psi(y) = exp(-1/y)
(y > 0), so supports are exact: a bump vanishes identically outside its
stated interval, not just to rounding.
"""

from __future__ import annotations

import numpy as np

__all__ = ["smoothstep", "radial_bump", "log2_step", "annulus_cutoff"]


def _psi(y: np.ndarray) -> np.ndarray:
    out = np.zeros_like(y)
    pos = y > 0.0
    out[pos] = np.exp(-1.0 / y[pos])
    return out


def smoothstep(y) -> np.ndarray:
    """C-infinity monotone step: 0 for y <= 0, 1 for y >= 1."""
    y = np.asarray(y, dtype=float)
    a = _psi(y)
    b = _psi(1.0 - y)
    return a / (a + b + np.finfo(float).tiny)


def radial_bump(r, radius: float) -> np.ndarray:
    """exp(1 - 1/(1 - (r/radius)^2)) inside |r| < radius, 0 outside.

    Peak value 1 at the origin, identically zero from r = radius on.
    """
    s = np.asarray(r, dtype=float) / float(radius)
    out = np.zeros_like(s)
    inside = np.abs(s) < 1.0
    q = s[inside] ** 2
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - q))
    return out


def log2_step(tau) -> np.ndarray:
    """Smooth step in log2(tau): 0 for tau <= 1/2, 1 for tau >= 1.

    Telescoping differences of dyadic dilates of this function give an exact
    partition of unity on (0, inf).
    """
    tau = np.asarray(tau, dtype=float)
    out = np.zeros_like(tau)
    pos = tau > 0.0
    out[pos] = smoothstep(np.log2(tau[pos]) + 1.0)
    return out


def annulus_cutoff(tau) -> np.ndarray:
    """Smooth bump equal to 1 on [1/2, 1], supported in [1/4, 2]."""
    tau = np.asarray(tau, dtype=float)
    up = log2_step(2.0 * tau)          # rises on [1/4, 1/2]
    down = 1.0 - log2_step(tau / 2.0)  # falls on [1, 2]
    return up * down
