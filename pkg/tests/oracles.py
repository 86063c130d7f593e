"""Independent reference routes used by the tests.

Everything here is deliberately built on a different algorithm than the
library code it checks: arbitrary-precision series (mpmath), adaptive RK
integration of the defining ODEs (scipy.integrate.solve_ivp), and direct
high-resolution quadrature.  None of it imports from tricomi_lab's
numeric kernels beyond plain data types.
"""

from __future__ import annotations

import mpmath as mp
import numpy as np
from scipy.integrate import solve_ivp

mp.mp.dps = 40


def phi(t: float) -> float:
    return (2.0 / 3.0) * t ** 1.5


def confluent_v1(t: float, lam: float) -> float:
    """First fundamental multiplier via the confluent-hypergeometric route.

    e^(-z/2) * Phi(1/6, 1/3; z) with z = 2i phi(t) lam, evaluated by
    mpmath's arbitrary-precision 1F1.  The value is real.
    """
    z = 2j * mp.mpf(2) / 3 * mp.mpf(t) ** mp.mpf(1.5) * mp.mpf(lam)
    val = mp.e ** (-z / 2) * mp.hyp1f1(mp.mpf(1) / 6, mp.mpf(1) / 3, z)
    return float(mp.re(val))


def series_F16(z: float, terms: int = 400) -> float:
    """F(1/6, 1/6; 1; z) by direct power series in high precision."""
    with mp.workdps(30):
        a = mp.mpf(1) / 6
        term = mp.mpf(1)
        total = mp.mpf(1)
        zz = mp.mpf(z)
        for k in range(terms):
            term *= ((a + k) / (1 + k)) ** 2 * zz
            total += term
            if abs(term) < mp.mpf(10) ** (-28) * abs(total):
                break
        return float(total)


def gauss_F16_limit() -> float:
    """F(1/6, 1/6; 1; 1) = Gamma(2/3) / Gamma(5/6)^2."""
    return float(mp.gamma(mp.mpf(2) / 3) / mp.gamma(mp.mpf(5) / 6) ** 2)


def airy_at_zero() -> tuple[float, float, float, float]:
    """(Ai, Ai', Bi, Bi') at 0 from the Gamma closed forms."""
    ai = float(3 ** (-mp.mpf(2) / 3) / mp.gamma(mp.mpf(2) / 3))
    aip = float(-(3 ** (-mp.mpf(1) / 3)) / mp.gamma(mp.mpf(1) / 3))
    bi = float(3 ** (-mp.mpf(1) / 6) / mp.gamma(mp.mpf(2) / 3))
    bip = float(3 ** (mp.mpf(1) / 6) / mp.gamma(mp.mpf(1) / 3))
    return ai, aip, bi, bip


def rk_airy(x_target: float) -> tuple[float, float]:
    """(Ai, Bi) at x_target by adaptive integration of w'' = x w from 0."""
    ai0, aip0, bi0, bip0 = airy_at_zero()

    def rhs(x, y):
        return [y[1], x * y[0], y[3], x * y[2]]

    sol = solve_ivp(rhs, (0.0, x_target), [ai0, aip0, bi0, bip0],
                    rtol=1e-12, atol=1e-14, dense_output=True)
    yT = sol.sol(x_target)
    return float(yT[0]), float(yT[2])


def rk_mode(lam: float, t_values) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Fundamental pair of w'' + t lam^2 w = 0 by adaptive RK.

    Returns (v1, v2, v1_dt, v2_dt) sampled at t_values.
    """
    t_values = np.atleast_1d(np.asarray(t_values, dtype=float))
    t_end = float(t_values.max())

    def rhs(t, y):
        return [y[1], -t * lam**2 * y[0], y[3], -t * lam**2 * y[2]]

    sol = solve_ivp(rhs, (0.0, max(t_end, 1e-30)), [1.0, 0.0, 0.0, 1.0],
                    rtol=1e-12, atol=1e-14, dense_output=True)
    y = sol.sol(t_values)
    return y[0], y[2], y[1], y[3]


def rk_forced_mode(lam: float, c, t_end: float) -> complex:
    """Zero-data solution of w'' + t lam^2 w = c(t) at t_end, complex c."""
    def rhs(t, y):
        w_re, wp_re, w_im, wp_im = y
        src = complex(c(t))
        return [wp_re, -t * lam**2 * w_re + src.real,
                wp_im, -t * lam**2 * w_im + src.imag]

    sol = solve_ivp(rhs, (0.0, t_end), [0.0, 0.0, 0.0, 0.0],
                    rtol=1e-11, atol=1e-13, dense_output=True)
    y = sol.sol(t_end)
    return complex(y[0], y[2])


def bessel_ref(k: int, y: float) -> float:
    with mp.workdps(30):
        return float(mp.besselj(k, y))
