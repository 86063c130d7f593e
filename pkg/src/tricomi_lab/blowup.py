"""Radial reduction of simulated fields and blowup witnesses.

Everything here lives on the half-line: spherical averages of grid fields,
the plane-integral (Radon) transform of radial profiles with its closed-form
piecewise-linear quadrature, the mass functional with its volume-normalized
power bound, a critical comparison ODE with a data-size threshold search,
a weighted half-line averaging operator, and ratio witnesses for the chain
of lower bounds that drives the blowup argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import (
    BracketError,
    ConfigurationError,
    DomainError,
    NumericalFailureError,
    SupportViolationError,
)
from .exponents import critical_exponent
from .grids import Field
from .nonlinear import BlowupVerdict, SimulationTrace
from .specfun import phi

__all__ = [
    "RadialProfile",
    "JensenReport",
    "RiccatiConfig",
    "ChainWitnessReport",
    "spherical_mean",
    "jensen_check",
    "radon_radial",
    "G_functional",
    "riccati_integrate",
    "c0_estimate",
    "comparison_parameters",
    "T_operator",
    "growth_exponent",
    "chain_witness",
]

# Relative level below which field values count as zero for support purposes.
_SUPPORT_RTOL = 1e-10


# ---------------------------------------------------------------------------
# spherical averaging

@dataclass(frozen=True)
class RadialProfile:
    """Samples of a radial function on [0, R_max].

    Radii must be nondecreasing with positive total extent; a repeated
    radius encodes a jump (the two values are the one-sided limits), which
    is how indicator-type profiles enter the transform below.
    """

    radii: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        radii = np.asarray(self.radii, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "radii", radii)
        object.__setattr__(self, "values", values)
        if radii.ndim != 1 or values.shape != radii.shape or radii.size < 2:
            raise ConfigurationError("profile needs matching 1-D radii and values, length >= 2")
        if radii[0] < 0.0 or np.any(np.diff(radii) < 0.0) or radii[-1] <= radii[0]:
            raise ConfigurationError("radii must be nondecreasing, start at >= 0, and extend")
        if not (np.all(np.isfinite(radii)) and np.all(np.isfinite(values))):
            raise ConfigurationError("profile samples must be finite")

    @property
    def r_max(self) -> float:
        return float(self.radii[-1])


def _bilinear(u: Field, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    grid = u.grid
    fx = (x + grid.L) / grid.h
    fy = (y + grid.L) / grid.h
    if np.any(fx < 0) or np.any(fy < 0) or np.any(fx > grid.N - 1) or np.any(fy > grid.N - 1):
        raise DomainError("interpolation point outside the grid box")
    i0 = np.minimum(np.floor(fx).astype(int), grid.N - 2)
    j0 = np.minimum(np.floor(fy).astype(int), grid.N - 2)
    tx = fx - i0
    ty = fy - j0
    v = u.values
    return ((1 - tx) * (1 - ty) * v[i0, j0] + tx * (1 - ty) * v[i0 + 1, j0]
            + (1 - tx) * ty * v[i0, j0 + 1] + tx * ty * v[i0 + 1, j0 + 1])


def _trilinear(u: Field, x: np.ndarray, y: np.ndarray, z: np.ndarray) -> np.ndarray:
    grid = u.grid
    out = None
    idx, frac = [], []
    for c in (x, y, z):
        fc = (c + grid.L) / grid.h
        if np.any(fc < 0) or np.any(fc > grid.N - 1):
            raise DomainError("interpolation point outside the grid box")
        i = np.minimum(np.floor(fc).astype(int), grid.N - 2)
        idx.append(i)
        frac.append(fc - i)
    v = u.values
    for di in (0, 1):
        for dj in (0, 1):
            for dk in (0, 1):
                w = ((frac[0] if di else 1 - frac[0])
                     * (frac[1] if dj else 1 - frac[1])
                     * (frac[2] if dk else 1 - frac[2]))
                term = w * v[idx[0] + di, idx[1] + dj, idx[2] + dk]
                out = term if out is None else out + term
    return out


def _sphere_samples(u: Field, n_angles: int | None):
    """Interpolated values on concentric spheres plus the mean weights.

    Returns (radii, samples, weights) with samples indexed (radius, node)
    and weights summing to 1, so any angular mean is samples @ weights.
    """
    grid = u.grid
    radii = grid.h * np.arange(grid.N // 2)
    if grid.n == 2:
        m = n_angles or max(128, 2 * grid.N)
        theta = 2.0 * np.pi * np.arange(m) / m
        cx, cy = np.cos(theta), np.sin(theta)
        samples = _bilinear(u, radii[:, None] * cx[None, :], radii[:, None] * cy[None, :])
        weights = np.full(m, 1.0 / m)
    elif grid.n == 3:
        n_pol = n_angles or 16
        n_az = 2 * n_pol
        cpol, wpol = leggauss(n_pol)
        spol = np.sqrt(1.0 - cpol**2)
        az = 2.0 * np.pi * np.arange(n_az) / n_az
        dx = (spol[:, None] * np.cos(az)[None, :]).ravel()
        dy = (spol[:, None] * np.sin(az)[None, :]).ravel()
        dz = np.repeat(cpol, n_az)
        samples = _trilinear(u, radii[:, None] * dx[None, :],
                             radii[:, None] * dy[None, :], radii[:, None] * dz[None, :])
        weights = np.repeat(wpol, n_az) / (2.0 * n_az)
    else:
        raise DomainError(f"spherical averaging needs n in {{2, 3}}, got n = {grid.n}")
    return radii, samples, weights


def spherical_mean(u: Field, n_angles: int | None = None) -> RadialProfile:
    """Average u over spheres centered at the origin.

    Trapezoid in the angles for n = 2, Gauss in the polar cosine times a
    uniform azimuth for n = 3; values on each sphere come from bi/trilinear
    interpolation, so the radii stop one cell short of the box.
    """
    radii, samples, weights = _sphere_samples(u, n_angles)
    return RadialProfile(radii=radii, values=samples @ weights)


@dataclass(frozen=True)
class JensenReport:
    """Pointwise comparison of |angular mean|^p against the mean of |u|^p."""

    radii: np.ndarray
    power_of_mean: np.ndarray
    mean_of_power: np.ndarray
    max_violation: float


def jensen_check(u: Field, p: float, n_angles: int | None = None) -> JensenReport:
    """Convexity check: |mean u|^p <= mean |u|^p sphere by sphere.

    Both sides share one set of interpolated samples, so the inequality
    holds to rounding no matter how coarse the angular rule is.
    """
    if p <= 1.0:
        raise DomainError(f"power must exceed 1, got p = {p}")
    radii, samples, weights = _sphere_samples(u, n_angles)
    lhs = np.abs(samples @ weights) ** p
    rhs = np.abs(samples) ** p @ weights
    return JensenReport(radii=radii, power_of_mean=lhs, mean_of_power=rhs,
                        max_violation=float(np.max(lhs - rhs)))


# ---------------------------------------------------------------------------
# radial Radon transform

def radon_radial(profile: RadialProfile, n: int, rho):
    """Plane integral of the radial function at signed offset rho.

    c_n int_{|rho|}^{R_max} f(r) (r^2 - rho^2)^{(n-3)/2} r dr with c_2 = 2
    and c_3 = 2 pi, evaluated cell by cell in closed form on the linear
    pieces.  For n = 2 the substitution r = sqrt(rho^2 + s^2) absorbs the
    inverse-square-root endpoint:

        int (A + B r) r / sqrt(r^2 - rho^2) dr
            = A s + B (r s / 2 + rho^2 log(r + s) / 2),  s = sqrt(r^2 - rho^2).

    Offsets beyond R_max return 0 by the support convention.
    """
    if n not in (2, 3):
        raise DomainError(f"plane integrals need n in {{2, 3}}, got n = {n}")
    rho_arr = np.atleast_1d(np.asarray(rho, dtype=float))
    a = np.abs(rho_arr)
    out = np.zeros(rho_arr.shape)
    radii, values = profile.radii, profile.values
    for k in range(radii.size - 1):
        r0, r1 = radii[k], radii[k + 1]
        if r1 <= r0:
            continue  # jump cell: zero width
        slope = (values[k + 1] - values[k]) / (r1 - r0)
        const = values[k] - slope * r0
        lo = np.maximum(a, r0)
        live = lo < r1
        if not np.any(live):
            continue
        rl = lo[live]
        aa = a[live]
        s_lo = np.sqrt(np.maximum(rl * rl - aa * aa, 0.0))
        s_hi = np.sqrt(np.maximum(r1 * r1 - aa * aa, 0.0))
        if n == 2:
            log_term = np.where(aa > 0.0,
                                np.log((r1 + s_hi) / np.maximum(rl + s_lo, 1e-300)), 0.0)
            cell = (const * (s_hi - s_lo)
                    + slope * (0.5 * (r1 * s_hi - rl * s_lo) + 0.5 * aa * aa * log_term))
            out[live] += 2.0 * cell
        else:
            cell = const * 0.5 * (r1 * r1 - rl * rl) + slope * (r1 ** 3 - rl ** 3) / 3.0
            out[live] += 2.0 * np.pi * cell
    return float(out[0]) if np.ndim(rho) == 0 else out


# ---------------------------------------------------------------------------
# mass functional

def G_functional(u: Field, p: float, radius: float | None = None):
    """Mass, p-th power mass, and the volume-normalized power ratio.

    Returns (G, Gpp, holder_ratio) with G = int u, Gpp = int |u|^p, and
    holder_ratio = Gpp / (vol^{-(p-1)} |G|^p).  The volume is the ball of
    the given radius, or the measured support volume (grid cells above the
    relative floor) when radius is None; either way the ratio is >= 1 up to
    quadrature, with equality for indicators.  A zero field reports the
    +inf sentinel.
    """
    if p <= 1.0:
        raise DomainError(f"power must exceed 1, got p = {p}")
    vals = np.real(u.values)
    grid = u.grid
    sup = float(np.max(np.abs(vals)))
    cell = grid.h ** grid.n
    if sup == 0.0:
        return 0.0, 0.0, float("inf")
    floor = _SUPPORT_RTOL * sup
    edge = max(float(np.max(np.abs(np.take(vals, [0, grid.N - 1], axis=ax))))
               for ax in range(grid.n))
    if edge > floor:
        raise SupportViolationError(
            f"field level {edge:.3e} on the box boundary exceeds the support floor {floor:.3e}")
    alive = np.abs(vals) > floor
    if radius is None:
        vol = cell * int(np.count_nonzero(alive))
    else:
        r_support = float(np.max(grid.radius()[alive]))
        if r_support > radius:
            raise SupportViolationError(
                f"support reaches |x| = {r_support:.4g} outside the stated ball {radius:.4g}")
        vol = math.pi * radius ** 2 if grid.n == 2 else 4.0 * math.pi * radius ** 3 / 3.0
    mass = float(np.sum(vals) * cell)
    power_mass = float(np.sum(np.abs(vals) ** p) * cell)
    if mass == 0.0:
        return mass, power_mass, float("inf")
    ratio = power_mass * vol ** (p - 1.0) / abs(mass) ** p
    return mass, power_mass, float(ratio)


# ---------------------------------------------------------------------------
# comparison ODE

@dataclass(frozen=True)
class RiccatiConfig:
    """Parameters of the comparison problem G'' = K1 (t + M)^{-q} G^p.

    The exponents must satisfy (p - 1) a = q - 2: the envelope K0 (t + M)^a
    then scales the same way as the forced growth, which is what makes the
    K0 threshold meaningful.
    """

    p: float
    a: float
    q: float
    K0: float
    K1: float
    M: float
    T0: float

    def __post_init__(self):
        if self.p <= 1.0:
            raise ConfigurationError(f"power must exceed 1, got p = {self.p}")
        if self.a < 1.0:
            raise ConfigurationError(f"envelope exponent must be >= 1, got a = {self.a}")
        if self.K0 <= 0.0 or self.K1 <= 0.0:
            raise ConfigurationError("K0 and K1 must be positive")
        if self.M <= 0.0 or self.T0 <= 0.0:
            raise ConfigurationError("M and T0 must be positive")
        defect = (self.p - 1.0) * self.a - (self.q - 2.0)
        if abs(defect) > 1e-12:
            raise ConfigurationError(
                f"scaling constraint (p-1) a = q - 2 violated by {defect:.3e}")


def _riccati_rhs(t: float, y: np.ndarray, cfg: RiccatiConfig) -> np.ndarray:
    g = y[0]
    force = cfg.K1 * (t + cfg.M) ** (-cfg.q) * math.copysign(abs(g) ** cfg.p, g)
    return np.array([y[1], force])


def _rk4(t: float, y: np.ndarray, h: float, cfg: RiccatiConfig) -> np.ndarray:
    k1 = _riccati_rhs(t, y, cfg)
    k2 = _riccati_rhs(t + 0.5 * h, y + 0.5 * h * k1, cfg)
    k3 = _riccati_rhs(t + 0.5 * h, y + 0.5 * h * k2, cfg)
    k4 = _riccati_rhs(t + h, y + h * k3, cfg)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

# Event thresholds: a step request collapsing below the floor while G has
# cleared the cap is the blowup signature.
_STEP_FLOOR = 1e-12
_BLOWUP_CAP = 1e12


def _riccati_march(cfg: RiccatiConfig, y0: np.ndarray, horizon: float,
                   init_step: float, rtol: float):
    """One adaptive pass; returns ('blew_up', t) or ('survived', horizon).

    Step doubling with Richardson acceptance.  Near blowup the controller
    drives the step to the floor; marching then continues at the floor until
    G passes the cap, which bounds the tail at a few dozen doubling steps.
    """
    t, y, h = cfg.T0, y0.copy(), init_step
    for _ in range(2_000_000):
        if t >= horizon:
            return "survived", horizon
        h = min(h, horizon - t)
        big = _rk4(t, y, h, cfg)
        half = _rk4(t, y, 0.5 * h, cfg)
        small = _rk4(t + 0.5 * h, half, 0.5 * h, cfg)
        if not np.all(np.isfinite(small)):
            if y[0] > _BLOWUP_CAP:
                return "blew_up", t
            raise NumericalFailureError(f"comparison ODE overflowed at t = {t:.6g}")
        scale = np.abs(small) + 1e-300
        err = float(np.max(np.abs(small - big) / scale))
        if err <= rtol or h <= _STEP_FLOOR:
            t += h
            y = small + (small - big) / 15.0
            if h <= _STEP_FLOOR and y[0] > _BLOWUP_CAP:
                return "blew_up", t
        grow = 0.9 * (rtol / err) ** 0.2 if err > 0.0 else 2.0
        h = max(h * min(2.0, max(0.1, grow)), _STEP_FLOOR * 0.5)
    raise NumericalFailureError("comparison ODE exceeded the step budget")


def riccati_integrate(cfg: RiccatiConfig, G_init: float, G_slope_init: float,
                      horizon: float = 1e4, init_step: float = 1e-2,
                      rtol: float = 1e-8) -> BlowupVerdict:
    """Integrate the comparison ODE and classify the run.

    The initial mass must clear the envelope K0 (T0 + M)^a.  Any blowup is
    confirmed by a second pass at half the initial step; the verdict is
    blew_up only when both passes detect the event, with t* from the first.
    """
    envelope = cfg.K0 * (cfg.T0 + cfg.M) ** cfg.a
    if G_init < envelope * (1.0 - 1e-12):
        raise DomainError(
            f"initial mass {G_init:.6g} sits below the envelope {envelope:.6g}")
    y0 = np.array([float(G_init), float(G_slope_init)])
    first, t_first = _riccati_march(cfg, y0, horizon, init_step, rtol)
    if first == "survived":
        return BlowupVerdict(outcome="survived", horizon=horizon)
    confirm, _ = _riccati_march(cfg, y0, horizon, 0.5 * init_step, rtol)
    if confirm == "blew_up":
        return BlowupVerdict(outcome="blew_up", t_star=t_first)
    return BlowupVerdict(outcome="survived", horizon=horizon,
                         reason="event seen once but not at the halved initial step")


def c0_estimate(p: float, a: float, q: float, K1: float, M: float, T0: float,
                horizon: float, rtol: float = 1e-8) -> float:
    """Bisect the K0 threshold separating survival from blowup.

    Each probe starts on the envelope: G = K0 (T0 + M)^a with the envelope's
    own slope.  Survival means reaching the horizon.  The bracket doubles up
    from K0 = 1 (blowup side) and halves down (survival side); the return is
    the bracket midpoint at relative width 1e-3.
    """

    def blows(k0: float) -> bool:
        cfg = RiccatiConfig(p=p, a=a, q=q, K0=k0, K1=K1, M=M, T0=T0)
        g0 = k0 * (T0 + M) ** a
        s0 = a * k0 * (T0 + M) ** (a - 1.0)
        verdict = riccati_integrate(cfg, g0, s0, horizon=horizon, rtol=rtol)
        return verdict.outcome == "blew_up"

    hi = 1.0
    while not blows(hi):
        hi *= 2.0
        if hi > 1e12:
            raise BracketError("no blowup found below K0 = 1e12")
    lo = hi / 2.0
    while lo >= 1e-12 and blows(lo):
        lo /= 2.0
    if lo < 1e-12:
        raise BracketError("no surviving run found above K0 = 1e-12")
    while hi - lo > 1e-3 * hi:
        mid = 0.5 * (lo + hi)
        if blows(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def comparison_parameters(n: int, p: float) -> tuple[float, float]:
    """Envelope and decay exponents (a, q) fed to the comparison ODE.

    a = p/2 + 2 + (3/2)(n - 1 - n p / 2) and q = (3 n / 2)(p - 1); at the
    critical power these satisfy the scaling constraint exactly.
    """
    if n < 2:
        raise DomainError(f"dimension must be >= 2, got n = {n}")
    a = 0.5 * p + 2.0 + 1.5 * (n - 1.0 - 0.5 * n * p)
    q = 1.5 * n * (p - 1.0)
    return a, q


# ---------------------------------------------------------------------------
# half-line averaging operator

def _halfline_transform(samples: np.ndarray, grid_r: np.ndarray, n: int,
                        r_top: float, rho: np.ndarray) -> np.ndarray:
    out = np.zeros(rho.shape)
    edge = np.abs(r_top - rho) < 1e-12 * max(r_top, 1.0)
    for k in range(grid_r.size - 1):
        r0, r1 = grid_r[k], grid_r[k + 1]
        if r1 <= r0:
            continue
        slope = (samples[k + 1] - samples[k]) / (r1 - r0)
        const = samples[k] - slope * r0
        lo = np.maximum(rho, r0)
        live = (lo < r1) & ~edge
        if not np.any(live):
            continue
        rl = lo[live]
        rr = rho[live]
        if n == 3:
            out[live] += const * (r1 - rl) + slope * 0.5 * (r1 * r1 - rl * rl)
        else:
            u0 = np.sqrt(rl - rr)
            u1 = np.sqrt(r1 - rr)
            out[live] += (2.0 * (const + slope * rr) * (u1 - u0)
                          + (2.0 / 3.0) * slope * (u1 ** 3 - u0 ** 3))
    width = np.maximum(r_top - rho, 1e-300)
    power = 1.0 if n == 3 else 0.5
    result = out / width ** power
    # at rho = r_top the averaging limit is f itself (twice f for n = 2)
    top_val = float(np.interp(r_top, grid_r, samples))
    result[edge] = top_val if n == 3 else 2.0 * top_val
    return result


def _ensemble_profiles(count: int, seed: int) -> list:
    rng = np.random.default_rng(seed)
    modes = np.arange(1, 9)
    funcs = []
    for _ in range(count):
        ca = rng.standard_normal(modes.size) / modes
        cb = rng.standard_normal(modes.size) / modes
        c0 = rng.uniform(0.2, 1.0)

        def f(x, ca=ca, cb=cb, c0=c0):
            ang = np.pi * np.outer(x, modes)
            return np.abs(c0 + np.cos(ang) @ ca + np.sin(ang) @ cb)
        funcs.append(f)
    return funcs


def T_operator(f, n: int, t: float, M: float, p: float, rho=None,
               ensemble: int = 50, seed: int = 0):
    """Weighted average of f over [rho, phi(t) + M] with edge-power weights.

    T(f)(rho) = |phi(t) - rho + M|^{-(n-1)/2}
                int_rho^{phi(t)+M} f(r) |r - rho|^{(n-3)/2} dr,

    computed in closed form on the linear pieces; the n = 2 endpoint root
    is absorbed by the substitution u = sqrt(r - rho).  f gives samples on
    the uniform grid over [0, phi(t) + M].  Returns (transformed samples,
    measured_norm) where the norm is the max of ||Tf||_p / ||f||_p over a
    seeded ensemble of nonnegative profiles on the same grid.

    For constant f and n = 3 the two edge factors cancel and T(f) = f.
    """
    if n not in (2, 3):
        raise DomainError(f"averaging operator needs n in {{2, 3}}, got n = {n}")
    if t < 0.0 or M <= 0.0:
        raise DomainError("need t >= 0 and M > 0")
    if p < 1.0:
        raise DomainError(f"norm exponent must be >= 1, got p = {p}")
    samples = np.asarray(f, dtype=float)
    if samples.ndim != 1 or samples.size < 2:
        raise ConfigurationError("f must give at least two samples on the radial grid")
    r_top = phi(t) + M
    grid_r = np.linspace(0.0, r_top, samples.size)
    if rho is None:
        rho_arr = grid_r
    else:
        rho_arr = np.atleast_1d(np.asarray(rho, dtype=float))
        if np.any(rho_arr < 0.0) or np.any(rho_arr > r_top * (1.0 + 1e-12)):
            raise DomainError(f"stations must lie in [0, {r_top:.6g}]")
    transformed = _halfline_transform(samples, grid_r, n, r_top, rho_arr)

    def lp(vals: np.ndarray) -> float:
        return float(np.trapezoid(np.abs(vals) ** p, grid_r) ** (1.0 / p))

    worst = 0.0
    for func in _ensemble_profiles(ensemble, seed):
        fv = func(grid_r / r_top)
        tv = _halfline_transform(fv, grid_r, n, r_top, grid_r)
        denom = lp(fv)
        if denom > 0.0:
            worst = max(worst, lp(tv) / denom)
    if rho is None or np.ndim(rho) != 0:
        return transformed, worst
    return float(transformed[0]), worst


# ---------------------------------------------------------------------------
# chain witnesses

def growth_exponent(n: int, p: float) -> float:
    """Exponent of t in the log-enhanced power-mass lower bound.

    (3/2)(n - 1 - n p / 2 + p / 3); values above -1 make the bound grow
    fast enough for the comparison ODE to fire at the critical power.
    """
    if n < 2:
        raise DomainError(f"dimension must be >= 2, got n = {n}")
    return 1.5 * (n - 1.0 - 0.5 * n * p + p / 3.0)


@dataclass(frozen=True)
class ChainWitnessReport:
    """Minimum ratios (measured / envelope) along the lower-bound chain.

    points holds the sampled (t, rho) pairs.  duhamel_ratio compares the
    plane integral of u against its kernel-weighted source integral,
    envelope_ratio against the closed power-law envelope; log_ratio and
    growth_ratio compare the power mass and the mass against their t-power
    envelopes.  All generic constants are 1, so only positivity and rough
    stability carry meaning.
    """

    points: tuple
    duhamel_ratio: float
    envelope_ratio: float
    log_ratio: float
    growth_ratio: float
    growth_exponent: float


def _duhamel_lower(pow_profiles, snap_times, t: float, rho: float,
                   n_inner: int = 32) -> float:
    """Kernel-weighted source integral below the plane integral of u."""
    pt = phi(t)
    xg, wg = leggauss(n_inner)
    vals = []
    s_used = []
    for s, prof in zip(snap_times, pow_profiles):
        if s > t + 1e-12:
            break
        ps = phi(s)
        halfw = pt - ps
        if halfw <= 0.0:
            vals.append(0.0)
            s_used.append(s)
            continue
        rho1 = rho + halfw * xg
        kern = ((pt + ps) ** 2 - (rho - rho1) ** 2) ** (-1.0 / 6.0)
        vals.append(float(np.sum(wg * kern * prof(np.abs(rho1))) * halfw))
        s_used.append(s)
    if len(s_used) < 2:
        return 0.0
    return float(np.trapezoid(np.asarray(vals), np.asarray(s_used)))


def chain_witness(trace: SimulationTrace, M: float, p: float | None = None,
                  rho_count: int = 6) -> ChainWitnessReport:
    """Evaluate the lower-bound chain on a stored simulation.

    Sampling covers snapshot times with phi(t) > 2(M + 1) and offsets
    rho < phi(t) - M - 1, where the support geometry makes every step of
    the chain meaningful.  The power defaults to the critical one; pass
    the run's own power to keep measured and analyzed sources identical.
    """
    if trace.config is None or not trace.snapshots:
        raise DomainError("trace carries no stored fields; rerun with snapshot_times")
    grid = trace.config.grid
    n = grid.n
    if trace.f is not None and trace.g is not None:
        fmin = float(np.min(trace.f.values))
        gmin = float(np.min(trace.g.values))
        if min(fmin, gmin) < -1e-12 * max(trace.f.sup_norm(), trace.g.sup_norm(), 1.0):
            raise DomainError("chain witnesses need nonnegative data")
    p_eff = float(p) if p is not None else critical_exponent(n)
    if M <= 0.0:
        raise DomainError(f"support radius must be positive, got M = {M}")

    snap_times = [float(s) for s, _ in trace.snapshots]
    mean_profiles = []
    pow_callables = []
    cell = grid.h ** n
    masses, power_masses = [], []
    for _, field_s in trace.snapshots:
        mean_profiles.append(spherical_mean(field_s))
        pw = Field(grid=grid, values=np.abs(field_s.values) ** p_eff)
        prof = spherical_mean(pw)
        pow_callables.append(lambda r, prof=prof: radon_radial(prof, n, r))
        masses.append(float(np.sum(field_s.values) * cell))
        power_masses.append(float(np.sum(np.abs(field_s.values) ** p_eff) * cell))

    sampled = [k for k, s in enumerate(snap_times) if phi(s) > 2.0 * (M + 1.0)]
    if not sampled:
        raise DomainError(
            "no stored time satisfies phi(t) > 2(M + 1); extend the horizon")

    e_env = n - 1.0 - 0.5 * n * p_eff + (p_eff + 2.0) / 3.0
    e_log = n - 1.0 - 0.5 * n * p_eff + p_eff / 3.0
    a_exp = 0.5 * p_eff + 2.0 + 1.5 * (n - 1.0 - 0.5 * n * p_eff)

    points = []
    duh, env, logr, grow = [], [], [], []
    for k in sampled:
        t = snap_times[k]
        pt = phi(t)
        line_of_u = lambda r: radon_radial(mean_profiles[k], n, r)
        logr.append(power_masses[k] / (pt ** e_log * math.log(pt - M + 1.0)))
        grow.append(masses[k] / (t + M) ** a_exp)
        for j in range(rho_count):
            rho = (j + 0.5) * (pt - M - 1.0) / rho_count
            points.append((t, rho))
            measured = line_of_u(rho)
            lower = _duhamel_lower(pow_callables, snap_times, t, rho)
            duh.append(measured / lower if lower > 0.0 else float("inf"))
            env.append(measured / ((pt - rho) ** (-1.0 / 6.0) * pt ** (-1.0 / 6.0)
                                   * (pt - rho - M) ** e_env))

    sigma = growth_exponent(n, p_eff)
    if abs(p_eff - critical_exponent(n)) < 1e-9 and sigma <= -1.0:
        raise NumericalFailureError("critical growth exponent fell at or below -1")
    return ChainWitnessReport(
        points=tuple(points),
        duhamel_ratio=float(min(duh)),
        envelope_ratio=float(min(env)),
        log_ratio=float(min(logr)),
        growth_ratio=float(min(grow)),
        growth_exponent=sigma,
    )
