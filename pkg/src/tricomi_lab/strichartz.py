"""Space-time norm test bench for the degenerate wave flow.

Everything here measures rather than proves: mixed polar norms, a dyadic
frequency decomposition, the model one-sided wave operator with its decaying
amplitude, angular Fourier analysis of frequency-localized data, decay checks
for the angular kernel integral, a slab-data scaling experiment, and ensemble
ratio measurements for the homogeneous and inhomogeneous flow.  All results
come back as small report objects so callers (tests, CLI) can assert on the
numbers they care about.
"""

from __future__ import annotations

import inspect
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import RegularGridInterpolator

from .errors import (
    ConfigurationError,
    DomainError,
    MeanHandlingWarning,
    NumericalFailureError,
)
from .exponents import StrichartzIndices, admissible_check
from .grids import Field, GridSpec
from .shapes import annulus_cutoff, log2_step
from .specfun import multiplier_arrays, phi

__all__ = [
    "MixedNormSpec",
    "mixed_norm",
    "hdot_norm",
    "LittlewoodPaleyBank",
    "lp_project",
    "SquareFunctionReport",
    "square_function_constants",
    "ModelAmplitude",
    "apply_A",
    "AngularSpectrum",
    "angular_coefficients",
    "KernelBoundReport",
    "kernel_bound_check",
    "kernel_decay_fit",
    "claim_integral",
    "KnappConfig",
    "KnappReport",
    "knapp_experiment",
    "EnsembleRatioReport",
    "empirical_homogeneous_ratio",
    "empirical_inhomogeneous_ratio",
    "ChristKiselevReport",
    "christ_kiselev_check",
    "AngularSobolevReport",
    "angular_sobolev_check",
]


# ---------------------------------------------------------------------------
# mixed polar norms


def _index_ok(value: float) -> bool:
    return value >= 1.0  # inf compares fine

@dataclass(frozen=True)
class MixedNormSpec:
    """Quadrature layout for the L^q_t L^r_|x| L^2_theta norm.

    ``q`` is the time index, ``r`` the radial index; the angular index is
    always 2.  The radial measure is plain dr; set ``weighted`` for the polar
    r dr variant.  ``math.inf`` for q or r means an essential supremum, done
    as a max over the sample grid.
    """

    q: float
    r: float
    r_max: float
    time_nodes: np.ndarray
    n_r: int = 128
    n_theta: int = 64
    weighted: bool = False

    def __post_init__(self):
        if not (_index_ok(self.q) and _index_ok(self.r)):
            raise ConfigurationError("norm indices must lie in [1, inf]")
        if self.n_theta % 2 != 0 or self.n_theta < 4:
            raise ConfigurationError("n_theta must be even and at least 4")
        if self.n_r < 2:
            raise ConfigurationError("need at least two radial nodes")
        if not self.r_max > 0:
            raise ConfigurationError("r_max must be positive")
        nodes = np.atleast_1d(np.asarray(self.time_nodes, dtype=float))
        if nodes.ndim != 1 or nodes.size == 0:
            raise ConfigurationError("time_nodes must be a nonempty 1-D array")
        if nodes.size > 1 and not np.all(np.diff(nodes) > 0):
            raise ConfigurationError("time nodes must increase strictly")
        if nodes.size == 1 and not math.isinf(self.q):
            raise ConfigurationError("a single time node needs q = inf")
        object.__setattr__(self, "time_nodes", nodes)

    @property
    def r_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.r_max, self.n_r)

    @property
    def theta_grid(self) -> np.ndarray:
        return np.arange(self.n_theta) * (2.0 * np.pi / self.n_theta)


def _trapezoid_weights(x: np.ndarray) -> np.ndarray:
    w = np.zeros_like(x)
    if x.size == 1:
        w[0] = 1.0
        return w
    dx = np.diff(x)
    w[:-1] += 0.5 * dx
    w[1:] += 0.5 * dx
    return w


def _polar_resample(f: Field, r_grid: np.ndarray, theta_grid: np.ndarray) -> np.ndarray:
    """Sample a 2-D field on the polar grid by bicubic interpolation."""
    if f.grid.n != 2:
        raise DomainError("polar resampling needs a 2-D grid")
    axes = (f.grid.axis(), f.grid.axis())
    pts = np.stack(
        [
            np.outer(r_grid, np.cos(theta_grid)).ravel(),
            np.outer(r_grid, np.sin(theta_grid)).ravel(),
        ],
        axis=-1,
    )
    out = np.zeros(pts.shape[0], dtype=complex)
    inside = np.max(np.abs(pts), axis=1) <= axes[0][-1]
    for part in (np.real, np.imag):
        interp = RegularGridInterpolator(
            axes, part(f.values).astype(float), method="cubic",
            bounds_error=False, fill_value=0.0,
        )
        out[inside] = out[inside] + (1j if part is np.imag else 1.0) * interp(pts[inside])
    return out.reshape(r_grid.size, theta_grid.size)


def _polar_samples(u, spec: MixedNormSpec) -> np.ndarray:
    """Collect |u| samples, shape (time, radius, angle)."""
    rg, tg = spec.r_grid, spec.theta_grid
    times = spec.time_nodes
    if isinstance(u, np.ndarray):
        if u.shape != (times.size, rg.size, tg.size):
            raise ConfigurationError(
                "sample cube has shape %s, spec wants %s"
                % (u.shape, (times.size, rg.size, tg.size))
            )
        return np.abs(u)
    out = np.empty((times.size, rg.size, tg.size))
    if callable(u):
        n_par = len(inspect.signature(u).parameters)
        for i, t in enumerate(times):
            if n_par >= 3:
                vals = u(t, rg[:, None], tg[None, :])
            else:
                vals = _polar_resample(u(t), rg, tg)
            out[i] = np.abs(np.asarray(vals))
        return out
    seq = list(u)
    if len(seq) != times.size:
        raise ConfigurationError("need one field per time node")
    for i, f in enumerate(seq):
        out[i] = np.abs(_polar_resample(f, rg, tg))
    return out


def mixed_norm(u, spec: MixedNormSpec) -> float:
    """The L^q_t L^r_|x| L^2_theta norm of a time-indexed field.

    ``u`` may be a sequence of 2-D fields matching ``spec.time_nodes``, a
    callable ``t -> Field``, a callable ``(t, r, theta) -> values`` for data
    given directly in polar form, or a precomputed sample cube of shape
    (time, radius, angle).  Angular integration is a uniform Riemann sum
    (exact for trigonometric polynomials under the Nyquist degree); radius
    and time use trapezoid weights.
    """
    samples = _polar_samples(u, spec)
    if not np.all(np.isfinite(samples)):
        raise NumericalFailureError("non-finite norm samples")
    dtheta = 2.0 * np.pi / spec.n_theta
    ang = dtheta * np.sum(samples**2, axis=2)  # (time, radius), L^2_theta squared

    rg = spec.r_grid
    wr = _trapezoid_weights(rg)
    if spec.weighted:
        wr = wr * rg
    if math.isinf(spec.r):
        rad = np.sqrt(np.max(ang, axis=1))
    else:
        rad = np.einsum("tr,r->t", ang ** (spec.r / 2.0), wr) ** (1.0 / spec.r)

    if math.isinf(spec.q):
        return float(np.max(rad))
    wt = _trapezoid_weights(spec.time_nodes)
    return float(np.dot(rad**spec.q, wt) ** (1.0 / spec.q))


def hdot_norm(f: Field, s: float) -> float:
    """Homogeneous Sobolev seminorm of order ``s`` from the discrete spectrum.

    For ``s < 0`` the zero frequency is dropped; if the field carries a
    nonzero mean a MeanHandlingWarning records that the reported value
    ignores it.
    """
    g = f.grid
    spec = np.fft.fftn(f.values)
    k = g.abs_freq()
    if s == 0.0:
        w = np.ones_like(k)
    else:
        with np.errstate(divide="ignore"):
            w = np.where(k > 0.0, k, 1.0) ** (2.0 * s)
        w[k == 0.0] = 0.0
        if s < 0.0:
            mean = abs(spec.flat[0]) / f.values.size
            scale = float(np.max(np.abs(f.values))) or 1.0
            if mean > 1e-12 * scale:
                warnings.warn(
                    "zero mode excluded from a negative-order norm",
                    MeanHandlingWarning,
                    stacklevel=2,
                )
    total = float(np.sum(w * np.abs(spec) ** 2))
    return math.sqrt(g.h**g.n * g.N ** (-g.n) * total)


# ---------------------------------------------------------------------------
# dyadic decomposition


@dataclass(frozen=True)
class LittlewoodPaleyBank:
    """Dyadic partition of unity built from one smooth bump.

    The bump is beta(tau) = g(tau) - g(tau/2) with g a smooth step rising
    from 0 at tau = 1/2 to 1 at tau = 1, so beta is supported in (1/2, 2)
    and the shifted sum telescopes: sum_j beta(2^-j tau) = 1 exactly for
    tau in [2^j_min, 2^j_max], with floating-point cancellation exact
    because halving the argument is exact.
    """

    j_min: int
    j_max: int

    def __post_init__(self):
        if self.j_min > self.j_max:
            raise ConfigurationError("empty dyadic range")

    def beta(self, tau) -> np.ndarray:
        tau = np.asarray(tau, dtype=float)
        return log2_step(tau) - log2_step(tau / 2.0)

    def partition(self, tau) -> np.ndarray:
        tau = np.asarray(tau, dtype=float)
        total = np.zeros_like(tau)
        for j in range(self.j_min, self.j_max + 1):
            total += self.beta(tau * 2.0 ** (-j))
        return total

    @property
    def covered(self) -> tuple[float, float]:
        return (2.0**self.j_min, 2.0**self.j_max)


def lp_project(f: Field, j: int, bank: LittlewoodPaleyBank) -> Field:
    """Frequency projection onto the dyadic shell around 2^j."""
    if not bank.j_min <= j <= bank.j_max:
        raise DomainError("shell index %d outside bank range" % j)
    spec = np.fft.fftn(f.values) * bank.beta(f.grid.abs_freq() * 2.0 ** (-j))
    out = np.fft.ifftn(spec)
    if np.isrealobj(f.values):
        out = out.real
    return Field(grid=f.grid, values=out)


@dataclass(frozen=True)
class SquareFunctionReport:
    c_upper: float   # worst ||f||_q / l2-sum of shell norms, exponent >= 2
    c_lower: float   # worst l2-sum of shell norms / ||f||_p, exponent <= 2
    q_upper: float
    p_lower: float
    ensemble: int


def _lebesgue_norm(values: np.ndarray, h: float, n: int, p: float) -> float:
    return float((h**n * np.sum(np.abs(values) ** p)) ** (1.0 / p))


def square_function_constants(
    grid: GridSpec,
    bank: LittlewoodPaleyBank,
    ensemble: int = 50,
    q_upper: float = 4.0,
    p_lower: float = 4.0 / 3.0,
    seed: int = 0,
) -> SquareFunctionReport:
    """Measure both one-sided square-function comparison constants.

    Random fields with spectrum spread over the covered dyadic range; for
    each, compare the Lebesgue norm against the l2 aggregate of shell norms
    in the direction each inequality runs.
    """
    rng = np.random.default_rng(seed)
    k = grid.abs_freq()
    lo = max(2.0**bank.j_min, 4.0 * np.pi / (grid.N * grid.h))
    hi = min(2.0**bank.j_max, 0.5 * np.pi / grid.h)
    if not lo < hi:
        raise ConfigurationError("bank range and grid band do not overlap")
    mask = (k >= lo) & (k <= hi)
    js = [j for j in range(bank.j_min, bank.j_max + 1)
          if 2.0**j >= lo / 2 and 2.0**j <= 2 * hi]
    c_up = 0.0
    c_lo = 0.0
    for _ in range(ensemble):
        spec = np.zeros(grid.shape, dtype=complex)
        spec[mask] = rng.standard_normal(int(mask.sum())) + 1j * rng.standard_normal(
            int(mask.sum())
        )
        f = Field(grid=grid, values=np.fft.ifftn(spec).real)
        shell_q = []
        shell_p = []
        for j in js:
            pj = lp_project(f, j, bank).values
            shell_q.append(_lebesgue_norm(pj, grid.h, grid.n, q_upper))
            shell_p.append(_lebesgue_norm(pj, grid.h, grid.n, p_lower))
        agg_q = math.sqrt(sum(v**2 for v in shell_q))
        agg_p = math.sqrt(sum(v**2 for v in shell_p))
        nq = _lebesgue_norm(f.values, grid.h, grid.n, q_upper)
        npn = _lebesgue_norm(f.values, grid.h, grid.n, p_lower)
        if agg_q > 0:
            c_up = max(c_up, nq / agg_q)
        if npn > 0:
            c_lo = max(c_lo, agg_p / npn)
    return SquareFunctionReport(
        c_upper=c_up, c_lower=c_lo, q_upper=q_upper, p_lower=p_lower, ensemble=ensemble
    )


# ---------------------------------------------------------------------------
# model one-sided wave operator


@dataclass(frozen=True)
class ModelAmplitude:
    """Decaying symbol for the outgoing half of the flow.

    value(t, rho) = (1 + phi(t) rho)^decay * cutoff(rho), with the cutoff a
    fixed smooth annulus bump supported in [1/4, 2].  The -1/6 default decay
    is the rate the degenerate flow actually exhibits per mode.
    """

    decay: float = -1.0 / 6.0

    def value(self, t: float, rho) -> np.ndarray:
        rho = np.asarray(rho, dtype=float)
        return (1.0 + phi(t) * rho) ** self.decay * annulus_cutoff(rho)

    def derivative_report(
        self,
        t_values: Sequence[float] = (0.0, 1.0, 5.0, 25.0),
        max_order: int = 2,
        n_rho: int = 2001,
    ) -> dict[int, float]:
        """Measured constants sup |d^b a / d rho^b| * (1+phi t rho)^{1/6} rho^b.

        Central finite differences on a fine grid; the returned numbers
        should be O(1) and stable in t.
        """
        rho = np.linspace(0.1, 2.5, n_rho)
        d = rho[1] - rho[0]
        out: dict[int, float] = {}
        for b in range(max_order + 1):
            worst = 0.0
            for t in t_values:
                vals = self.value(float(t), rho)
                for _ in range(b):
                    vals = np.gradient(vals, d)
                weight = (1.0 + phi(float(t)) * rho) ** (-self.decay) * rho**b
                worst = max(worst, float(np.max(np.abs(vals) * weight)))
            out[b] = worst
        return out


def apply_A(f: Field, t: float, amp: ModelAmplitude) -> Field:
    """Outgoing model flow at time ``t``: multiply the spectrum by
    e^{-i phi(t)|xi|} a(t, |xi|) and transform back.

    The amplitude's annulus cutoff doubles as the frequency localization,
    so arbitrary fields are projected onto the band first.  Output is
    complex (a one-sided wave is not real even for real data).
    """
    if t < 0:
        raise DomainError("the flow is defined for t >= 0")
    k = f.grid.abs_freq()
    mult = np.exp(-1j * phi(t) * k) * amp.value(t, k)
    return Field(grid=f.grid, values=np.fft.ifftn(np.fft.fftn(f.values) * mult))


# ---------------------------------------------------------------------------
# angular analysis of the spectrum


@dataclass(frozen=True)
class AngularSpectrum:
    rho: np.ndarray           # radial frequency nodes
    k: np.ndarray             # angular wavenumbers, FFT order
    coeffs: np.ndarray        # (k, rho) complex coefficients of the spectrum
    plancherel_lhs: float     # (2 pi)^-1 sum_k int |c_k|^2 rho drho
    plancherel_rhs: float     # squared L^2 norm of the field
    plancherel_rel_err: float


def angular_coefficients(
    f: Field, n_rho: int = 96, n_omega: int = 64, rho_max: float | None = None
) -> AngularSpectrum:
    """Angular Fourier coefficients of the spectrum of a 2-D field.

    The transform is evaluated exactly at the polar nodes (a direct sum
    over grid points, not interpolation: the built-in consistency check
    below needs more accuracy than local resampling can give).  The check
    compares (2 pi)^-1 sum_k int |c_k(rho)|^2 rho drho with the squared
    field norm; both sides agree to quadrature accuracy whenever the
    spectrum is resolved and decays inside rho_max.  Radial nodes follow a
    Gauss rule: the integrand has a slope break at rho = 0, which a uniform
    trapezoid resolves only to second order.
    """
    g = f.grid
    if g.n != 2:
        raise DomainError("angular analysis needs a 2-D grid")
    if n_omega % 2 != 0:
        raise ConfigurationError("n_omega must be even")
    zone = np.pi / g.h
    if rho_max is None:
        rho_max = zone
    if rho_max > zone * (1 + 1e-12):
        raise DomainError("rho_max beyond the resolvable frequency range")
    xg, wg = leggauss(n_rho)
    rho = 0.5 * rho_max * (xg + 1.0)
    wr = 0.5 * rho_max * wg
    omega = np.arange(n_omega) * (2.0 * np.pi / n_omega)
    xi1 = np.outer(rho, np.cos(omega)).ravel()
    xi2 = np.outer(rho, np.sin(omega)).ravel()
    x = g.axis()
    # exact transform at polar nodes, separable in the two axes
    e1 = np.exp(-1j * np.outer(xi1, x))
    e2 = np.exp(-1j * np.outer(xi2, x))
    vals = g.h**2 * np.einsum("pj,jp->p", e1, f.values.astype(complex) @ e2.T)
    fhat = vals.reshape(n_rho, n_omega)
    coeffs = np.fft.fft(fhat, axis=1).T / n_omega  # (k, rho)
    lhs = float(np.sum(np.abs(coeffs) ** 2 * (wr * rho)[None, :]) / (2.0 * np.pi))
    rhs = float(f.l2_norm() ** 2)
    rel = abs(lhs - rhs) / rhs if rhs > 0 else 0.0
    return AngularSpectrum(
        rho=rho,
        k=np.fft.fftfreq(n_omega, 1.0 / n_omega).astype(int),
        coeffs=coeffs,
        plancherel_lhs=lhs,
        plancherel_rhs=rhs,
        plancherel_rel_err=rel,
    )


# ---------------------------------------------------------------------------
# kernel decay checks


_BANK_BUMP = LittlewoodPaleyBank(0, 0)


def _gauss_nodes_for(y_max: float) -> int:
    # the phase spans 1.5 y radians over the support; stay well past Nyquist
    return max(220, int(0.8 * y_max) + 80)


def _alpha_hat_factory(
    t: float, amp: ModelAmplitude, n_nodes: int = 220
) -> Callable[[np.ndarray], np.ndarray]:
    """1-D transform of rho * beta(rho) * a(t, rho), as a vectorized function.

    The profile lives on (1/2, 2); the Gauss rule there is spectrally
    accurate as long as n_nodes covers the largest |y| requested (see
    _gauss_nodes_for).
    """
    xg, wg = leggauss(n_nodes)
    rho = 1.25 + 0.75 * xg
    w = 0.75 * wg
    prof = rho * _BANK_BUMP.beta(rho) * amp.value(t, rho) * w

    def alpha_hat(y: np.ndarray) -> np.ndarray:
        y = np.atleast_1d(np.asarray(y, dtype=float))
        return np.exp(-1j * np.outer(y, rho)) @ prof

    return alpha_hat


def _alpha_hat_abs_table(
    t: float, amp: ModelAmplitude, y_max: float, dy: float = 0.02
) -> tuple[np.ndarray, np.ndarray]:
    ah = _alpha_hat_factory(t, amp, _gauss_nodes_for(y_max))
    y = np.arange(0.0, y_max + dy, dy)
    vals = np.empty_like(y)
    step = 20000
    for i in range(0, y.size, step):
        vals[i : i + step] = np.abs(ah(y[i : i + step]))
    return y, vals  # |alpha_hat| is even in y


@dataclass(frozen=True)
class KernelBoundReport:
    t: float
    r: float
    b: float
    integral: float        # int_0^2pi |alpha_hat(b - r cos theta)| dtheta
    regime: str            # "rapid" (small r or dominant b) or "oscillatory"
    bound_shape: float     # the matching decay shape with unit constant
    ratio: float           # integral / bound_shape


def kernel_bound_check(
    t: float,
    r: float,
    b: float,
    amp: ModelAmplitude | None = None,
    n_theta: int = 2048,
    decay_order: int = 3,
) -> KernelBoundReport:
    """Quadrature check of the angular integral of the 1-D kernel transform.

    Two regimes: when r <= 1 or |b| >= 2r the integral inherits the rapid
    decay of the transform of a smooth compactly supported profile; otherwise
    cancellation only gives the r^-1 + r^-1/2 <r-|b|>^-1/2 envelope.  Both
    shapes carry the (1 + phi(t))^-1/6 amplitude decay.  The report's ratio
    divides by the shape with constant 1, so finite stable values over a
    parameter sweep are the check.
    """
    if amp is None:
        amp = ModelAmplitude()
    if r < 0:
        raise DomainError("r must be nonnegative")
    ah = _alpha_hat_factory(t, amp, _gauss_nodes_for(abs(b) + r))
    theta = (np.arange(n_theta) + 0.5) * (2.0 * np.pi / n_theta)
    y = b - r * np.cos(theta)
    integral = float(np.sum(np.abs(ah(y))) * (2.0 * np.pi / n_theta))
    decay_t = (1.0 + phi(t)) ** (-1.0 / 6.0)
    if r <= 1.0 or abs(b) >= 2.0 * r:
        regime = "rapid"
        shape = (1.0 + b * b) ** (-decay_order / 2.0) * decay_t
    else:
        regime = "oscillatory"
        gap = 1.0 + (r - abs(b)) ** 2
        shape = (1.0 / r + gap ** (-0.25) / math.sqrt(r)) * decay_t
    return KernelBoundReport(
        t=t, r=r, b=b, integral=integral, regime=regime,
        bound_shape=shape, ratio=integral / shape,
    )


def kernel_decay_fit(
    t: float,
    r: float,
    b_grid: np.ndarray,
    amp: ModelAmplitude | None = None,
) -> float:
    """Fitted polynomial decay order of the angular integral in |b|.

    Least squares on log integral vs log <b> over the given grid, which must
    sit in the rapid regime (|b| >= 2r for every node).
    """
    b_grid = np.asarray(b_grid, dtype=float)
    if np.any(np.abs(b_grid) < 2.0 * r) and r > 1.0:
        raise DomainError("decay fit wants |b| >= 2r throughout")
    vals = np.array(
        [kernel_bound_check(t, r, float(b), amp).integral for b in b_grid]
    )
    if np.any(vals <= 0):
        raise NumericalFailureError("vanishing integral in the decay fit")
    x = np.log(np.hypot(1.0, b_grid))
    slope = float(np.polyfit(x, np.log(vals), 1)[0])
    return -slope


def claim_integral(
    t: float,
    r: float,
    delta: float = 0.1,
    amp: ModelAmplitude | None = None,
    s_margin: float = 60.0,
    ds: float = 0.1,
    n_theta: int = 512,
) -> float:
    """The weighted squared s-integral of the angular kernel integral.

    Integrates (int |alpha_hat(phi(t)-s-r cos theta)| dtheta)^2 against the
    weight (1+phi(t))^{1/3} <phi(t)-s>^{1-2 delta} ds.  The transform decays
    rapidly, so truncating |phi(t)-s| - r cos theta beyond ``s_margin``
    loses nothing at double precision.  A bounded result, stable in t and r,
    is the point of the check.
    """
    if amp is None:
        amp = ModelAmplitude()
    if not 0.0 < delta < 0.5:
        raise DomainError("delta must lie in (0, 1/2)")
    pt = phi(t)
    lo, hi = -(r + s_margin), r + s_margin  # range of phi(t) - s that matters
    u = np.arange(lo, hi + ds, ds)  # u = phi(t) - s
    theta = (np.arange(n_theta) + 0.5) * (2.0 * np.pi / n_theta)
    y = np.abs(u[:, None] - r * np.cos(theta)[None, :])
    ytab, vtab = _alpha_hat_abs_table(t, amp, float(np.max(y)) + 1.0)
    inner = np.interp(y, ytab, vtab).sum(axis=1) * (2.0 * np.pi / n_theta)
    weight = (1.0 + pt) ** (1.0 / 3.0) * (1.0 + u * u) ** (0.5 - delta)
    return float(np.sum(weight * inner**2) * ds)


# ---------------------------------------------------------------------------
# slab-data scaling experiment


@dataclass(frozen=True)
class KnappConfig:
    """Geometry of one slab-data run.

    The data spectrum is the indicator of {|xi_1 - 1| < 1/2, |xi_2| < delta};
    the co-moving box has |x_1 - phi(t)| <= 1/4, |x_2| <= 1/(4 delta), and
    times run until phi(t) = 1/delta.
    """

    delta: float
    q: float
    r: float
    slab_constant: float = 0.25

    def __post_init__(self):
        if not 0.0 < self.delta <= 0.25:
            raise ConfigurationError("delta must lie in (0, 1/4]")
        if self.q < 1.0 or self.r < 1.0:
            raise ConfigurationError("norm indices must be at least 1")

    @property
    def t_max(self) -> float:
        return (1.5 / self.delta) ** (2.0 / 3.0)


@dataclass(frozen=True)
class KnappReport:
    deltas: np.ndarray
    ratios: np.ndarray
    fitted_slope: float
    theory_slope: float
    lower_c: float
    lower_c_per_delta: np.ndarray


def _slab_wave(
    t: float,
    y1: np.ndarray,
    y2: np.ndarray,
    delta: float,
    amp: ModelAmplitude,
    n1: int = 16,
    n2: int = 8,
) -> np.ndarray:
    """Model flow applied to the slab indicator, at co-moving offsets.

    Positions are x = (phi(t) + y1, y2); the co-moving phase
    y . xi + phi(t)(xi_1 - |xi|) stays O(1) over the slab, so a small
    tensor Gauss rule is spectrally accurate.
    """
    xg1, wg1 = leggauss(n1)
    xg2, wg2 = leggauss(n2)
    xi1 = 1.0 + 0.5 * xg1
    xi2 = delta * xg2
    X1 = np.repeat(xi1, n2)
    X2 = np.tile(xi2, n1)
    W = np.repeat(0.5 * wg1, n2) * np.tile(delta * wg2, n1)
    R = np.hypot(X1, X2)
    base = W * amp.value(t, R) * np.exp(1j * phi(t) * (X1 - R))
    out = np.empty(y1.shape, dtype=complex)
    step = max(1, 4_000_000 // base.size)
    flat1, flat2 = y1.ravel(), y2.ravel()
    res = out.ravel()
    for i in range(0, flat1.size, step):
        ph = np.outer(flat1[i : i + step], X1) + np.outer(flat2[i : i + step], X2)
        res[i : i + step] = np.exp(1j * ph) @ base
    return out * (2.0 * np.pi) ** (-2)


def _knapp_norm(cfg: KnappConfig, amp: ModelAmplitude, n_t: int, n_theta: int | None):
    """Mixed norm of the slab wave over the co-moving support region."""
    delta = cfg.delta
    w1 = 10.0                      # co-moving x1 window, catches the main lobes
    w2 = 2.0 / delta               # x2 window, fixed multiple of the slab scale
    r_max = math.hypot(1.0 / delta + w1, w2)
    need = int(2 ** math.ceil(math.log2(7.0 * r_max)))
    if n_theta is None:
        n_theta = max(256, need)
    elif n_theta < need:
        raise ConfigurationError(
            "n_theta = %d cannot resolve delta = %g (need >= %d)" % (n_theta, delta, need)
        )
    n_r = int(r_max / 0.25)
    rg = np.linspace(0.0, r_max, n_r)
    tg = np.arange(n_theta) * (2.0 * np.pi / n_theta)
    ct, st = np.cos(tg), np.sin(tg)
    times = np.linspace(0.0, cfg.t_max, n_t)
    rad_norms = np.empty(n_t)
    wr = _trapezoid_weights(rg) * rg  # polar measure: the scaling lives in r dr
    dtheta = 2.0 * np.pi / n_theta
    for i, t in enumerate(times):
        pt = phi(t)
        X1 = np.outer(rg, ct)
        X2 = np.outer(rg, st)
        mask = (np.abs(X1 - pt) <= w1) & (np.abs(X2) <= w2)
        vals = np.zeros(mask.shape)
        if np.any(mask):
            av = _slab_wave(t, X1[mask] - pt, X2[mask], delta, amp)
            vals[mask] = np.abs(av) ** 2
        ang = dtheta * vals.sum(axis=1)
        rad_norms[i] = np.dot(ang ** (cfg.r / 2.0), wr) ** (1.0 / cfg.r)
    wt = _trapezoid_weights(times)
    return float(np.dot(rad_norms**cfg.q, wt) ** (1.0 / cfg.q))


def _knapp_lower_c(cfg: KnappConfig, amp: ModelAmplitude) -> float:
    """min |Af| / (|D| delta^{1/6}) over a sample of the co-moving box."""
    delta = cfg.delta
    c = cfg.slab_constant
    worst = np.inf
    for frac in (0.3, 0.6, 1.0):
        t = (frac / delta * 1.5) ** (2.0 / 3.0)
        y1 = np.linspace(-c, c, 5)
        y2 = np.linspace(-c / delta, c / delta, 7)
        Y1, Y2 = np.meshgrid(y1, y2, indexing="ij")
        vals = np.abs(_slab_wave(t, Y1, Y2, delta, amp))
        worst = min(worst, float(vals.min()))
    area = 2.0 * delta
    return worst / (area * delta ** (1.0 / 6.0))


def knapp_experiment(
    deltas: Sequence[float],
    q: float,
    r: float,
    amp: ModelAmplitude | None = None,
    n_t: int = 14,
    n_theta: int | None = None,
) -> KnappReport:
    """Scaling of the mixed norm of slab-data waves against slab thickness.

    For each delta the data spectrum is the indicator of a 1 x 2 delta slab
    at unit frequency; the report fits log(norm ratio) against log(delta)
    and compares with the exponent 2/3 - 2/(3q) - 1/r predicted by scaling,
    and also records the smallest value of |Af| on the co-moving box
    relative to |D| delta^{1/6}.
    """
    if amp is None:
        amp = ModelAmplitude()
    ds = np.asarray(list(deltas), dtype=float)
    if ds.size < 5:
        raise ConfigurationError("need at least five thickness values")
    ratios_step = ds[1:] / ds[:-1]
    if np.max(np.abs(ratios_step - ratios_step[0])) > 1e-9 * ratios_step[0]:
        raise ConfigurationError("thickness values must form a geometric sequence")
    ratios = np.empty(ds.size)
    lower = np.empty(ds.size)
    for i, d in enumerate(ds):
        cfg = KnappConfig(delta=float(d), q=q, r=r)
        norm = _knapp_norm(cfg, amp, n_t=n_t, n_theta=n_theta)
        data_norm = math.sqrt(2.0 * d) / (2.0 * np.pi)
        ratios[i] = norm / data_norm
        lower[i] = _knapp_lower_c(cfg, amp)
    slope = float(np.polyfit(np.log(ds), np.log(ratios), 1)[0])
    theory = 2.0 / 3.0 - 2.0 / (3.0 * q) - 1.0 / r
    return KnappReport(
        deltas=ds,
        ratios=ratios,
        fitted_slope=slope,
        theory_slope=theory,
        lower_c=float(lower.min()),
        lower_c_per_delta=lower,
    )


# ---------------------------------------------------------------------------
# ensemble ratio measurements


@dataclass(frozen=True)
class EnsembleRatioReport:
    resolutions: tuple[int, ...]
    maxima: tuple[float, ...]
    ensemble: int
    label: str


def _shell_modes(grid: GridSpec, lo: float = 0.5, hi: float = 1.0):
    """Lattice modes in the frequency shell, plus the index mask."""
    k = grid.abs_freq()
    mask = (k >= lo) & (k <= hi)
    if not np.any(mask):
        raise ConfigurationError("grid has no lattice modes in the shell")
    freqs = grid.freq_grids()
    return mask, freqs[0][mask], freqs[1][mask], k[mask]


def _symmetrize(coef: np.ndarray) -> np.ndarray:
    n = coef.shape[0]
    flip = (-np.arange(n)) % n
    return 0.5 * (coef + np.conj(coef[np.ix_(flip, flip)]))


def _mode_phases(grid: GridSpec) -> np.ndarray:
    # grid points start at -L, so lattice mode k picks up (-1)^k per axis
    p = (-1.0) ** np.abs(np.fft.fftfreq(grid.N, 1.0 / grid.N).astype(int))
    return np.outer(p, p)


def _field_from_coef(grid: GridSpec, coef: np.ndarray) -> Field:
    """Field with values sum_m coef[m] e^{i x . xi_m} on the grid."""
    values = np.fft.ifftn(coef * _mode_phases(grid)) * grid.N**grid.n
    if np.max(np.abs(values.imag)) <= 1e-12 * max(np.max(np.abs(values.real)), 1e-300):
        values = values.real
    return Field(grid=grid, values=values)


def _coef_from_field(f: Field) -> np.ndarray:
    return np.fft.fftn(f.values) * _mode_phases(f.grid) / f.grid.N**f.grid.n


def _random_shell_field(grid: GridSpec, rng: np.random.Generator):
    """Random real field with spectrum on the lattice shell; returns the
    mode coefficient array alongside."""
    mask, *_ = _shell_modes(grid)
    coef = np.zeros(grid.shape, dtype=complex)
    coef[mask] = rng.standard_normal(int(mask.sum())) + 1j * rng.standard_normal(
        int(mask.sum())
    )
    coef = _symmetrize(coef)
    return _field_from_coef(grid, coef), coef


def _require_shell_localized(f: Field, lo: float = 0.5, hi: float = 1.0):
    k = f.grid.abs_freq()
    spec = np.fft.fftn(f.values)
    total = float(np.sum(np.abs(spec) ** 2))
    if total == 0.0:
        return
    outside = float(np.sum(np.abs(spec[(k < lo) | (k > hi)]) ** 2))
    if outside > 1e-8 * total:
        raise DomainError("field spectrum is not localized to the shell")


def _polar_eval_matrix(grid: GridSpec, spec_norm: MixedNormSpec, xi1, xi2) -> np.ndarray:
    """exp(i x . xi) for polar points x and the given modes; one dense block."""
    rg, tg = spec_norm.r_grid, spec_norm.theta_grid
    x1 = np.outer(rg, np.cos(tg)).ravel()
    x2 = np.outer(rg, np.sin(tg)).ravel()
    return np.exp(1j * (np.outer(x1, xi1) + np.outer(x2, xi2)))


def _norm_spec_for(grid: GridSpec, q: float, r: float, time_nodes: np.ndarray):
    return MixedNormSpec(
        q=q, r=r, r_max=grid.L, time_nodes=time_nodes,
        n_r=grid.N, n_theta=min(grid.N, 256),
    )


def empirical_homogeneous_ratio(
    ensemble: int,
    indices: StrichartzIndices,
    grids: Sequence[GridSpec],
    time_horizon: float = 8.0,
    n_time: int = 17,
    seed: int = 0,
    members: Sequence[Field] | None = None,
    amp: ModelAmplitude | None = None,
) -> EnsembleRatioReport:
    """Worst mixed-norm amplification of the model flow over random shell data.

    For each grid in the ladder, draws ``ensemble`` random real fields with
    spectrum on the lattice shell [1/2, 1], pushes them through the model
    flow, and records max mixed_norm(Af) / ||f||_2.  Stability of the maxima
    across the ladder is the testable shadow of a uniform estimate.
    """
    if not admissible_check(indices.q, indices.r):
        raise ConfigurationError(
            "inadmissible indices q=%g r=%g" % (indices.q, indices.r)
        )
    if amp is None:
        amp = ModelAmplitude()
    times = np.linspace(0.0, time_horizon, n_time)
    maxima = []
    for grid in grids:
        rng = np.random.default_rng(seed)
        spec_norm = _norm_spec_for(grid, indices.q, indices.r, times)
        mask, xi1, xi2, kabs = _shell_modes(grid)
        E = _polar_eval_matrix(grid, spec_norm, xi1, xi2)
        worst = 0.0
        for m in range(ensemble):
            if members is not None:
                f = members[m]
                if f.grid != grid:
                    raise DomainError("member field grid does not match the ladder grid")
                _require_shell_localized(f)
                coef = _coef_from_field(f)
            else:
                f, coef = _random_shell_field(grid, rng)
            l2 = f.l2_norm()
            if l2 == 0.0:
                continue
            coef0 = coef[mask]
            cube = np.empty((times.size, spec_norm.n_r, spec_norm.n_theta), dtype=complex)
            for i, t in enumerate(times):
                mult = np.exp(-1j * phi(t) * kabs) * amp.value(t, kabs)
                cube[i] = (E @ (coef0 * mult)).reshape(spec_norm.n_r, spec_norm.n_theta)
            worst = max(worst, mixed_norm(cube, spec_norm) / l2)
        maxima.append(worst)
    return EnsembleRatioReport(
        resolutions=tuple(g.N for g in grids),
        maxima=tuple(maxima),
        ensemble=ensemble,
        label="homogeneous q=%g r=%g" % (indices.q, indices.r),
    )


def _dual(v: float) -> float:
    if math.isinf(v):
        return 1.0
    if v == 1.0:
        return math.inf
    return v / (v - 1.0)


def empirical_inhomogeneous_ratio(
    ensemble: int,
    q: float,
    r: float,
    q_tilde: float,
    r_tilde: float,
    grids: Sequence[GridSpec],
    time_horizon: float = 8.0,
    n_time: int = 17,
    seed: int = 0,
) -> EnsembleRatioReport:
    """Worst source-to-solution mixed-norm ratio over random shell sources.

    The source is a rank-2 separable field with spectrum on the lattice
    shell; the solution comes from the per-mode source representation of the
    flow.  The ratio is mixed_norm(w; q, r) over mixed_norm(F; dual q_tilde,
    dual r_tilde).  The exponent relation 1/q + 3/r = 1/q_tilde + 3/r_tilde
    and both admissibility gates are enforced.
    """
    for v, name in ((q, "q"), (r, "r"), (q_tilde, "q_tilde"), (r_tilde, "r_tilde")):
        if v < 2.0:
            raise ConfigurationError("%s must be at least 2" % name)
    if abs(1.0 / q + 3.0 / r - 1.0 / q_tilde - 3.0 / r_tilde) > 1e-9:
        raise ConfigurationError("exponent relation 1/q + 3/r = 1/q~ + 3/r~ violated")
    for qq, rr in ((q, r), (q_tilde, r_tilde)):
        if 1.0 / qq > 1.0 - 1.5 / rr + 1e-12:
            raise ConfigurationError("indices outside the admissible range")
    qd, rd = _dual(q_tilde), _dual(r_tilde)
    times = np.linspace(0.0, time_horizon, n_time)
    # source Duhamel weights at every output time, per unique frequency
    maxima = []
    for grid in grids:
        rng = np.random.default_rng(seed + 1)
        spec_w = _norm_spec_for(grid, q, r, times)
        spec_f = _norm_spec_for(grid, qd, rd, times)
        mask, xi1, xi2, kabs = _shell_modes(grid)
        E = _polar_eval_matrix(grid, spec_w, xi1, xi2)
        lam, inv = np.unique(kabs, return_inverse=True)
        # Duhamel kernel v2(t) v1(tau) - v1(t) v2(tau) on quadrature nodes of
        # [0, t], per unique frequency; reused by every ensemble member
        xg, wg = leggauss(24)
        kernels: list[tuple[np.ndarray, np.ndarray, np.ndarray] | None] = []
        for t in times:
            if t <= 0.0:
                kernels.append(None)
                continue
            tau = 0.5 * t * (xg + 1.0)
            wq = 0.5 * t * wg
            v1t, v2t, _, _ = multiplier_arrays(float(t), lam)
            v1n = np.empty((tau.size, lam.size))
            v2n = np.empty_like(v1n)
            for j in range(tau.size):
                v1n[j], v2n[j], _, _ = multiplier_arrays(float(tau[j]), lam)
            ker = v2t[:, None] * v1n.T - v1t[:, None] * v2n.T
            kernels.append((tau, wq, ker))
        worst = 0.0
        for _ in range(ensemble):
            parts = []
            for _rank in range(2):
                _, coef = _random_shell_field(grid, rng)
                t0 = rng.uniform(1.0, 0.7 * time_horizon)
                wdt = rng.uniform(0.5, 1.5)
                om = rng.uniform(0.0, 2.0)
                ph0 = rng.uniform(0.0, 2.0 * np.pi)
                env = lambda tau, t0=t0, wdt=wdt, om=om, ph0=ph0: np.exp(
                    -(((tau - t0) / wdt) ** 2)
                ) * np.cos(om * tau + ph0)
                parts.append((coef[mask], env))
            cube_w = np.zeros((times.size, spec_w.n_r, spec_w.n_theta), dtype=complex)
            cube_f = np.zeros_like(cube_w)
            for i, t in enumerate(times):
                wcoef = np.zeros(int(mask.sum()), dtype=complex)
                fcoef = np.zeros(int(mask.sum()), dtype=complex)
                for coef, env in parts:
                    if kernels[i] is not None:
                        tau, wq, ker = kernels[i]
                        integ = ker @ (env(tau) * wq)
                        wcoef += coef * integ[inv]
                    fcoef += coef * float(env(np.array([t]))[0])
                cube_w[i] = (E @ wcoef).reshape(spec_w.n_r, spec_w.n_theta)
                cube_f[i] = (E @ fcoef).reshape(spec_w.n_r, spec_w.n_theta)
            denom = mixed_norm(cube_f, spec_f)
            if denom == 0.0:
                continue
            worst = max(worst, mixed_norm(cube_w, spec_w) / denom)
        maxima.append(worst)
    return EnsembleRatioReport(
        resolutions=tuple(g.N for g in grids),
        maxima=tuple(maxima),
        ensemble=ensemble,
        label="inhomogeneous q=%g r=%g q~=%g r~=%g" % (q, r, q_tilde, r_tilde),
    )


# ---------------------------------------------------------------------------
# causal truncation and angular embedding


@dataclass(frozen=True)
class ChristKiselevReport:
    norm_full: float
    norm_truncated: float
    ratio: float
    p: float
    q: float


def christ_kiselev_check(
    kernel, p: float, q: float, n: int = 64, ensemble: int = 50, seed: int = 0
) -> ChristKiselevReport:
    """Operator norm of a kernel against its causal (lower-triangular) cut.

    ``kernel`` is an (n, n) array or a callable (t, s) -> value sampled on a
    uniform grid of [0, 1].  Norms are measured as the worst L^p -> L^q
    amplification over a random ensemble; the lemma this shadows needs
    p < q, so anything else is rejected.
    """
    if p >= q:
        raise ConfigurationError("the causal truncation bound needs p < q")
    ts = (np.arange(n) + 0.5) / n
    if callable(kernel):
        K = np.asarray(kernel(ts[:, None], ts[None, :]), dtype=float)
    else:
        K = np.asarray(kernel, dtype=float)
        n = K.shape[0]
    if K.shape != (n, n):
        raise ConfigurationError("kernel must be square")
    Kt = np.tril(K)
    h = 1.0 / n
    rng = np.random.default_rng(seed)
    worst_full = 0.0
    worst_trunc = 0.0
    for _ in range(ensemble):
        g = rng.standard_normal(n)
        gn = (h * np.sum(np.abs(g) ** p)) ** (1.0 / p)
        if gn == 0.0:
            continue
        full = (h * np.sum(np.abs(h * (K @ g)) ** q)) ** (1.0 / q)
        trunc = (h * np.sum(np.abs(h * (Kt @ g)) ** q)) ** (1.0 / q)
        worst_full = max(worst_full, full / gn)
        worst_trunc = max(worst_trunc, trunc / gn)
    ratio = worst_trunc / worst_full if worst_full > 0 else math.inf
    return ChristKiselevReport(
        norm_full=worst_full, norm_truncated=worst_trunc, ratio=ratio, p=p, q=q
    )


@dataclass(frozen=True)
class AngularSobolevReport:
    sup_value: float
    l2_value: float
    deriv_l2_value: float
    constant: float  # sup / (l2 + deriv_l2)


def angular_sobolev_check(v: np.ndarray) -> AngularSobolevReport:
    """Sup-norm control of a circle function by its L^2 and derivative norms.

    ``v`` holds samples on a uniform angular grid; the derivative is
    spectral.  For constants the measured ratio is exactly (2 pi)^{-1/2},
    and boundedness across oscillatory inputs is what tests assert.
    """
    v = np.asarray(v)
    if v.ndim != 1 or v.size < 8 or v.size % 2 != 0:
        raise DomainError("need a 1-D even-length sample array, at least 8 points")
    n = v.size
    dtheta = 2.0 * np.pi / n
    sup = float(np.max(np.abs(v)))
    l2 = math.sqrt(dtheta * float(np.sum(np.abs(v) ** 2)))
    k = np.fft.fftfreq(n, 1.0 / n)
    dv = np.fft.ifft(1j * k * np.fft.fft(v))
    dl2 = math.sqrt(dtheta * float(np.sum(np.abs(dv) ** 2)))
    denom = l2 + dl2
    return AngularSobolevReport(
        sup_value=sup,
        l2_value=l2,
        deriv_l2_value=dl2,
        constant=sup / denom if denom > 0 else 0.0,
    )
