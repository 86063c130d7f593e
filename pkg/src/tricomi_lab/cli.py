"""Command line front end: one subcommand per experiment surface.

Every run writes its tabular output as CSV (single header row, 17
significant digits, byte-identical across reruns with the same config and
seed) plus a JSON file carrying the result summary, the fully resolved
config, the package version, and a timestamp (the only field allowed to
change between reruns).

Config files are plain text, one `key = value` per line, `#` comments,
dotted section prefixes, unknown keys rejected.  Keys by subcommand:

  propagate / simulate
    grid.n, grid.L, grid.N            box dimension, half-width, points/axis
    data.kind                         bump | zero | random
    data.amplitude, data.width        peak height and length scale
    data.velocity_scale               scales the velocity datum (bump only)
    data.support                      declared support radius
                                      (default 4*width; L/2 for random)
    run.t                             propagate: evaluation time
    slice.axis                        propagate: axis of the output slice
    run.p, run.dt, run.T              simulate: power, step, horizon
    run.threshold, run.dealias        simulate: blowup cap, 2/3-rule toggle

  riccati
    ode.p, ode.a, ode.q               exponents, (p-1)a = q-2 required
    ode.K0                            envelope size, scalar or comma list
    ode.K1, ode.M, ode.T0             forcing constant, shift, start time
    run.horizon, run.rtol             survival horizon, step tolerance

  strichartz
    run.kind                          homogeneous | inhomogeneous
    grid.n, grid.L, grid.N_list       resolution ladder (comma ints)
    indices.p                         power picking the index tuple
    indices.q_tilde, indices.r_tilde  inhomogeneous dual pair (default q, r)
    ensemble.members                  fields per resolution
    run.time_horizon, run.n_time      sampled time window
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .blowup import (
    RadialProfile,
    RiccatiConfig,
    c0_estimate,
    growth_exponent,
    radon_radial,
    riccati_integrate,
)
from .errors import ConfigurationError, SupportViolationError
from .exponents import (
    classify_regime,
    exponent_report,
    wellposedness_indices,
)
from .grids import Field, GridSpec
from .nonlinear import SimulationConfig, bump_data, detect_blowup, evolve
from .propagator import homogeneous_solve
from .specfun import (
    gamma_beta_identities,
    hypergeom_F16,
    multiplier_arrays,
    phi,
)
from .strichartz import (
    empirical_homogeneous_ratio,
    empirical_inhomogeneous_ratio,
    knapp_experiment,
)

__all__ = ["main"]

_MISSING = object()


# ---------------------------------------------------------------------------
# config plumbing

def _parse_config_file(path: str) -> dict[str, str]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}")
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigurationError(f"{path}:{lineno}: empty key or value")
        if key in entries:
            raise ConfigurationError(f"{path}:{lineno}: duplicate key {key}")
        entries[key] = value
    return entries


class _Conf:
    """Typed key consumption with a resolved-config echo and a leftover check."""

    def __init__(self, raw: dict[str, str], source: str):
        self._raw = dict(raw)
        self._source = source
        self.resolved: dict = {}

    def take(self, key: str, cast=str, default=_MISSING):
        if key in self._raw:
            text = self._raw.pop(key)
            try:
                value = cast(text)
            except (TypeError, ValueError):
                raise ConfigurationError(f"{self._source}: bad value for {key}: {text!r}")
        elif default is _MISSING:
            raise ConfigurationError(f"{self._source}: missing required key {key}")
        else:
            value = default
        self.resolved[key] = value
        return value

    def finish(self):
        if self._raw:
            raise ConfigurationError(
                f"{self._source}: unknown keys: {', '.join(sorted(self._raw))}")


def _as_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("true", "yes", "1"):
        return True
    if low in ("false", "no", "0"):
        return False
    raise ValueError(text)


def _float_list(text: str) -> list[float]:
    return [float(part) for part in text.split(",") if part.strip()]


def _int_list(text: str) -> list[int]:
    return [int(part) for part in text.split(",") if part.strip()]


# ---------------------------------------------------------------------------
# output plumbing

def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _write_csv(out_dir: Path, name: str, header: list[str], rows) -> Path:
    path = out_dir / f"{name}.csv"
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")
    return path


def _write_json(out_dir: Path, name: str, subcommand: str, resolved: dict, result) -> Path:
    payload = {
        "subcommand": subcommand,
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "config": resolved,
        "result": result,
    }
    path = out_dir / f"{name}.json"
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# shared field construction

def _grid_from(conf: _Conf) -> GridSpec:
    n = conf.take("grid.n", int, 2)
    L = conf.take("grid.L", float)
    N = conf.take("grid.N", int)
    return GridSpec(n=n, L=L, N=N)


def _make_data(grid: GridSpec, conf: _Conf, seed: int):
    """Data fields plus the declared support radius for the cone gate."""
    kind = conf.take("data.kind", str, "bump")
    amplitude = conf.take("data.amplitude", float, 1.0)
    width = conf.take("data.width", float, 2.0)
    vel = conf.take("data.velocity_scale", float, 1.0)
    if kind == "zero":
        zero = np.zeros(grid.shape)
        f = Field(grid=grid, values=zero)
        g = Field(grid=grid, values=zero.copy())
        support_default = 0.0
    elif kind == "bump":
        f, g = bump_data(grid, amplitude, width=width, velocity_scale=vel)
        support_default = 4.0 * width
    elif kind == "random":
        rng = np.random.default_rng(seed)
        damp = np.exp(-0.25 * width**2 * grid.abs_freq() ** 2)
        def draw():
            spec = damp * (rng.standard_normal(grid.shape)
                           + 1j * rng.standard_normal(grid.shape))
            vals = np.fft.ifftn(spec).real
            top = np.max(np.abs(vals))
            return Field(grid=grid, values=vals * (amplitude / top if top > 0 else 1.0))
        f = draw()
        g = draw()
        support_default = grid.L / 2.0
    else:
        raise ConfigurationError(f"data.kind must be bump, zero, or random, got {kind}")
    support = conf.take("data.support", float, support_default)
    return f, g, support


def _cone_gate(support: float, t: float, L: float):
    reach = support + phi(t)
    if reach > L:
        raise SupportViolationError(
            f"data support {support:g} plus cone radius {phi(t):.6g} reaches "
            f"{reach:.6g}, beyond the box half-width {L:g}")


# ---------------------------------------------------------------------------
# subcommands

def _cmd_exponents(args) -> int:
    out = _out_dir(args)
    report = exponent_report(args.n)
    result = {"n": report.n, "p_crit": report.p_crit, "p_conf": report.p_conf,
              "residual": report.residual}
    if args.p is not None:
        regime = classify_regime(args.n, args.p)
        result["p"] = args.p
        result["regime"] = regime.regime
        if args.n == 2:
            try:
                idx = wellposedness_indices(args.p)
                result["indices"] = {"q": idx.q, "r": idx.r, "qt_prime": idx.qt_prime,
                                     "rt_prime": idx.rt_prime, "s": idx.s,
                                     "case": idx.case_tag}
            except ValueError:
                result["indices"] = None
    resolved = {"n": args.n, "p": args.p, "seed": args.seed}
    _write_json(out, "exponents", "exponents", resolved, result)
    print(json.dumps(result, indent=2, sort_keys=True))
    return 0


def _cmd_specfun_test(args) -> int:
    out = _out_dir(args)
    checks = []

    t_grid = np.linspace(0.1, 3.0, 8)
    lam = np.linspace(0.0, 8.0, 33)
    worst = 0.0
    for t in t_grid:
        v1, v2, v1t, v2t = multiplier_arrays(float(t), lam)
        worst = max(worst, float(np.max(np.abs(v1 * v2t - v2 * v1t - 1.0))))
    checks.append({"name": "unit_wronskian", "residual": worst, "passed": worst <= 1e-9})

    worst = 0.0
    for t in (0.3, 1.0, 2.5):
        v1, v2, v1t, v2t = multiplier_arrays(t, np.array([0.0]))
        worst = max(worst, abs(v1[0] - 1.0), abs(v2[0] - t), abs(v1t[0]), abs(v2t[0] - 1.0))
    checks.append({"name": "rest_mode_row", "residual": worst, "passed": worst <= 1e-12})

    z = np.linspace(0.0, 1.0 - 1e-6, 1000)
    fz = hypergeom_F16(z)
    low = float(np.min(fz) - 1.0)
    mono = float(np.min(np.diff(fz)))
    ok = low >= -1e-12 and mono >= -1e-12
    checks.append({"name": "kernel_factor_bounded_monotone",
                   "residual": min(low, mono), "passed": ok})

    gb = gamma_beta_identities()
    checks.append({"name": "gamma_beta_identities",
                   "residual": max(gb.gamma_ratio_error, gb.two_pi_error),
                   "passed": gb.passed})

    all_passed = all(c["passed"] for c in checks)
    result = {"checks": checks, "all_passed": all_passed}
    _write_json(out, "specfun-test", "specfun-test", {"seed": args.seed}, result)
    print(json.dumps(result, indent=2, sort_keys=True))
    return 0 if all_passed else 2


def _cmd_propagate(args) -> int:
    out = _out_dir(args)
    conf = _Conf(_parse_config_file(args.config), args.config)
    grid = _grid_from(conf)
    f, g, support = _make_data(grid, conf, args.seed)
    t = conf.take("run.t", float)
    axis = conf.take("slice.axis", int, 0)
    conf.finish()
    if not 0 <= axis < grid.n:
        raise ConfigurationError(f"slice.axis must be in [0, {grid.n}), got {axis}")
    _cone_gate(support, t, grid.L)

    u, v = homogeneous_solve(f, g, t, return_velocity=True)
    center = [grid.N // 2] * grid.n
    index = tuple(slice(None) if ax == axis else center[ax] for ax in range(grid.n))
    x = grid.axis()
    rows = zip(x, u.values[index], v.values[index])
    _write_csv(out, "propagate", ["x", "u", "v"], rows)
    result = {"time": t, "sup_u": u.sup_norm(), "l2_u": u.l2_norm(),
              "sup_v": v.sup_norm(), "l2_v": v.l2_norm()}
    _write_json(out, "propagate", "propagate",
                {**conf.resolved, "seed": args.seed}, result)
    print(f"propagate: t = {t:g}, sup |u| = {result['sup_u']:.6g}")
    return 0


def _cmd_simulate(args) -> int:
    out = _out_dir(args)
    conf = _Conf(_parse_config_file(args.config), args.config)
    grid = _grid_from(conf)
    f, g, support = _make_data(grid, conf, args.seed)
    p = conf.take("run.p", float)
    dt = conf.take("run.dt", float)
    horizon = conf.take("run.T", float)
    threshold = conf.take("run.threshold", float, 1e6)
    dealias = conf.take("run.dealias", _as_bool, True)
    method = conf.take("run.method", str, "stepper")
    conf.finish()
    if method != "stepper":
        raise ConfigurationError("simulate drives the stepper; run.method must be 'stepper'")
    _cone_gate(support, horizon, grid.L)

    cfg = SimulationConfig(p=p, grid=grid, dt=dt, T=horizon, dealias=dealias,
                           blowup_threshold=threshold, method=method)
    trace = evolve(f, g, cfg)
    verdict = detect_blowup(trace, cfg)
    rows = zip(trace.times, trace.sup_norms, trace.g_values, trace.lp_norms)
    _write_csv(out, "simulate", ["t", "sup_norm", "G", "Lp_norm"], rows)
    result = {"outcome": verdict.outcome, "t_star": verdict.t_star,
              "horizon": verdict.horizon, "reason": verdict.reason,
              "final_sup": float(trace.sup_norms[-1])}
    _write_json(out, "simulate", "simulate",
                {**conf.resolved, "seed": args.seed}, result)
    print(f"simulate: outcome = {verdict.outcome}")
    return 0


def _riccati_rows(conf: _Conf):
    p = conf.take("ode.p", float)
    a = conf.take("ode.a", float)
    q = conf.take("ode.q", float)
    k0_list = conf.take("ode.K0", _float_list)
    k1 = conf.take("ode.K1", float, 1.0)
    m = conf.take("ode.M", float, 1.0)
    t0 = conf.take("ode.T0", float, 1.0)
    horizon = conf.take("run.horizon", float, 1e4)
    rtol = conf.take("run.rtol", float, 1e-8)
    conf.finish()
    rows = []
    for k0 in k0_list:
        cfg = RiccatiConfig(p=p, a=a, q=q, K0=k0, K1=k1, M=m, T0=t0)
        g0 = k0 * (t0 + m) ** a
        s0 = a * k0 * (t0 + m) ** (a - 1.0)
        verdict = riccati_integrate(cfg, g0, s0, horizon=horizon, rtol=rtol)
        t_star = verdict.t_star if verdict.t_star is not None else float("nan")
        rows.append((k0, verdict.outcome, t_star, float("nan"), float("nan")))
    return rows


def _cmd_riccati(args) -> int:
    out = _out_dir(args)
    conf = _Conf(_parse_config_file(args.config), args.config)
    rows = _riccati_rows(conf)
    _write_csv(out, "riccati", ["parameter", "verdict", "t_star", "sigma", "ratio"], rows)
    result = {"runs": [{"K0": r[0], "outcome": r[1], "t_star": None if r[2] != r[2] else r[2]}
                       for r in rows]}
    _write_json(out, "riccati", "riccati", {**conf.resolved, "seed": args.seed}, result)
    print(f"riccati: {len(rows)} run(s)")
    return 0


def _parse_p_grid(spec: str) -> list[float]:
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ConfigurationError(f"p-grid wants start:stop:count, got {spec!r}")
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise ConfigurationError("p-grid count must be >= 1")
        return list(np.linspace(start, stop, count))
    return _float_list(spec)


def _cmd_blowup_scan(args) -> int:
    out = _out_dir(args)
    n = args.n
    p_grid = _parse_p_grid(args.p_grid)
    horizon = args.horizon
    rows = []
    for p in p_grid:
        sigma = growth_exponent(n, p)
        q = 1.5 * n * (p - 1.0)
        a = (q - 2.0) / (p - 1.0)  # forces the scaling constraint
        if a < 1.0:
            rows.append((p, "out_of_range", float("nan"), sigma, float("nan")))
            continue
        cfg = RiccatiConfig(p=p, a=a, q=q, K0=1.0, K1=1.0, M=1.0, T0=1.0)
        g0 = (1.0 + 1.0) ** a
        s0 = a * (1.0 + 1.0) ** (a - 1.0)
        verdict = riccati_integrate(cfg, g0, s0, horizon=horizon)
        t_star = verdict.t_star if verdict.t_star is not None else float("nan")
        try:
            threshold = c0_estimate(p, a, q, K1=1.0, M=1.0, T0=1.0, horizon=horizon)
        except Exception:
            threshold = float("nan")
        rows.append((p, verdict.outcome, t_star, sigma, threshold))
    _write_csv(out, "blowup-scan", ["parameter", "verdict", "t_star", "sigma", "ratio"], rows)
    resolved = {"n": n, "p_grid": p_grid, "horizon": horizon, "seed": args.seed}
    result = {"rows": len(rows)}
    _write_json(out, "blowup-scan", "blowup-scan", resolved, result)
    print(f"blowup-scan: {len(rows)} power(s)")
    return 0


def _cmd_strichartz(args) -> int:
    out = _out_dir(args)
    conf = _Conf(_parse_config_file(args.config), args.config)
    kind = conf.take("run.kind", str, "homogeneous")
    n = conf.take("grid.n", int, 2)
    L = conf.take("grid.L", float)
    n_list = conf.take("grid.N_list", _int_list)
    p = conf.take("indices.p", float)
    members = conf.take("ensemble.members", int, 40)
    horizon = conf.take("run.time_horizon", float, 8.0)
    n_time = conf.take("run.n_time", int, 17)
    idx = wellposedness_indices(p)
    grids = [GridSpec(n=n, L=L, N=nn) for nn in n_list]
    if kind == "homogeneous":
        conf.finish()
        report = empirical_homogeneous_ratio(members, idx, grids,
                                             time_horizon=horizon, n_time=n_time,
                                             seed=args.seed)
    elif kind == "inhomogeneous":
        q_tilde = conf.take("indices.q_tilde", float, idx.q)
        r_tilde = conf.take("indices.r_tilde", float, idx.r)
        conf.finish()
        report = empirical_inhomogeneous_ratio(members, idx.q, idx.r, q_tilde, r_tilde,
                                               grids, time_horizon=horizon,
                                               n_time=n_time, seed=args.seed)
    else:
        raise ConfigurationError(f"run.kind must be homogeneous or inhomogeneous, got {kind}")
    rows = zip(report.resolutions, report.maxima)
    _write_csv(out, "strichartz", ["resolution", "max_ratio"], rows)
    result = {"label": report.label, "maxima": list(report.maxima),
              "resolutions": list(report.resolutions)}
    _write_json(out, "strichartz", "strichartz", {**conf.resolved, "seed": args.seed}, result)
    print(f"strichartz: maxima {result['maxima']}")
    return 0


def _cmd_knapp(args) -> int:
    out = _out_dir(args)
    deltas = _float_list(args.deltas)
    report = knapp_experiment(deltas, args.q, args.r, n_t=args.n_t)
    rows = [(d, ratio, report.fitted_slope, report.theory_slope)
            for d, ratio in zip(report.deltas, report.ratios)]
    _write_csv(out, "knapp", ["delta", "ratio", "fitted_slope", "theory_slope"], rows)
    result = {"fitted_slope": report.fitted_slope, "theory_slope": report.theory_slope,
              "lower_c": report.lower_c}
    resolved = {"q": args.q, "r": args.r, "deltas": deltas, "n_t": args.n_t,
                "seed": args.seed}
    _write_json(out, "knapp", "knapp", resolved, result)
    print(f"knapp: fitted {report.fitted_slope:.4f} vs theory {report.theory_slope:.4f}")
    return 0


def _cmd_radon(args) -> int:
    out = _out_dir(args)
    if args.profile == "ball":
        profile = RadialProfile(radii=np.array([0.0, 1.0]), values=np.array([1.0, 1.0]))
        rho_max = args.rho_max if args.rho_max is not None else 1.0
    elif args.profile == "gaussian":
        rr = np.linspace(0.0, 8.0, 4001)
        profile = RadialProfile(radii=rr, values=np.exp(-rr**2))
        rho_max = args.rho_max if args.rho_max is not None else 3.0
    else:
        raise ConfigurationError(f"profile must be ball or gaussian, got {args.profile}")
    stations = np.linspace(0.0, rho_max, args.stations)
    values = radon_radial(profile, args.n, stations)
    _write_csv(out, "radon", ["rho", "value"], zip(stations, values))
    resolved = {"n": args.n, "profile": args.profile, "stations": args.stations,
                "rho_max": rho_max, "seed": args.seed}
    result = {"max_value": float(np.max(values))}
    _write_json(out, "radon", "radon", resolved, result)
    print(f"radon: {args.stations} stations written")
    return 0


# ---------------------------------------------------------------------------
# wiring

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tricomi-lab",
        description="Numerical experiments for the degenerate wave equation "
                    "d^2u/dt^2 - t Lap u = |u|^p.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="global RNG seed")
    common.add_argument("--out", default=".", help="output directory")
    sub = parser.add_subparsers(dest="command", required=True)

    pe = sub.add_parser("exponents", parents=[common],
                        help="critical/conformal powers and index tuples")
    pe.add_argument("--n", type=int, required=True)
    pe.add_argument("--p", type=float, default=None)
    pe.set_defaults(func=_cmd_exponents)

    ps = sub.add_parser("specfun-test", parents=[common],
                        help="special-function identity suite")
    ps.set_defaults(func=_cmd_specfun_test)

    for name, func, help_text in (
            ("propagate", _cmd_propagate, "linear propagation to one time"),
            ("simulate", _cmd_simulate, "semilinear run with blowup verdict"),
            ("riccati", _cmd_riccati, "comparison ODE runs"),
            ("strichartz", _cmd_strichartz, "empirical estimate ratios")):
        sp = sub.add_parser(name, parents=[common], help=help_text)
        sp.add_argument("--config", required=True)
        sp.set_defaults(func=func)

    pb = sub.add_parser("blowup-scan", parents=[common],
                        help="threshold scan over a power grid")
    pb.add_argument("--n", type=int, required=True)
    pb.add_argument("--p-grid", required=True,
                    help="start:stop:count or comma list")
    pb.add_argument("--horizon", type=float, default=100.0)
    pb.set_defaults(func=_cmd_blowup_scan)

    pk = sub.add_parser("knapp", parents=[common],
                        help="slab-concentration scaling fit")
    pk.add_argument("--q", type=float, required=True)
    pk.add_argument("--r", type=float, required=True)
    pk.add_argument("--deltas", default="0.125,0.0625,0.03125,0.015625,0.0078125")
    pk.add_argument("--n-t", type=int, default=14)
    pk.set_defaults(func=_cmd_knapp)

    pr = sub.add_parser("radon", parents=[common],
                        help="plane integrals of a built-in radial profile")
    pr.add_argument("--n", type=int, default=3)
    pr.add_argument("--profile", default="ball")
    pr.add_argument("--stations", type=int, default=100)
    pr.add_argument("--rho-max", type=float, default=None)
    pr.set_defaults(func=_cmd_radon)
    return parser


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except SystemExit as exc:
        code = exc.code if exc.code is not None else 0
        return 0 if code == 0 else 1
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except RuntimeError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
