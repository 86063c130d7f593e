"""Solver routes: Picard contraction, stepper accuracy, blowup verdicts."""

from __future__ import annotations

import numpy as np
import pytest

from tricomi_lab.errors import (
    ConfigurationError,
    DomainError,
    IterationDivergedError,
)
from tricomi_lab.exponents import wellposedness_indices
from tricomi_lab.grids import Field, GridSpec, inverse_transform
from tricomi_lab.nonlinear import (
    SimulationConfig,
    SimulationTrace,
    bump_data,
    detect_blowup,
    evolve,
    picard_iterate,
    power_source,
    trace_indices,
)
from tricomi_lab.propagator import homogeneous_solve


def zero_data(grid: GridSpec) -> tuple[Field, Field]:
    z = np.zeros(grid.shape)
    return Field(grid=grid, values=z), Field(grid=grid, values=z.copy())


class TestConfig:
    def test_validation_gates(self, grid2d):
        good = dict(p=2.5, grid=grid2d, dt=0.1, T=1.0)
        SimulationConfig(**good)
        for bad in (
            dict(good, p=1.0),
            dict(good, dt=0.0),
            dict(good, T=-1.0),
            dict(good, blowup_threshold=0.0),
            dict(good, method="euler"),
        ):
            with pytest.raises(ConfigurationError):
                SimulationConfig(**bad)

    def test_time_grid_endpoints(self, grid2d):
        cfg = SimulationConfig(p=2.5, grid=grid2d, dt=0.25, T=1.0)
        tg = cfg.time_grid()
        assert tg[0] == 0.0 and tg[-1] == 1.0 and tg.size == 5

    def test_threshold_must_clear_data(self, grid2d):
        f, g = bump_data(grid2d, 5.0)
        cfg = SimulationConfig(p=2.5, grid=grid2d, dt=0.1, T=1.0,
                               blowup_threshold=4.0)
        with pytest.raises(ConfigurationError):
            evolve(f, g, cfg)


class TestDataAndSource:
    def test_bump_profile(self, grid2d):
        f, g = bump_data(grid2d, 2.0, width=1.5, velocity_scale=0.5)
        assert f.sup_norm() == pytest.approx(2.0)
        assert np.all(f.values > 0.0)
        assert np.allclose(g.values, 0.5 * f.values)
        with pytest.raises(ConfigurationError):
            bump_data(grid2d, 1.0, width=0.0)

    def test_power_source_values(self):
        u = np.array([0.0, -2.0, 0.5])
        s = power_source(u, 2.5)
        assert s[0] == 0.0  # exact zero survives the log floor
        assert s[1] == pytest.approx(2.0**2.5, rel=1e-14)
        assert s[2] == pytest.approx(0.5**2.5, rel=1e-14)
        assert np.all(power_source(np.array([-1.0, 3.0]), 1.8) >= 0.0)
        assert power_source(u, 2.0, coeff=0.25)[1] == pytest.approx(1.0)

    def test_dealiasing_keeps_source_integral_nonnegative(self):
        # spectral truncation of a resolved source must not manufacture
        # negative mass; at this resolution the tail sits below rounding
        grid = GridSpec(n=2, L=8.0, N=128)
        f, _ = bump_data(grid, 1.0, width=2.0)
        s = power_source(f.values, 2.5)
        sd = inverse_transform(np.fft.fftn(s) * grid.dealias_mask(), grid).values
        neg = -float(np.sum(sd[sd < 0.0]))
        assert neg <= 1e-12 * float(np.sum(s))


class TestTraceIndices:
    def test_matches_case_selection_inside_range(self):
        for p in (2.25, 2.5, 3.0):
            got = trace_indices(p)
            want = wellposedness_indices(p)
            assert got == want

    def test_extension_keeps_scaling_relation(self):
        for p in (3.5, 4.0, 4.8):
            idx = trace_indices(p)
            assert idx is not None and idx.case_tag == "III"
            assert 1.0 / idx.q + 3.0 / idx.r == pytest.approx(2.0 / (p - 1.0), rel=1e-12)
            assert 1.0 / idx.q <= 1.0 - 1.5 / idx.r + 1e-12

    def test_none_outside(self):
        assert trace_indices(1.8) is None
        assert trace_indices(5.0) is None
        assert trace_indices(6.0) is None


class TestPicard:
    def test_zero_data_stays_zero(self, grid2d):
        f, g = zero_data(grid2d)
        cfg = SimulationConfig(p=3.0, grid=grid2d, dt=0.2, T=1.0, method="picard")
        iterates, diag = picard_iterate(f, g, cfg, 3)
        for u in iterates:
            assert u.sup_norm() == 0.0
        assert all(a < 1e-10 for a in diag.a_diffs)

    def test_small_data_contracts_immediately(self, grid2d):
        f, g = bump_data(grid2d, 1e-3)
        cfg = SimulationConfig(p=4.0, grid=grid2d, dt=0.1, T=2.0, method="picard")
        iterates, diag = picard_iterate(f, g, cfg, 6)
        # first correction is already below the early-stop level, so the run
        # ends after one Duhamel application
        assert len(diag.a_diffs) == 1
        assert diag.a_diffs[0] < 1e-10
        assert len(iterates) == 2
        assert diag.indices is not None and diag.indices.case_tag == "III"

    def test_moderate_data_ratio_below_half(self, grid2d):
        f, g = bump_data(grid2d, 0.1)
        cfg = SimulationConfig(p=3.0, grid=grid2d, dt=0.1, T=2.0, method="picard")
        _, diag = picard_iterate(f, g, cfg, 6)
        assert len(diag.a_diffs) >= 3
        for a, b in zip(diag.a_diffs, diag.a_diffs[1:]):
            assert b / a <= 0.5
        assert all(np.isfinite(m) for m in diag.m_bounds)

    def test_disabled_source_fixes_the_linear_flow(self, grid2d):
        f, g = bump_data(grid2d, 1.0)
        cfg = SimulationConfig(p=3.0, grid=grid2d, dt=0.2, T=1.0, method="picard",
                               source_coeff=0.0)
        iterates, _ = picard_iterate(f, g, cfg, 2)
        d01 = np.max(np.abs(iterates[1].values - iterates[0].values))
        assert d01 <= 1e-14 * max(iterates[0].sup_norm(), 1.0)

    def test_gates(self, grid2d):
        f, g = bump_data(grid2d, 1.0)
        stepper = SimulationConfig(p=3.0, grid=grid2d, dt=0.2, T=1.0)
        with pytest.raises(ConfigurationError):
            picard_iterate(f, g, stepper, 2)
        picard = SimulationConfig(p=3.0, grid=grid2d, dt=0.2, T=1.0, method="picard")
        with pytest.raises(ConfigurationError):
            picard_iterate(f, g, picard, 0)
        other = GridSpec(n=2, L=8.0, N=16)
        fo, go = bump_data(other, 1.0)
        with pytest.raises(DomainError):
            picard_iterate(fo, go, picard, 2)

    def test_divergence_reports_last_finite_iterate(self, grid2d):
        f, g = bump_data(grid2d, 50.0)
        cfg = SimulationConfig(p=3.0, grid=grid2d, dt=0.1, T=2.0, method="picard",
                               blowup_threshold=1e308)
        with np.errstate(over="ignore", invalid="ignore"):
            with pytest.raises(IterationDivergedError) as err:
                picard_iterate(f, g, cfg, 6)
        assert err.value.last_finite >= 0


class TestStepper:
    def test_zero_data_zero_trace(self, grid2d):
        f, g = zero_data(grid2d)
        cfg = SimulationConfig(p=2.5, grid=grid2d, dt=0.1, T=1.0)
        trace = evolve(f, g, cfg)
        assert not trace.blew_up
        assert np.all(trace.sup_norms == 0.0)
        assert np.all(trace.g_values == 0.0)
        assert np.all(np.diff(trace.times) > 0.0)

    def test_source_off_matches_one_shot_propagator(self, grid2d):
        f, g = bump_data(grid2d, 1.0)
        cfg = SimulationConfig(p=2.5, grid=grid2d, dt=0.1, T=2.0, source_coeff=0.0)
        trace = evolve(f, g, cfg)
        u_ref, v_ref = homogeneous_solve(f, g, 2.0, return_velocity=True)
        assert np.max(np.abs(trace.final_u.values - u_ref.values)) <= 1e-12
        assert np.max(np.abs(trace.final_v.values - v_ref.values)) <= 1e-12

    def test_agrees_with_picard_on_small_data(self, grid2d):
        f, g = bump_data(grid2d, 1e-3)
        kw = dict(p=4.0, grid=grid2d, dt=0.05, T=2.0)
        iterates, _ = picard_iterate(f, g, SimulationConfig(method="picard", **kw), 6)
        trace = evolve(f, g, SimulationConfig(**kw))
        assert np.max(np.abs(trace.final_u.values - iterates[-1].values)) <= 1e-3

    def test_manufactured_solution_second_order(self):
        # dealiasing off so the imposed forcing and the solver evaluate the
        # power source identically; the exact solution is cos(t) times a bump
        grid = GridSpec(n=2, L=8.0, N=32)
        r2 = grid.radius() ** 2
        w = np.exp(-0.5 * r2)
        p = 2.5

        def forcing(tau):
            a = np.cos(tau)
            return -a * w - tau * a * (r2 - 2.0) * w - np.abs(a * w) ** p

        f = Field(grid=grid, values=w)
        g = Field(grid=grid, values=np.zeros(grid.shape))
        dts = (0.2, 0.1, 0.05, 0.025)
        errs = []
        for dt in dts:
            cfg = SimulationConfig(p=p, grid=grid, dt=dt, T=1.0, dealias=False,
                                   extra_forcing=forcing)
            trace = evolve(f, g, cfg)
            errs.append(np.max(np.abs(trace.final_u.values - np.cos(1.0) * w)))
        slope = np.polyfit(np.log(dts), np.log(errs), 1)[0]
        assert slope == pytest.approx(2.0, abs=0.3)

    def test_snapshots_recorded_at_step_times(self, grid2d):
        f, g = bump_data(grid2d, 1.0)
        cfg = SimulationConfig(p=2.5, grid=grid2d, dt=0.1, T=1.0)
        trace = evolve(f, g, cfg, snapshot_times=[0.0, 0.35, 1.0])
        taken = [t for t, _ in trace.snapshots]
        assert taken == pytest.approx([0.0, 0.4, 1.0])
        for t, snap in trace.snapshots:
            assert snap.grid == grid2d and np.all(np.isfinite(snap.values))

    def test_method_gate(self, grid2d):
        f, g = bump_data(grid2d, 1.0)
        cfg = SimulationConfig(p=2.5, grid=grid2d, dt=0.1, T=1.0, method="picard")
        with pytest.raises(ConfigurationError):
            evolve(f, g, cfg)

    def test_threshold_crossing_truncates(self):
        grid = GridSpec(n=2, L=16.0, N=32)
        f, g = bump_data(grid, 5.0)
        cfg = SimulationConfig(p=1.8, grid=grid, dt=0.02, T=3.0)
        trace = evolve(f, g, cfg)
        assert trace.blew_up
        assert trace.t_blowup == pytest.approx(1.8, abs=0.3)
        assert trace.times[-1] == trace.t_blowup < cfg.T
        assert trace.sup_norms[-1] > cfg.blowup_threshold
        assert trace.mixed_value is None  # p below every index case


class TestVerdicts:
    def test_flat_zero_survives(self, grid2d):
        f, g = zero_data(grid2d)
        cfg = SimulationConfig(p=2.5, grid=grid2d, dt=0.2, T=1.0)
        verdict = detect_blowup(evolve(f, g, cfg), cfg)
        assert verdict.outcome == "survived" and verdict.horizon == 1.0

    def test_subcritical_bump_blows_up(self):
        grid = GridSpec(n=2, L=16.0, N=32)
        f, g = bump_data(grid, 5.0)
        cfg = SimulationConfig(p=1.8, grid=grid, dt=0.02, T=3.0)
        trace = evolve(f, g, cfg)
        verdict = detect_blowup(trace, cfg)
        assert verdict.outcome == "blew_up"
        assert verdict.t_star == trace.t_blowup

    def test_small_data_survives(self, grid2d):
        f, g = bump_data(grid2d, 1e-3)
        cfg = SimulationConfig(p=4.0, grid=grid2d, dt=0.05, T=5.0)
        trace = evolve(f, g, cfg)
        verdict = detect_blowup(trace, cfg)
        assert verdict.outcome == "survived"
        assert np.max(trace.sup_norms) <= 10.0 * trace.sup_norms[0]

    def test_source_removal_never_shortens_survival(self):
        # positive data that blows up keeps running to the horizon once the
        # nonlinearity is turned off
        grid = GridSpec(n=2, L=16.0, N=32)
        f, g = bump_data(grid, 5.0)
        with_src = SimulationConfig(p=1.8, grid=grid, dt=0.02, T=3.0)
        without = SimulationConfig(p=1.8, grid=grid, dt=0.02, T=3.0, source_coeff=0.0)
        assert evolve(f, g, with_src).blew_up
        linear = evolve(f, g, without)
        assert not linear.blew_up
        assert linear.times[-1] == pytest.approx(3.0)

    def test_unconfirmed_crossing_is_inconclusive(self, grid2d):
        f, g = zero_data(grid2d)
        cfg = SimulationConfig(p=2.5, grid=grid2d, dt=0.2, T=1.0)
        trace = evolve(f, g, cfg)
        trace.blew_up = True  # forge a crossing the dt/2 rerun cannot reproduce
        verdict = detect_blowup(trace, cfg)
        assert verdict.outcome == "inconclusive"
        assert "not reproduced" in verdict.reason

    def test_crossing_without_stored_data_is_inconclusive(self):
        grid = GridSpec(n=2, L=16.0, N=32)
        f, g = bump_data(grid, 5.0)
        cfg = SimulationConfig(p=1.8, grid=grid, dt=0.02, T=3.0)
        trace = evolve(f, g, cfg)
        trace.f = None
        verdict = detect_blowup(trace, cfg)
        assert verdict.outcome == "inconclusive"
        assert "no stored data" in verdict.reason

    def test_short_trace_is_inconclusive(self, grid2d):
        f, g = bump_data(grid2d, 1e-3)
        cfg = SimulationConfig(p=4.0, grid=grid2d, dt=0.1, T=1.0)
        trace = evolve(f, g, cfg)
        longer = SimulationConfig(p=4.0, grid=grid2d, dt=0.1, T=4.0)
        verdict = detect_blowup(trace, longer)
        assert verdict.outcome == "inconclusive"
        assert "before the horizon" in verdict.reason

    def _bare_trace(self, times, sups):
        return SimulationTrace(
            times=np.asarray(times), sup_norms=np.asarray(sups),
            g_values=np.zeros(len(times)), lp_norms=np.zeros(len(times)),
            mixed_times=np.array([]), mixed_inner=np.array([]),
            mixed_value=None, blew_up=False, t_blowup=None,
        )

    def test_rounding_growth_from_zero_is_inconclusive(self, grid2d):
        cfg = SimulationConfig(p=2.5, grid=grid2d, dt=0.5, T=1.0)
        verdict = detect_blowup(self._bare_trace([0.0, 1.0], [0.0, 1e-13]), cfg)
        assert verdict.outcome == "inconclusive"
        assert "rounding noise" in verdict.reason

    def test_large_growth_without_crossing_is_inconclusive(self, grid2d):
        cfg = SimulationConfig(p=2.5, grid=grid2d, dt=0.5, T=1.0)
        verdict = detect_blowup(self._bare_trace([0.0, 1.0], [1.0, 100.0]), cfg)
        assert verdict.outcome == "inconclusive"
        assert "without crossing" in verdict.reason
