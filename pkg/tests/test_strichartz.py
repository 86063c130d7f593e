"""Estimate bench: norms, dyadic bank, model operator, scaling checks."""

from __future__ import annotations

import mpmath as mp
import numpy as np
import pytest

from tricomi_lab.errors import (
    ConfigurationError,
    DomainError,
    MeanHandlingWarning,
)
from tricomi_lab.exponents import StrichartzIndices, wellposedness_indices
from tricomi_lab.grids import Field, GridSpec, inverse_transform, transform
from tricomi_lab.shapes import annulus_cutoff
from tricomi_lab.specfun import phi
from tricomi_lab.strichartz import (
    LittlewoodPaleyBank,
    MixedNormSpec,
    ModelAmplitude,
    angular_coefficients,
    angular_sobolev_check,
    apply_A,
    christ_kiselev_check,
    claim_integral,
    empirical_homogeneous_ratio,
    empirical_inhomogeneous_ratio,
    hdot_norm,
    kernel_bound_check,
    kernel_decay_fit,
    knapp_experiment,
    lp_project,
    mixed_norm,
    square_function_constants,
)


class TestMixedNorm:
    def test_indicator_closed_form(self):
        grid = GridSpec(n=2, L=4.0, N=64)
        ones = Field(grid=grid, values=np.ones(grid.shape))
        spec = MixedNormSpec(q=2.0, r=2.0, r_max=1.0,
                             time_nodes=np.linspace(0.0, 1.0, 33), n_r=256, n_theta=64)
        value = mixed_norm([ones] * 33, spec)
        assert value == pytest.approx(np.sqrt(2.0 * np.pi), rel=1e-6)

    def test_homogeneity(self):
        grid = GridSpec(n=2, L=4.0, N=32)
        f = Field(grid=grid, values=np.exp(-grid.radius() ** 2))
        spec = MixedNormSpec(q=3.0, r=2.5, r_max=3.0,
                             time_nodes=np.linspace(0.0, 1.0, 9), n_r=128, n_theta=32)
        base = mixed_norm([f] * 9, spec)
        scaled = mixed_norm([Field(grid=grid, values=-2.0 * f.values)] * 9, spec)
        assert scaled == pytest.approx(2.0 * base, rel=1e-12)

    def test_gaussian_against_quadrature_oracle(self):
        grid = GridSpec(n=2, L=4.0, N=256)
        f = Field(grid=grid, values=np.exp(-grid.radius() ** 2))
        spec = MixedNormSpec(q=np.inf, r=2.0, r_max=3.5,
                             time_nodes=np.array([0.0]), n_r=512, n_theta=64)
        oracle = float(mp.sqrt(mp.quad(lambda r: 2 * mp.pi * mp.e ** (-2 * r**2), [0, 3.5])))
        assert abs(mixed_norm([f], spec) - oracle) <= 1e-6

    def test_domination_monotonicity(self):
        grid = GridSpec(n=2, L=4.0, N=32)
        small = Field(grid=grid, values=np.exp(-grid.radius() ** 2))
        big = Field(grid=grid, values=np.exp(-0.5 * grid.radius() ** 2))
        spec = MixedNormSpec(q=2.0, r=3.0, r_max=3.0,
                             time_nodes=np.linspace(0.0, 1.0, 5), n_r=128, n_theta=32)
        assert mixed_norm([small] * 5, spec) <= mixed_norm([big] * 5, spec) + 1e-12

    def test_config_gates(self):
        with pytest.raises(ConfigurationError):
            MixedNormSpec(q=2.0, r=2.0, r_max=1.0, time_nodes=np.array([0.0, 1.0]),
                          n_r=64, n_theta=7)
        with pytest.raises(ConfigurationError):
            MixedNormSpec(q=2.0, r=2.0, r_max=1.0, time_nodes=np.array([0.0]),
                          n_r=64, n_theta=32)  # one node needs q = inf


class TestSobolevNorm:
    def test_parseval_at_zero_order(self, grid2d, rng):
        f = Field(grid=grid2d, values=rng.standard_normal(grid2d.shape))
        assert hdot_norm(f, 0.0) == pytest.approx(f.l2_norm(), rel=1e-12)

    def test_single_mode_scaling(self, grid2d):
        x, y = grid2d.coords()
        xi = 3.0 * np.pi / grid2d.L
        f = Field(grid=grid2d, values=np.cos(xi * x))
        vol = (2.0 * grid2d.L) ** 2
        for s in (0.5, 1.0, -0.5):
            expected = xi**s * np.sqrt(vol / 2.0)  # cosine splits into two modes
            assert hdot_norm(f, s) == pytest.approx(expected, rel=1e-10)

    def test_gradient_identity(self, grid2d):
        # band-limited data, so the trig interpolant's gradient is the
        # analytic one and the comparison is exact to rounding
        x, y = grid2d.coords()
        a, b = 3.0 * np.pi / grid2d.L, 5.0 * np.pi / grid2d.L
        f = Field(grid=grid2d, values=np.sin(a * x) * np.cos(b * y))
        gx = a * np.cos(a * x) * np.cos(b * y)
        gy = -b * np.sin(a * x) * np.sin(b * y)
        grad = np.sqrt(Field(grid=grid2d, values=gx).l2_norm() ** 2
                       + Field(grid=grid2d, values=gy).l2_norm() ** 2)
        assert hdot_norm(f, 1.0) == pytest.approx(grad, rel=1e-10)

    def test_negative_order_mean_warning(self, grid2d):
        f = Field(grid=grid2d, values=np.ones(grid2d.shape))
        with pytest.warns(MeanHandlingWarning):
            hdot_norm(f, -0.5)


class TestDyadicBank:
    def test_partition_of_unity(self):
        bank = LittlewoodPaleyBank(j_min=-10, j_max=10)
        tau = np.logspace(-10, 10, 4001, base=2.0)
        assert np.max(np.abs(bank.partition(tau) - 1.0)) <= 1e-12

    def test_project_extracts_matching_shell(self, grid2d):
        bank = LittlewoodPaleyBank(j_min=-2, j_max=3)
        k = grid2d.abs_freq()
        spec = np.where((k > 1.05) & (k < 1.9), 1.0, 0.0) * (1.0 + 0.0j)
        f = inverse_transform(spec, grid2d, real=False)
        energies = {j: lp_project(f, j, bank).l2_norm() for j in range(-2, 4)}
        assert energies[0] + energies[1] > 0.0
        for j in (-2, -1, 3):
            assert energies[j] <= 1e-12 * max(energies[0], energies[1])

    def test_projections_resum(self, grid2d, rng):
        bank = LittlewoodPaleyBank(j_min=-3, j_max=3)
        k = grid2d.abs_freq()
        mask = (k >= 2.0 ** -3) & (k <= 2.0**3)
        spec = np.zeros(grid2d.shape, dtype=complex)
        spec[mask] = rng.standard_normal(int(mask.sum()))
        f = inverse_transform(spec, grid2d, real=False)
        total = np.zeros(grid2d.shape, dtype=complex)
        for j in range(-3, 4):
            total += lp_project(f, j, bank).values
        assert np.max(np.abs(total - f.values)) <= 1e-8 * np.max(np.abs(f.values))

    def test_out_of_range_shell(self, grid2d):
        bank = LittlewoodPaleyBank(j_min=0, j_max=2)
        f = Field(grid=grid2d, values=np.zeros(grid2d.shape))
        with pytest.raises(DomainError):
            lp_project(f, 5, bank)

    def test_square_function_constants_bracket_one(self):
        bank = LittlewoodPaleyBank(j_min=-2, j_max=3)
        rep = square_function_constants(GridSpec(n=2, L=8.0, N=64), bank, ensemble=20)
        assert rep.c_upper > 0.0 and rep.c_lower > 0.0
        assert rep.c_upper >= 1.0 - 1e-12 or rep.c_lower >= 0.5  # measured, not proved


class TestModelOperator:
    def test_time_zero_reduces_to_annulus_weight(self, grid2d, rng):
        k = grid2d.abs_freq()
        spec = np.zeros(grid2d.shape, dtype=complex)
        band = (k > 0.3) & (k < 1.8)
        spec[band] = rng.standard_normal(int(band.sum()))
        f = inverse_transform(spec, grid2d, real=False)
        out = apply_A(f, 0.0, ModelAmplitude())
        expected = inverse_transform(spec * annulus_cutoff(k), grid2d, real=False)
        assert np.max(np.abs(out.values - expected.values)) <= 1e-12

    def test_single_mode_scalar_evaluation(self, grid2d):
        spec = np.zeros(grid2d.shape, dtype=complex)
        spec[2, 0] = 1.0
        f = inverse_transform(spec, grid2d, real=False)
        t = 1.3
        xi = 2.0 * np.pi / grid2d.L
        pred = np.exp(-1j * phi(t) * xi) * (1.0 + phi(t) * xi) ** (-1.0 / 6.0) \
            * annulus_cutoff(np.array([xi]))[0]
        got = transform(apply_A(f, t, ModelAmplitude()))[2, 0]
        assert abs(got - pred) <= 1e-13

    @staticmethod
    def _quarter_turn(values: np.ndarray) -> np.ndarray:
        # exact lattice rotation: point (x_i, x_j) -> (x_j, -x_i) with the
        # sign flip taken periodically (index i -> (-i) mod N)
        return np.roll(values.T[::-1, :], 1, axis=0)

    def test_commutes_with_exact_quarter_turn(self, grid2d, rng):
        f = Field(grid=grid2d, values=rng.standard_normal(grid2d.shape))
        out_then_rot = self._quarter_turn(apply_A(f, 1.0, ModelAmplitude()).values)
        rot_then_out = apply_A(
            Field(grid=grid2d, values=self._quarter_turn(f.values)),
            1.0, ModelAmplitude(),
        ).values
        scale = np.max(np.abs(out_then_rot))
        assert np.max(np.abs(out_then_rot - rot_then_out)) <= 1e-12 * scale

    def test_radial_multiplier_identity(self, grid2d):
        f = Field(grid=grid2d, values=np.exp(-0.5 * grid2d.radius() ** 2))
        out = apply_A(f, 1.0, ModelAmplitude())
        rot = self._quarter_turn(out.values)
        total = np.sum(np.abs(out.values) ** 2)
        assert np.sum(np.abs(rot - out.values) ** 2) <= 1e-20 * total
        spec_in = transform(f)
        spec_out = transform(out)
        k = grid2d.abs_freq()
        mult = np.exp(-1j * phi(1.0) * k) * (1.0 + phi(1.0) * k) ** (-1.0 / 6.0) \
            * annulus_cutoff(k)
        assert np.max(np.abs(spec_out - mult * spec_in)) <= 1e-10 * np.max(np.abs(spec_in))

    def test_negative_time_gate(self, grid2d):
        f = Field(grid=grid2d, values=np.zeros(grid2d.shape))
        with pytest.raises(DomainError):
            apply_A(f, -1.0, ModelAmplitude())


class TestAngularAnalysis:
    def test_radial_field_concentrates_at_zero_mode(self, grid2d):
        f = Field(grid=grid2d, values=np.exp(-0.5 * grid2d.radius() ** 2))
        ang = angular_coefficients(f)
        total = np.sum(np.abs(ang.coeffs) ** 2)
        off = total - np.sum(np.abs(ang.coeffs[ang.k == 0]) ** 2)
        assert off <= 1e-10 * total

    def test_first_angular_mode(self, grid2d):
        x, y = grid2d.coords()
        f = Field(grid=grid2d,
                  values=(x + 1j * y) * np.exp(-0.5 * grid2d.radius() ** 2))
        ang = angular_coefficients(f)
        total = np.sum(np.abs(ang.coeffs) ** 2)
        k1 = np.sum(np.abs(ang.coeffs[ang.k == 1]) ** 2)
        assert total - k1 <= 1e-10 * total

    def test_plancherel(self, grid2d):
        f = Field(grid=grid2d, values=np.exp(-0.5 * grid2d.radius() ** 2)
                  * (1.0 + 0.3 * np.cos(grid2d.coords()[0])))
        ang = angular_coefficients(f)
        assert ang.plancherel_rel_err <= 1e-8


class TestKernelBounds:
    def test_constant_integrand_at_center(self):
        rep0 = kernel_bound_check(1.0, 0.0, 2.0)
        # doubling the angular rule must not move a constant integrand
        rep1 = kernel_bound_check(1.0, 0.0, 2.0, n_theta=4096)
        assert rep0.integral == pytest.approx(rep1.integral, rel=1e-10)

    def test_far_field_decay_order(self):
        b_grid = np.linspace(16.0, 48.0, 9)
        fitted = kernel_decay_fit(1.0, 2.0, b_grid)
        assert fitted >= 3.0

    def test_claim_integral_stable_in_delta(self):
        v1 = claim_integral(1.5, 2.0, delta=0.1)
        v2 = claim_integral(1.5, 2.0, delta=0.05)
        assert np.isfinite(v1) and np.isfinite(v2)
        assert max(v1, v2) / min(v1, v2) <= 1.5


class TestKnapp:
    def test_theory_exponent_value(self):
        q, r = 7.5, 2.5
        assert 2.0 / 3.0 - 2.0 / (3.0 * q) - 1.0 / r == pytest.approx(0.17778, abs=1e-4)

    def test_needs_five_thicknesses(self):
        with pytest.raises(ConfigurationError):
            knapp_experiment([0.125, 0.0625, 0.03125], 7.5, 2.5)

    def test_geometric_sequence_gate(self):
        with pytest.raises(ConfigurationError):
            knapp_experiment([0.3, 0.2, 0.15, 0.1, 0.05], 7.5, 2.5)


class TestEmpiricalRatios:
    def test_homogeneous_small_ladder(self):
        grids = [GridSpec(n=2, L=16.0, N=32), GridSpec(n=2, L=16.0, N=64)]
        report = empirical_homogeneous_ratio(8, wellposedness_indices(2.25), grids)
        assert len(report.maxima) == 2
        assert all(m > 0.0 and np.isfinite(m) for m in report.maxima)
        assert max(report.maxima) / min(report.maxima) <= 2.0

    def test_unlocalized_member_rejected(self):
        grid = GridSpec(n=2, L=16.0, N=32)
        bad = Field(grid=grid, values=np.exp(-0.5 * grid.radius() ** 2))
        with pytest.raises(DomainError):
            empirical_homogeneous_ratio(1, wellposedness_indices(2.25), [grid], members=[bad])

    def test_inadmissible_indices_rejected(self):
        idx = StrichartzIndices(q=2.0, r=2.0, qt_prime=2.0, rt_prime=2.0,
                                s=0.0, case_tag="I")
        with pytest.raises(ConfigurationError):
            empirical_homogeneous_ratio(2, idx, [GridSpec(n=2, L=16.0, N=32)])

    def test_inhomogeneous_small_ladder_and_gate(self):
        idx = wellposedness_indices(2.5)
        grids = [GridSpec(n=2, L=16.0, N=32)]
        report = empirical_inhomogeneous_ratio(3, idx.q, idx.r, idx.q, idx.r, grids)
        assert report.maxima[0] > 0.0 and np.isfinite(report.maxima[0])
        with pytest.raises(ConfigurationError):
            empirical_inhomogeneous_ratio(3, idx.q, idx.r, idx.q + 0.1, idx.r, grids)

    def test_deterministic_given_seed(self):
        grids = [GridSpec(n=2, L=16.0, N=32)]
        idx = wellposedness_indices(2.25)
        a = empirical_homogeneous_ratio(4, idx, grids, seed=5)
        b = empirical_homogeneous_ratio(4, idx, grids, seed=5)
        assert a.maxima == b.maxima


class TestCausalTruncation:
    def test_diagonal_kernel_ratio_one(self):
        report = christ_kiselev_check(np.eye(32), 2.0, 4.0, n=32, ensemble=10)
        assert report.ratio == pytest.approx(1.0, abs=1e-12)

    def test_equal_exponents_rejected(self):
        with pytest.raises(ConfigurationError):
            christ_kiselev_check(np.eye(16), 2.0, 2.0, n=16)

    def test_random_smooth_kernels_bounded(self, rng):
        from scipy.ndimage import gaussian_filter
        worst = 0.0
        for _ in range(10):
            kernel = gaussian_filter(rng.standard_normal((32, 32)), 3.0)
            report = christ_kiselev_check(kernel, 2.0, 4.0, n=32, ensemble=10)
            worst = max(worst, report.ratio)
        assert 0.0 < worst <= 3.0


class TestAngularSobolev:
    def test_zero_input(self):
        report = angular_sobolev_check(np.zeros(128))
        assert report.sup_value == 0.0 and report.constant == 0.0

    def test_constant_input_normalization(self):
        report = angular_sobolev_check(np.full(128, 2.0))
        assert report.constant == pytest.approx(1.0 / np.sqrt(2.0 * np.pi), rel=1e-10)

    def test_pure_modes_closed_form(self):
        # 96 nodes put the sine maxima of all three modes on the grid
        theta = np.linspace(0.0, 2.0 * np.pi, 96, endpoint=False)
        for k in (1, 3, 8):
            report = angular_sobolev_check(np.sin(k * theta))
            expected = 1.0 / (np.sqrt(np.pi) * (1.0 + k))
            assert report.constant == pytest.approx(expected, rel=1e-10)

    def test_constant_stable_across_random_polynomials(self, rng):
        worst = []
        for n_theta in (128, 256):
            theta = np.linspace(0.0, 2.0 * np.pi, n_theta, endpoint=False)
            top = 0.0
            for _ in range(100):
                coeffs = rng.standard_normal(5)
                v = sum(c * np.cos((k + 1) * theta) for k, c in enumerate(coeffs))
                top = max(top, angular_sobolev_check(v).constant)
            worst.append(top)
        assert max(worst) / min(worst) <= 2.0
