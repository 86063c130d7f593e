"""Special-function kernel against series, RK, and closed-form oracles."""

from __future__ import annotations

import math

import numpy as np
import pytest

import oracles
from tricomi_lab.errors import DomainError
from tricomi_lab.specfun import (
    airy,
    bessel_j,
    gamma_beta_identities,
    hypergeom_F16,
    multiplier_arrays,
    phi,
    tricomi_multipliers,
)


class TestAiry:
    def test_values_at_zero(self):
        ai0, aip0, bi0, bip0 = oracles.airy_at_zero()
        pair = airy(0.0)
        assert pair.ai == pytest.approx(ai0, abs=1e-12)
        assert pair.ai_prime == pytest.approx(aip0, abs=1e-12)
        assert pair.bi == pytest.approx(bi0, abs=1e-12)
        assert pair.bi_prime == pytest.approx(bip0, abs=1e-12)

    def test_wronskian_is_one_over_pi(self):
        for x in np.linspace(-12.0, 12.0, 49):
            pair = airy(float(x))
            w = pair.ai * pair.bi_prime - pair.ai_prime * pair.bi
            assert w == pytest.approx(1.0 / math.pi, abs=1e-10)

    def test_against_rk_oracle_at_minus_five(self):
        ai_ref, bi_ref = oracles.rk_airy(-5.0)
        pair = airy(-5.0)
        assert pair.ai == pytest.approx(ai_ref, abs=1e-9)
        assert pair.bi == pytest.approx(bi_ref, abs=1e-9)

    def test_range_gate(self):
        with pytest.raises(DomainError):
            airy(40.5)
        with pytest.raises(DomainError):
            airy(-41.0)


class TestMultipliers:
    def test_rest_frequency_row(self):
        for t in (0.0, 0.4, 1.7, 3.0):
            m = tricomi_multipliers(t, 0.0)
            assert m.v1 == pytest.approx(1.0, abs=1e-14)
            assert m.v2 == pytest.approx(t, abs=1e-14)
            assert m.v1_dt == pytest.approx(0.0, abs=1e-14)
            assert m.v2_dt == pytest.approx(1.0, abs=1e-14)

    def test_initial_conditions(self):
        m = tricomi_multipliers(0.0, 3.7)
        assert (m.v1, m.v2, m.v1_dt, m.v2_dt) == pytest.approx((1.0, 0.0, 0.0, 1.0), abs=1e-13)

    def test_against_rk_oracle(self):
        v1_ref, v2_ref, v1t_ref, v2t_ref = (arr[0] for arr in oracles.rk_mode(2.0, [1.0]))
        m = tricomi_multipliers(1.0, 2.0)
        assert m.v1 == pytest.approx(v1_ref, abs=1e-8)
        assert m.v2 == pytest.approx(v2_ref, abs=1e-8)
        assert m.v1_dt == pytest.approx(v1t_ref, abs=1e-8)
        assert m.v2_dt == pytest.approx(v2t_ref, abs=1e-8)

    def test_wronskian_on_sample_grid(self):
        lam = np.linspace(0.0, 8.0, 33)
        for t in np.linspace(0.0, 5.0, 21):
            v1, v2, v1t, v2t = multiplier_arrays(float(t), lam)
            assert np.max(np.abs(v1 * v2t - v2 * v1t - 1.0)) <= 1e-9

    def test_confluent_route_cross_representation(self):
        # Airy-built v1 against the independent e^(-z/2)*Phi(1/6,1/3;z) series
        rng = np.random.default_rng(7)
        ts = rng.uniform(0.0, 5.0, 30)
        lams = rng.uniform(0.0, 8.0, 30)
        for t, lam in zip(ts, lams):
            ref = oracles.confluent_v1(float(t), float(lam))
            assert tricomi_multipliers(float(t), float(lam)).v1 == pytest.approx(ref, abs=1e-7)

    def test_phase_parameter(self):
        m = tricomi_multipliers(2.0, 1.5)
        assert m.z == pytest.approx(2j * phi(2.0) * 1.5, abs=1e-14)

    def test_decay_envelope_constant_stable(self):
        def fitted_c(n_pts: int) -> float:
            worst = 0.0
            for t in np.linspace(0.05, 5.0, n_pts):
                lam = np.linspace(0.0, 8.0, n_pts)
                v1 = multiplier_arrays(float(t), lam)[0]
                worst = max(worst, float(np.max(np.abs(v1) * (1.0 + phi(float(t)) * lam) ** (1.0 / 6.0))))
            return worst

        coarse, fine = fitted_c(20), fitted_c(40)
        assert fine <= 2.0 * coarse
        assert coarse <= 2.0 * fine

    def test_domain_gates(self):
        with pytest.raises(DomainError):
            tricomi_multipliers(-0.1, 1.0)
        with pytest.raises(DomainError):
            tricomi_multipliers(1.0, -2.0)


class TestHypergeometric:
    def test_normalization(self):
        assert hypergeom_F16(0.0) == pytest.approx(1.0, abs=1e-14)

    def test_against_series_oracle(self):
        for z in (0.1, 0.3, 0.5, 0.7, 0.85, 0.95):
            assert hypergeom_F16(z) == pytest.approx(oracles.series_F16(z), abs=1e-9)

    def test_gauss_limit(self):
        limit = oracles.gauss_F16_limit()
        z = 1.0 - np.logspace(-6, -2, 9)
        values = hypergeom_F16(z)
        # monotone approach from below toward Gamma(2/3)/Gamma(5/6)^2
        assert np.all(values < limit)
        assert np.all(np.diff(values) < 0.0)
        assert values[0] == pytest.approx(limit, abs=2e-3)

    def test_lower_bound_and_monotone(self):
        z = np.linspace(0.0, 1.0 - 1e-6, 1000)
        values = hypergeom_F16(z)
        assert np.min(values) >= 1.0 - 1e-12
        assert np.min(np.diff(values)) >= -1e-12

    def test_domain_gate(self):
        for bad in (-0.1, 1.0, 1.5):
            with pytest.raises(DomainError):
                hypergeom_F16(bad)


class TestBessel:
    def test_trivial_orders(self):
        assert bessel_j(0, 0.0) == pytest.approx(1.0, abs=1e-14)
        assert bessel_j(1, 0.0) == pytest.approx(0.0, abs=1e-14)

    def test_first_zero(self):
        assert abs(bessel_j(0, 2.404826)) <= 1e-5

    def test_against_mpmath(self):
        for k, y in ((0, 1.0), (1, 2.5), (5, 7.0), (17, 20.0), (-3, 4.0)):
            assert bessel_j(k, y) == pytest.approx(oracles.bessel_ref(k, y), abs=1e-9)

    def test_range_gates(self):
        with pytest.raises(DomainError):
            bessel_j(257, 1.0)
        with pytest.raises(DomainError):
            bessel_j(0, 2e4)


class TestGammaBeta:
    def test_identity_suite(self):
        report = gamma_beta_identities()
        assert report.passed
        assert report.beta_value == pytest.approx(2.0 * math.pi, abs=1e-10)
        assert report.gamma_ratio_error <= 1e-10
        assert report.two_pi_error <= 1e-10
        assert math.gamma(1.0) == 1.0
