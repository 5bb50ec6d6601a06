import logging
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import oscillator_entropy_series
from thermobound import oscillator as osc
from thermobound.errors import NumericalDegeneracyError, TruncationError, ValidationError
from thermobound.ode import solve_classical
from thermobound.profiles import FrequencyProfile

SQRT_T = FrequencyProfile.sqrt_linear(1.0, 1.0, offset=0.0)
PAUL = FrequencyProfile.paul_trap()
CONST = FrequencyProfile.constant(1.0)
pos = st.floats(0.05, 20)


@pytest.fixture(scope="module")
def sqrt_sol():
    return solve_classical(SQRT_T, 50.0)


@pytest.fixture(scope="module")
def paul_sol():
    return solve_classical(PAUL, 50.0)


@pytest.fixture(scope="module")
def const_sol():
    return solve_classical(CONST, 20.0)


def _pairs(seed, lo, hi, n=25):
    rng = np.random.default_rng(seed)
    return [(rng.uniform(lo, hi), rng.uniform(lo, hi), math.exp(rng.uniform(math.log(0.2), math.log(20))))
            for _ in range(n)]


class TestSU11:
    @pytest.mark.parametrize("t", [0.0, 1.0, 7.3])
    def test_stationary(self, const_sol, t):
        c = osc.su11_coefficients(const_sol, CONST, t, t)
        assert abs(c.alpha) < 1e-10 and c.gamma == pytest.approx(2.0, abs=1e-10)

    @pytest.mark.parametrize("tp", [0.5, 4.0, 9.0])
    def test_initial_time(self, sqrt_sol, tp):
        c = osc.su11_coefficients(sqrt_sol, None, 0.0, tp)
        assert c.alpha == pytest.approx(0.5 * (-1 + tp), abs=1e-15)
        assert c.gamma == pytest.approx(1 + tp, abs=1e-15)

    def test_casimir_identity_paul(self, paul_sol):
        rng = np.random.default_rng(7)
        for t, tp in rng.uniform(0, 50, size=(50, 2)):
            c = osc.su11_coefficients(paul_sol, None, t, tp)
            wp = PAUL.omega(tp)
            assert abs(c.casimir_gap(wp)) < 1e-8 * max(1.0, c.gamma ** 2)

    def test_range_check(self, sqrt_sol):
        with pytest.raises(ValidationError):
            osc.su11_coefficients(sqrt_sol, None, 1.0, 60.0)


class TestSingleOscillator:
    def test_ground_state_entropy(self):
        assert osc.entropy_oscillator(10.0, 0.1) < 1e-40

    @pytest.mark.parametrize("w,T", [(1.0, 1.0), (0.3, 2.0), (2.0, 0.5)])
    def test_geometric_series_oracle(self, w, T):
        assert osc.entropy_oscillator(w, T) == pytest.approx(oscillator_entropy_series(w, T), abs=1e-13)

    def test_occupation(self):
        assert osc.occupation(1.0, 1.0) == pytest.approx(1 / (math.e - 1), rel=1e-15)
        assert osc.occupation(1000.0, 1.0) == math.exp(-1000.0)

    def test_partition_and_energy(self):
        assert osc.partition_function_closed(1.0, 1.0) == pytest.approx(0.5 / math.sinh(0.5), rel=1e-15)
        assert osc.thermal_energy(2.0, 1.0) == pytest.approx(1 / math.tanh(1.0), rel=1e-15)

    @pytest.mark.parametrize("args", [(0.0, 1.0), (-1.0, 1.0), (1.0, 0.0), (math.nan, 1.0)])
    def test_validation(self, args):
        with pytest.raises(ValidationError):
            osc.entropy_oscillator(*args)

    def test_coth_singular(self):
        with pytest.raises(ValidationError):
            osc.coth(0.0)


class TestPhysical:
    def test_equal_time(self):
        assert osc.cross_mean_frequencies(1, 1, 1) == pytest.approx(0.5 / math.tanh(0.5), rel=1e-15)

    def test_direct_formula(self):
        assert osc.cross_mean_frequencies(1, 2, 1) == pytest.approx(5 / 8 / math.tanh(1.0), rel=1e-15)

    def test_fock_point(self):
        w, wp = math.sqrt(3), math.sqrt(2)
        _, fock = osc.fock_oracle_frequencies(w, wp, 2.5, N=400)
        assert abs(fock - osc.cross_mean_frequencies(w, wp, 2.5)) < 1e-6

    def test_profile_wrapper(self):
        assert osc.cross_mean_physical(SQRT_T, 3.0, 2.0, 2.5) == osc.cross_mean_frequencies(math.sqrt(3), math.sqrt(2), 2.5)

    def test_equal_state_all_zero(self):
        r = osc.delta_s_bounds_physical(SQRT_T, 4.0, 4.0, 3.0, 3.0)
        assert max(abs(r.lower), abs(r.upper), abs(r.exact)) < 1e-14

    @given(pos, pos, pos, pos)
    def test_sandwich(self, w, wp, T1, T2):
        assert osc.delta_s_bounds_frequencies(w, wp, T1, T2).holds()

    def test_bounds_match_generic_form(self):
        # lower = (E2 - Tr(rho1 H2))/T2, upper = (Tr(rho2 H1) - E1)/T1
        w, wp, T1, T2 = 1.3, 0.7, 2.0, 0.9
        r = osc.delta_s_bounds_frequencies(w, wp, T1, T2)
        E1, E2 = osc.thermal_energy(w, T1), osc.thermal_energy(wp, T2)
        assert r.lower == pytest.approx((E2 - osc.cross_mean_frequencies(wp, w, T1)) / T2, rel=1e-14)
        assert r.upper == pytest.approx((osc.cross_mean_frequencies(w, wp, T2) - E1) / T1, rel=1e-14)

    def test_zero_frequency_rejected(self):
        with pytest.raises(ValidationError):
            osc.cross_mean_physical(SQRT_T, 0.0, 1.0, 1.0)


class TestGaussianRoute:
    @pytest.mark.parametrize("T", [0.5, 1.0, 10.0])
    def test_stationary_coefficients(self, const_sol, T):
        a = osc.gaussian_coefficients(const_sol, None, 2.0, 2.0, T)
        assert abs(a.Aplus) < 1e-10
        assert a.A0 == pytest.approx(math.exp(-2 / T), rel=1e-9)
        assert a.Aminus == a.Aplus.conjugate()

    def test_high_temperature_limit(self, sqrt_sol):
        a = osc.gaussian_coefficients(sqrt_sol, None, 2.0, 5.0, 1e7)
        assert a.A0 == pytest.approx(1.0, abs=1e-5) and abs(a.Aplus) < 1e-5

    def test_denominator_positive_paul(self, paul_sol):
        for t, tp, T in _pairs(3, 0, 4 * math.pi, 50):
            assert osc.gaussian_coefficients(paul_sol, None, t, tp, T).denominator > 0

    @pytest.mark.parametrize("T,ref", [(1.0, 0.5 / math.sinh(0.5)), (10.0, 0.5 / math.sinh(0.05))])
    def test_partition_function_stationary(self, const_sol, T, ref):
        Z = osc.partition_function_gaussian(osc.gaussian_coefficients(const_sol, None, 3.0, 3.0, T))
        assert Z == pytest.approx(ref, abs=1e-10)

    @pytest.mark.parametrize("profile,window", [(SQRT_T, (0.1, 10)), (PAUL, (0, 4 * math.pi))])
    def test_partition_function_two_paths(self, sqrt_sol, paul_sol, profile, window):
        sol = sqrt_sol if profile is SQRT_T else paul_sol
        for t, tp, T in _pairs(11, *window):
            Z = osc.partition_function_gaussian(osc.gaussian_coefficients(sol, None, t, tp, T))
            assert abs(Z - osc.partition_function_closed(profile.omega(tp), T)) < 1e-9

    def test_k_means_stationary(self, const_sol):
        T = 1.7
        k0, kp, km = osc.k_operator_means(osc.gaussian_coefficients(const_sol, None, 1.0, 1.0, T))
        assert abs(kp) < 1e-10 and abs(km) < 1e-10
        assert k0 == pytest.approx(0.25 / math.tanh(1 / (2 * T)), rel=1e-9)

    def test_k0_high_temperature_ratio(self, const_sol):
        for T in (1e2, 1e3):
            k0, _, _ = osc.k_operator_means(osc.gaussian_coefficients(const_sol, None, 1.0, 1.0, T))
            # coth x = 1/x + x/3 + ..., so <K0> = T/2w + w/24T + ...
            assert k0 / (T / 2.0) == pytest.approx(1 + 1 / (12 * T * T), rel=1e-9)

    def test_k_means_general_closed_form(self, sqrt_sol):
        a = osc.gaussian_coefficients(sqrt_sol, None, 2.0, 6.0, 1.5)
        k0, kp, km = osc.k_operator_means(a)
        C = 1 / math.tanh(a.omega_tp / (2 * a.T))
        assert k0 == pytest.approx(a.gamma * C / (8 * a.omega_tp), rel=1e-9)
        assert km == pytest.approx(-a.alpha.conjugate() * C / (4 * a.omega_tp), rel=1e-9)
        assert kp == km.conjugate()

    @pytest.mark.parametrize("profile,window", [(SQRT_T, (0.1, 10)), (PAUL, (0, 4 * math.pi))])
    def test_recombination(self, sqrt_sol, paul_sol, profile, window):
        sol = sqrt_sol if profile is SQRT_T else paul_sol
        for t, tp, T in _pairs(5, *window):
            rec = osc.recombined_cross_mean(sol, None, t, tp, T)
            ref = osc.cross_mean_physical(profile, t, tp, T)
            assert abs(rec - ref) < 1e-8

    def test_recombination_with_tprime_coefficients_gives_energy(self, sqrt_sol):
        t, tp, T = 3.0, 6.0, 2.0
        means = osc.k_operator_means(osc.gaussian_coefficients(sqrt_sol, None, t, tp, T))
        e = osc.recombine(osc.su11_coefficients(sqrt_sol, None, t, tp), means)
        assert e == pytest.approx(osc.thermal_energy(SQRT_T.omega(tp), T), abs=1e-8)

    def test_near_degenerate_falls_back(self, caplog):
        c = osc.GaussianCoefficients(A0=0.81, Aplus=complex(0.1 - 1e-14, 0), alpha=0.3 + 0.1j,
                                     gamma=2.5, omega_tp=1.0, T=2.0)
        assert 0 < c.denominator < osc.DEGENERACY_FLOOR
        with caplog.at_level(logging.WARNING, logger="thermobound.oscillator"):
            Z = osc.partition_function_gaussian(c)
            k0, _, _ = osc.k_operator_means(c)
        assert Z == osc.partition_function_closed(1.0, 2.0)
        assert k0 == pytest.approx(2.5 / math.tanh(0.25) / 8, rel=1e-15)
        assert "closed form" in caplog.text

    def test_non_positive_denominator_raises(self):
        c = osc.GaussianCoefficients(A0=0.81, Aplus=0.2 + 0j, alpha=0j, gamma=2.0, omega_tp=1.0, T=1.0)
        with pytest.raises(NumericalDegeneracyError):
            osc.partition_function_gaussian(c)
        with pytest.raises(NumericalDegeneracyError):
            osc.GaussianCoefficients(A0=0.0, Aplus=0j, alpha=0j, gamma=2.0, omega_tp=1.0, T=1.0)

    def test_low_temperature(self, sqrt_sol):
        a = osc.gaussian_coefficients(sqrt_sol, None, 2.0, 5.0, 0.05)
        assert a.A0 > 0 and math.isfinite(abs(a.Aplus))
        # A0 ~ exp(-2 w'/T) underflows; reported rather than returned as zero
        with pytest.raises(NumericalDegeneracyError):
            osc.gaussian_coefficients(sqrt_sol, None, 2.0, 5.0, 1e-3)


class TestInvariant:
    def test_equal_times_give_two(self, sqrt_sol, paul_sol):
        for sol in (sqrt_sol, paul_sol):
            for t in np.linspace(0, 50, 40):
                assert abs(osc.f_factor(sol, t, t) - 2.0) < 1e-9

    def test_stationary_is_two(self, const_sol):
        for t, tp in np.random.default_rng(2).uniform(0, 20, size=(20, 2)):
            assert osc.f_factor(const_sol, t, tp) == pytest.approx(2.0, abs=1e-9)

    def test_symmetry(self, sqrt_sol):
        assert abs(osc.f_factor(sqrt_sol, 2, 5) - osc.f_factor(sqrt_sol, 5, 2)) < 1e-10

    def test_matches_expanded_form(self, sqrt_sol):
        e, d = sqrt_sol(2.0)
        ep, dp = sqrt_sol(5.0)
        ref = (abs(e) ** 2 * abs(dp) ** 2 + abs(d) ** 2 * abs(ep) ** 2
               - 2 * (e * d.conjugate()).real * (ep * dp.conjugate()).real)
        assert osc.f_factor(sqrt_sol, 2.0, 5.0) == pytest.approx(ref, rel=1e-12)

    def test_f_at_least_two(self, paul_sol):
        # Cauchy-Schwarz on the two Wronskian-like terms
        for t, tp in np.random.default_rng(4).uniform(0, 50, size=(50, 2)):
            assert osc.f_factor(paul_sol, t, tp) >= 2.0 - 1e-9

    def test_cross_mean_equal_time(self, sqrt_sol):
        assert osc.cross_mean_invariant(sqrt_sol, None, 4.0, 4.0, 3.0) == pytest.approx(osc.thermal_energy(2.0, 3.0), rel=1e-9)

    @pytest.mark.parametrize("T", [0.5, 3.0])
    def test_cross_mean_stationary(self, const_sol, T):
        assert osc.cross_mean_invariant(const_sol, None, 1.0, 7.0, T) == pytest.approx(0.5 / math.tanh(0.5 / T), rel=1e-9)

    def test_swap(self, sqrt_sol):
        T = 10.0
        swapped = osc.cross_mean_invariant(sqrt_sol, None, 10.0, 5.0, T)
        ref = SQRT_T.omega(10.0) / 4 / math.tanh(SQRT_T.omega(5.0) / (2 * T)) * osc.f_factor(sqrt_sol, 5.0, 10.0)
        assert abs(swapped - ref) < 1e-10

    def test_bounds_equal_state(self, sqrt_sol):
        r = osc.delta_s_bounds_invariant(sqrt_sol, None, 3.0, 3.0, 2.0, 2.0)
        assert max(abs(r.lower), abs(r.upper), abs(r.exact)) < 1e-9

    def test_invariant_time_grid(self, sqrt_sol):
        for t in np.linspace(1, 10, 15):
            for tp in np.linspace(1, 10, 15):
                assert osc.delta_s_bounds_invariant(sqrt_sol, None, t, tp, 10, 10).holds()

    def test_invariant_temperature_grid(self, sqrt_sol):
        exact = []
        for T1 in np.linspace(5, 20, 12):
            for T2 in np.linspace(5, 20, 12):
                r = osc.delta_s_bounds_invariant(sqrt_sol, None, 5, 10, T1, T2)
                assert r.holds()
                exact.append(r.exact)
        assert np.all(np.isfinite(exact))

    def test_bounds_use_cross_means(self, paul_sol):
        t, tp, T1, T2 = 1.0, 3.0, 2.0, 4.0
        r = osc.delta_s_bounds_invariant(paul_sol, None, t, tp, T1, T2)
        w, wp = PAUL.omega(t), PAUL.omega(tp)
        # Tr(rho(t) Hhat(t')) with roles swapped
        h2_in_1 = 0.25 * wp / math.tanh(w / (2 * T1)) * osc.f_factor(paul_sol, t, tp)
        assert r.lower == pytest.approx((osc.thermal_energy(wp, T2) - h2_in_1) / T2, rel=1e-12)
        h1_in_2 = osc.cross_mean_invariant(paul_sol, None, t, tp, T2)
        assert r.upper == pytest.approx((h1_in_2 - osc.thermal_energy(w, T1)) / T1, rel=1e-12)


class TestFockOracle:
    def test_static_partition_function(self):
        Z, _ = osc.fock_oracle_frequencies(1.0, 1.0, 1.0, N=200)
        assert abs(Z - 0.5 / math.sinh(0.5)) < 1e-8

    def test_convergence_in_n(self):
        a = osc.fock_oracle_frequencies(1.0, 1.0, 5.0, N=100)
        b = osc.fock_oracle_frequencies(1.0, 1.0, 5.0, N=200)
        assert abs(a[0] - b[0]) < 1e-6 and abs(a[1] - b[1]) < 1e-6

    def test_truncation_detected(self):
        with pytest.raises(TruncationError):
            osc.fock_oracle_frequencies(1.0, 0.5, 50.0, N=60)

    def test_minimum_size(self):
        with pytest.raises(ValidationError):
            osc.fock_oracle_frequencies(1.0, 1.0, 1.0, N=10)

    def test_profile_wrapper(self):
        Z, m = osc.fock_truncated_oracle(SQRT_T, 3.0, 2.0, 2.5, N=300)
        assert abs(m - osc.cross_mean_physical(SQRT_T, 3.0, 2.0, 2.5)) < 1e-6
        assert abs(Z - osc.partition_function_closed(math.sqrt(2), 2.5)) < 1e-6
