import math

import numpy as np
import pytest

from models.param_point import ParamPoint
from utils import closed_form as cf
from utils.errors import ConstraintInfeasibleError, InvalidArgumentError, SensitivityUndefinedError

N = 4e14
R10 = cf.squeezing_r(10.0)


class TestSignalAndNoise:
    """Test the analytic signal and noise expressions"""

    def test_cqi_at_high_loss(self):
        """Test CQI at l = 0.9 with 10 dB squeezing"""
        p = ParamPoint(N=N, r=R10, l=0.9)
        assert cf.signal_eq1(p) == pytest.approx(2.0 * math.sqrt(0.025) * N)
        assert cf.noise_eq2(p) == pytest.approx(math.sqrt(0.46 * N))
        assert cf.sensitivity(p) * math.sqrt(N) == pytest.approx(2.144761, rel=1e-6)

    def test_lossless_balanced_reaches_squeezed_limit(self):
        """Test delta_phi = e^{-r} / sqrt(N) at l = 0, T = 1/2, G = 1"""
        p = ParamPoint(N=N, r=R10)
        assert cf.sensitivity(p) == pytest.approx(math.exp(-R10) / math.sqrt(N))
        assert cf.enhancement_M(p) == pytest.approx(10.0)

    def test_zero_signal_undefined(self):
        with pytest.raises(SensitivityUndefinedError):
            cf.sensitivity(ParamPoint(N=N, r=R10, T=0.0))
        with pytest.raises(SensitivityUndefinedError):
            cf.sensitivity(ParamPoint(N=N, r=R10, l=1.0))

    def test_gain_independent_at_transition_loss(self):
        """Test that at l = 1/2 the sensitivity does not depend on G"""
        values = [cf.sensitivity(ParamPoint(N=N, r=R10, T=0.3, G=G, l=0.5)) for G in (1.0, 3.0, 50.0)]
        assert max(values) - min(values) < 1e-12 * values[0]

    def test_asymptote_is_large_gain_limit(self):
        p = ParamPoint(N=N, r=R10, T=0.23, G=1e4, l=0.9)
        assert cf.sensitivity(p) == pytest.approx(cf.sensitivity_asymptotic(p), rel=1e-6)

    def test_asymptote_undefined_at_full_loss(self):
        with pytest.raises(SensitivityUndefinedError):
            cf.sensitivity_asymptotic(ParamPoint(N=N, r=R10, T=0.3, l=1.0))

    def test_relative_snr_of_balanced_coherent(self):
        """Test that the lossless coherent balanced interferometer is the 0 dB reference"""
        assert cf.relative_snr_db(ParamPoint(N=N)) == pytest.approx(0.0, abs=1e-9)


class TestOptimalDesign:
    """Test the analytic optimum over T and G"""

    def test_t_opt_below_transition(self):
        assert cf.t_opt(0.3, R10) == pytest.approx(0.30312, abs=1e-5)

    def test_t_opt_above_transition(self):
        """Test T_opt = s (sqrt(1 + 1/s) - 1) with s = 0.1"""
        assert cf.t_opt(0.9, R10) == pytest.approx(0.1 * (math.sqrt(11.0) - 1.0), rel=1e-12)
        assert cf.t_opt(0.9, R10) == pytest.approx(0.23166, abs=1e-5)

    def test_t_opt_lossless_is_balanced(self):
        assert cf.t_opt(0.0, R10) == 0.5

    def test_t_opt_range(self):
        with pytest.raises(InvalidArgumentError):
            cf.t_opt(1.0, R10)
        with pytest.raises(InvalidArgumentError):
            cf.t_opt(0.3, -0.1)

    def test_g_opt_switches_at_transition(self):
        assert not cf.g_opt(0.5).is_asymptotic
        assert cf.g_opt(0.5).value == 1.0
        assert cf.g_opt(0.51).is_asymptotic

    def test_sensitivity_opt_values(self):
        """Test the optimal sensitivity on both sides of the transition loss"""
        assert cf.sensitivity_opt(0.3, R10, N) * math.sqrt(N) == pytest.approx(0.521628, abs=1e-5)
        assert cf.sensitivity_opt(0.9, R10, N) * math.sqrt(N) == pytest.approx(0.682518, abs=1e-5)

    def test_sensitivity_opt_matches_sensitivity_at_optimum(self):
        for l in (0.2, 0.45):
            p = ParamPoint(N=N, r=R10, T=cf.t_opt(l, R10), l=l)
            assert cf.sensitivity(p) == pytest.approx(cf.sensitivity_opt(l, R10, N), rel=1e-12)
        p = ParamPoint(N=N, r=R10, T=cf.t_opt(0.8, R10), l=0.8)
        assert cf.sensitivity_asymptotic(p) == pytest.approx(cf.sensitivity_opt(0.8, R10, N), rel=1e-12)

    def test_sensitivity_opt_lossless(self):
        assert cf.sensitivity_opt(0.0, R10, N) == pytest.approx(math.exp(-R10) / math.sqrt(N))


class TestConstrainedGain:
    """Test the photon-number matching condition"""

    def test_signal_equals_photon_number(self):
        for T, l in ((0.26, 0.9), (0.5, 0.3), (0.1, 0.6)):
            G = cf.constrained_gain(T, l)
            assert cf.signal_eq1(ParamPoint(N=N, T=T, G=G, l=l)) == pytest.approx(N, rel=1e-12)

    def test_lossless_balanced_needs_unit_gain(self):
        assert cf.constrained_gain(0.5, 0.0) == pytest.approx(1.0)

    def test_infeasible_points(self):
        with pytest.raises(ConstraintInfeasibleError):
            cf.constrained_gain(0.0, 0.5)
        with pytest.raises(ConstraintInfeasibleError):
            cf.constrained_gain(0.5, 1.0)

    def test_out_of_range(self):
        with pytest.raises(InvalidArgumentError):
            cf.constrained_gain(1.2, 0.5)


class TestDecibelHelpers:
    """Test unit conversions and derived figures"""

    def test_squeezing_round_trip(self):
        assert cf.squeezing_db(cf.squeezing_r(10.0)) == pytest.approx(10.0)
        assert math.exp(-2.0 * cf.squeezing_r(10.0)) == pytest.approx(0.1)

    def test_negative_squeezing_db(self):
        with pytest.raises(InvalidArgumentError):
            cf.squeezing_r(-1.0)

    def test_equivalent_photon_factor(self):
        assert cf.equivalent_photon_factor(7.2) == pytest.approx(5.248, abs=1e-3)

    def test_cqi_degradation(self):
        """Test the CQI sensitivity degradation at l = 0.9"""
        p = ParamPoint(N=N, r=R10, l=0.9)
        assert cf.sensitivity_degradation_db(p) == pytest.approx(16.628, abs=1e-3)

    def test_enhancement_degradation_lossless(self):
        assert cf.enhancement_degradation_db(ParamPoint(N=N, r=R10)) == pytest.approx(0.0, abs=1e-9)

    def test_sql(self):
        assert cf.sql(1e4) == pytest.approx(0.01)
        with pytest.raises(InvalidArgumentError):
            cf.sql(0.0)


def random_points(seed, count, l_range=(0.0, 0.99), T_range=(0.01, 0.99), G_range=(1.0, 100.0)):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        yield ParamPoint(N=N, r=float(rng.uniform(0.0, 1.2)), T=float(rng.uniform(*T_range)),
                         G=float(rng.uniform(*G_range)), l=float(rng.uniform(*l_range)))


class TestProperties:
    """Test structural properties of the analytic expressions on seeded random grids"""

    def test_optimum_beats_random_designs(self):
        for p in random_points(7, 500):
            assert cf.sensitivity(p) >= cf.sensitivity_opt(p.l, p.r, p.N) * (1.0 - 1e-12), p

    @pytest.mark.parametrize('l', [0.1, 0.3, 0.45])
    def test_gain_hurts_below_transition(self, l):
        values = [cf.sensitivity(ParamPoint(N=N, r=R10, T=0.3, G=G, l=l)) for G in (1.0, 1.5, 3.0, 10.0, 100.0)]
        assert all(b > a for a, b in zip(values, values[1:]))

    @pytest.mark.parametrize('l', [0.55, 0.7, 0.9, 0.99])
    def test_gain_helps_above_transition(self, l):
        values = [cf.sensitivity(ParamPoint(N=N, r=R10, T=0.3, G=G, l=l)) for G in (1.0, 1.5, 3.0, 10.0, 100.0)]
        assert all(b < a for a, b in zip(values, values[1:]))

    def test_signal_symmetric_noise_not(self):
        """Test that swapping the split keeps the signal but not the noise"""
        for p in random_points(11, 200, l_range=(0.05, 0.99), T_range=(0.05, 0.4)):
            mirrored = p.with_(T=1.0 - p.T)
            assert cf.signal_eq1(mirrored) == pytest.approx(cf.signal_eq1(p), rel=1e-12)
            assert abs(cf.noise_eq2(mirrored) - cf.noise_eq2(p)) > 1e-9 * cf.noise_eq2(p)

    def test_enhancement_never_negative(self):
        for l in (0.0, 0.3, 0.5, 0.7, 0.95):
            for T in (0.1, 0.3, 0.5, 0.7, 0.9):
                for G in (1.0, 2.0, 10.0):
                    for r in (0.0, 0.48, R10):
                        assert cf.enhancement_M(ParamPoint(N=N, r=r, T=T, G=G, l=l)) >= -1e-12

    def test_unit_gain_radicand(self):
        """Test that at G = 1 the noise variance is N (lT + (1 - l) s)"""
        for p in random_points(13, 300, G_range=(1.0, 1.0)):
            expected = p.N * (p.l * p.T + (1.0 - p.l) * p.s)
            assert cf.noise_eq2(p) ** 2 == pytest.approx(expected, rel=1e-12)

    def test_balanced_relative_snr_plateau(self):
        """Test the large-gain relative SNR of the balanced split at 10 dB"""
        p = ParamPoint(N=N, r=R10, T=0.5, l=0.9)
        assert cf.relative_snr_asymptotic_db(p) == pytest.approx(2.22, abs=0.005)
        assert cf.relative_snr_asymptotic_db(p.with_(l=0.3)) == pytest.approx(cf.relative_snr_asymptotic_db(p))
        assert cf.relative_snr_db(p.with_(G=1e4)) == pytest.approx(cf.relative_snr_asymptotic_db(p), abs=1e-6)
