import math
import warnings

import numpy as np
import pytest

from models.param_point import ParamPoint
from utils import fock_oracle as fo
from utils.errors import InvalidArgumentError, TruncationWarning


def overlap(a, b):
    return abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2


class TestScenarioLimits:
    """Test mode-count and cutoff limits"""

    def test_too_many_modes(self):
        with pytest.raises(InvalidArgumentError):
            fo.fock_vacuum(5, 4)

    def test_cutoff_too_small(self):
        with pytest.raises(InvalidArgumentError):
            fo.fock_vacuum(1, 3)

    def test_amplitude_budget(self):
        """Test that cutoff^modes is capped"""
        with pytest.raises(InvalidArgumentError):
            fo.fock_vacuum(4, 40)

    def test_invalid_occupations(self):
        with pytest.raises(InvalidArgumentError):
            fo.fock_state(2, 4, (4, 0))

    def test_gate_parameter_validation(self):
        with pytest.raises(InvalidArgumentError):
            fo.Gate.beamsplit(0, 1, 1.2)
        with pytest.raises(InvalidArgumentError):
            fo.Gate.two_mode_squeeze(0, 1, 0.5)
        with pytest.raises(InvalidArgumentError):
            fo.Gate.squeeze(0, -0.2)


class TestSingleGates:
    """Test brute-force gates against known analytic values"""

    def test_coherent_photon_number(self):
        scenario = fo.run_circuit(fo.fock_vacuum(1, 20), [fo.Gate.displace(0, 2.0)])
        assert fo.mean_photon_fock(scenario, 0) == pytest.approx(1.0, abs=1e-8)

    def test_squeezed_photon_number(self):
        scenario = fo.run_circuit(fo.fock_vacuum(1, 30), [fo.Gate.squeeze(0, 0.5)])
        assert fo.mean_photon_fock(scenario, 0) == pytest.approx(math.sinh(0.5) ** 2, abs=1e-6)

    def test_squeezed_quadratures_match_gaussian_convention(self):
        """Test that angle 0 squeezes P, as in the Gaussian engine"""
        scenario = fo.run_circuit(fo.fock_vacuum(1, 30), [fo.Gate.squeeze(0, 0.3)])
        _, cov = fo.quadrature_moments(scenario)
        assert cov[1, 1] == pytest.approx(math.exp(-0.6), abs=1e-6)
        assert cov[0, 0] == pytest.approx(math.exp(0.6), abs=1e-6)

    def test_single_photon_split(self):
        """Test |1,0> on a balanced beamsplitter"""
        scenario = fo.run_circuit(fo.fock_state(2, 4, (1, 0)), [fo.Gate.beamsplit(0, 1, 0.5)])
        assert abs(scenario.amplitudes[1, 0]) ** 2 == pytest.approx(0.5, abs=1e-10)
        assert abs(scenario.amplitudes[0, 1]) ** 2 == pytest.approx(0.5, abs=1e-10)

    def test_nminus_coherent_against_vacuum(self):
        scenario = fo.run_circuit(fo.fock_vacuum(2, 20), [fo.Gate.displace(0, 2.0)])
        moments = fo.nminus_stats_fock(scenario, 0, 1, math.pi / 2)
        assert moments.mean == pytest.approx(0.0, abs=1e-6)
        assert moments.variance == pytest.approx(1.0, abs=1e-6)

    def test_nminus_vacuum(self):
        moments = fo.nminus_stats_fock(fo.fock_vacuum(2, 6), 0, 1)
        assert moments.mean == 0.0
        assert moments.variance == 0.0

    def test_nminus_needs_two_modes(self):
        with pytest.raises(InvalidArgumentError):
            fo.nminus_stats_fock(fo.fock_vacuum(2, 6), 1, 1)


class TestGateInverses:
    """Test that gate followed by its inverse returns the initial state"""

    @pytest.mark.parametrize('gate', [
        fo.Gate.displace(0, 0.6, 0.2),
        fo.Gate.phase(0, 0.7),
        fo.Gate.beamsplit(0, 1, 0.3),
        fo.Gate.two_mode_squeeze(0, 1, 1.2),
    ])
    def test_inverse_restores_state(self, gate):
        initial = fo.run_circuit(fo.fock_vacuum(2, 20), [fo.Gate.displace(1, 0.4)])
        restored = fo.run_circuit(initial, [gate] + gate.inverse())
        assert overlap(initial, restored) == pytest.approx(1.0, abs=1e-8)

    def test_squeeze_inverse_restores_vacuum(self):
        initial = fo.fock_vacuum(1, 30)
        gate = fo.Gate.squeeze(0, 0.2, 0.4)
        restored = fo.run_circuit(initial, [gate] + gate.inverse())
        assert overlap(initial, restored) == pytest.approx(1.0, abs=1e-8)


class TestTruncation:
    """Test leakage tracking and the truncation warning"""

    def test_warning_on_low_cutoff(self):
        with pytest.warns(TruncationWarning):
            scenario = fo.run_circuit(fo.fock_vacuum(1, 4), [fo.Gate.squeeze(0, 1.0)])
        assert scenario.truncated
        assert scenario.leakage > fo.DEFAULT_LEAKAGE_LIMIT

    def test_no_warning_when_converged(self):
        with warnings.catch_warnings():
            warnings.simplefilter('error', TruncationWarning)
            scenario = fo.run_circuit(fo.fock_vacuum(1, 20), [fo.Gate.displace(0, 1.0)])
        assert not scenario.truncated


class TestChainComparison:
    """Test the four-mode interferometer against the Gaussian engine"""

    def test_outside_oracle_box_rejected(self):
        with pytest.raises(InvalidArgumentError):
            fo.full_chain_check(ParamPoint(N=4.0, r=0.1, T=0.5, G=1.0, l=0.1), 8)

    def test_passive_chain_agrees(self):
        """Test that without squeezing or gain the chain agrees to truncation accuracy"""
        comparison = fo.full_chain_check(ParamPoint(N=0.25, r=0.0, T=0.6, G=1.0, l=0.3), 12)
        assert comparison.deviation < 1e-8
        assert not comparison.truncation_warning

    def test_chain_gates_layout(self):
        gates = fo.chain_gates(ParamPoint(N=0.25, r=0.2, T=0.6, G=1.1, l=0.3))
        assert [g.kind for g in gates] == ['displace', 'squeeze', 'beamsplit', 'two_mode_squeeze',
                                           'phase', 'beamsplit']
        assert gates[-1].params == (pytest.approx(0.7),)
