import math

import numpy as np
import pytest

from utils import gaussian_engine as ge
from utils.errors import InvalidArgumentError, PreconditionViolationError


class TestStatePreparation:
    """Test vacuum, displacement and squeezing"""

    def test_vacuum_covariance_is_identity(self):
        """Test the vacuum convention"""
        state = ge.vacuum(3)
        assert np.allclose(state.covariance, np.eye(6))
        assert np.allclose(state.displacement, 0.0)
        assert ge.mean_photon(state, 1) == 0.0

    def test_vacuum_rejects_bad_mode_count(self):
        """Test that the mode count must be a positive integer"""
        with pytest.raises(InvalidArgumentError):
            ge.vacuum(0)
        with pytest.raises(InvalidArgumentError):
            ge.vacuum(2.5)

    def test_vacuum_rejects_duplicate_tags(self):
        """Test that source tags must be unique"""
        tag = ge.SourceTag(ge.SourceKind.LOSS_VACUUM)
        with pytest.raises(InvalidArgumentError):
            ge.vacuum(2, tags=[tag, tag])

    def test_other_tag_needs_label(self):
        with pytest.raises(InvalidArgumentError):
            ge.SourceTag(ge.SourceKind.OTHER)

    def test_displacement_sets_photon_number(self):
        """Test that X = 2 sqrt(N) carries N photons"""
        state = ge.displace(ge.vacuum(1), 0, 2.0 * math.sqrt(7.0), 0.0)
        assert ge.mean_photon(state, 0) == pytest.approx(7.0, rel=1e-12)

    def test_squeezing_reduces_p_variance(self):
        """Test the P-squeezed convention at angle 0"""
        r = 0.5
        state = ge.squeeze(ge.vacuum(1), 0, r)
        _, cov = state.marginal(0)
        assert cov[0, 0] == pytest.approx(math.exp(2 * r))
        assert cov[1, 1] == pytest.approx(math.exp(-2 * r))
        assert ge.mean_photon(state, 0) == pytest.approx(math.sinh(r) ** 2)
        assert ge.purity_determinant(state) == pytest.approx(1.0)

    def test_negative_squeezing_rejected(self):
        with pytest.raises(InvalidArgumentError):
            ge.squeeze(ge.vacuum(1), 0, -0.1)

    def test_mode_out_of_range(self):
        """Test that gates check their mode indices"""
        with pytest.raises(InvalidArgumentError):
            ge.phase(ge.vacuum(2), 2, 0.1)
        with pytest.raises(InvalidArgumentError):
            ge.beamsplit(ge.vacuum(2), 1, 1, 0.5)


class TestPassiveGates:
    """Test beamsplitter, phase and loss"""

    def test_beamsplitter_divides_photons(self):
        """Test that mode i keeps the fraction T"""
        state = ge.displace(ge.vacuum(2), 0, 2.0 * math.sqrt(100.0), 0.0)
        state = ge.beamsplit(state, 0, 1, 0.3)
        assert ge.mean_photon(state, 0) == pytest.approx(30.0)
        assert ge.mean_photon(state, 1) == pytest.approx(70.0)

    def test_beamsplitter_identity_at_unit_transmission(self):
        state = ge.squeeze(ge.vacuum(2), 0, 0.4)
        split = ge.beamsplit(state, 0, 1, 1.0)
        assert np.allclose(split.covariance, state.covariance)

    def test_beamsplitter_range(self):
        with pytest.raises(InvalidArgumentError):
            ge.beamsplit(ge.vacuum(2), 0, 1, 1.5)

    def test_phase_rotates_mean(self):
        """Test a -> e^{i phi} a on the quadrature means"""
        state = ge.displace(ge.vacuum(1), 0, 2.0, 0.0)
        rotated = ge.phase(state, 0, math.pi / 2)
        assert np.allclose(rotated.displacement, [0.0, 2.0])

    def test_attenuation_removes_photons(self):
        """Test that loss l keeps (1 - l) N photons"""
        state = ge.displace(ge.vacuum(2), 0, 2.0 * math.sqrt(50.0), 0.0)
        lossy = ge.attenuate(state, 0, 1, 0.2)
        assert ge.mean_photon(lossy, 0) == pytest.approx(40.0)
        assert ge.SourceTag(ge.SourceKind.LOSS_VACUUM) in lossy.tags()

    def test_attenuation_needs_vacuum_ancilla(self):
        state = ge.displace(ge.vacuum(2), 1, 1.0, 0.0)
        with pytest.raises(PreconditionViolationError):
            ge.attenuate(state, 0, 1, 0.2)


class TestAmplifier:
    """Test the phase-insensitive amplifier"""

    def test_amplified_vacuum_photons(self):
        """Test <n> = G^2 - 1 for a vacuum input"""
        state = ge.amplify(ge.vacuum(2), 0, 1, 3.0)
        assert ge.mean_photon(state, 0) == pytest.approx(8.0)
        assert ge.mean_photon(state, 1) == pytest.approx(8.0)
        assert ge.check_physical(state).passed

    def test_gain_below_one_rejected(self):
        with pytest.raises(InvalidArgumentError):
            ge.amplify(ge.vacuum(2), 0, 1, 0.9)

    def test_idler_must_be_vacuum(self):
        """Test the amplifier idler precondition"""
        state = ge.squeeze(ge.vacuum(2), 1, 0.2)
        with pytest.raises(PreconditionViolationError):
            ge.amplify(state, 0, 1, 1.5)

    def test_idler_tagged(self):
        state = ge.amplify(ge.vacuum(2), 0, 1, 1.5)
        assert ge.SourceTag(ge.SourceKind.AMPLIFIER_IDLER) in state.tags()


class TestObservables:
    """Test intensity-difference moments and the per-source breakdown"""

    def test_nminus_coherent_and_vacuum(self):
        """Test J on a unit coherent state against vacuum at phi = pi/2"""
        state = ge.displace(ge.vacuum(2), 0, 2.0, 0.0)
        moments = ge.nminus_exact(state, 0, 1, math.pi / 2)
        assert moments.mean == pytest.approx(0.0, abs=1e-12)
        assert moments.variance == pytest.approx(1.0)

    def test_nminus_squeezed_and_vacuum(self):
        """Test Var J = <n> of the squeezed mode when the other is vacuum"""
        state = ge.squeeze(ge.vacuum(2), 0, 0.5)
        moments = ge.nminus_exact(state, 0, 1)
        assert moments.mean == pytest.approx(0.0, abs=1e-12)
        assert moments.variance == pytest.approx(math.sinh(0.5) ** 2)

    def test_breakdown_sums_to_variance(self):
        """Test that per-source shares add up to the total variance"""
        tags = [ge.SourceTag(kind) for kind in (ge.SourceKind.COHERENT_INPUT, ge.SourceKind.SQUEEZED_INPUT,
                                                 ge.SourceKind.AMPLIFIER_IDLER, ge.SourceKind.LOSS_VACUUM)]
        state = ge.vacuum(4, tags=tags)
        state = ge.displace(state, 0, 2.0 * math.sqrt(1e6), 0.0)
        state = ge.squeeze(state, 1, 0.7)
        state = ge.beamsplit(state, 0, 1, 0.4)
        state = ge.amplify(state, 1, 2, 2.5)
        state = ge.phase(state, 1, math.pi / 2)
        state = ge.attenuate(state, 1, 3, 0.6)

        coeffs = ge.nminus_coefficients(state, 0, 1)
        stats = ge.linear_observable_stats(state, coeffs)
        assert sum(stats.breakdown.values()) == pytest.approx(stats.variance, rel=1e-12)
        assert stats.breakdown[tags[0]] == pytest.approx(0.0, abs=1e-9 * stats.variance)

    def test_coefficient_length_checked(self):
        with pytest.raises(InvalidArgumentError):
            ge.linear_observable_stats(ge.vacuum(2), [1.0, 0.0])


class TestPhysicality:
    """Test the uncertainty-principle check"""

    def test_sub_vacuum_covariance_fails(self):
        """Test that sigma = 0.5 I violates sigma + i Omega >= 0"""
        report = ge.check_physical(ge.from_covariance(0.5 * np.eye(2)))
        assert not report.passed
        assert report.min_eigenvalue < 0
        assert report.failed_blocks == ('custom',)

    def test_gate_chain_stays_physical(self):
        state = ge.vacuum(3)
        state = ge.squeeze(state, 0, 0.8, angle=0.3)
        state = ge.beamsplit(state, 0, 1, 0.7)
        state = ge.amplify(state, 0, 2, 1.7)
        report = ge.check_physical(state)
        assert report.passed
        assert report.symplectic_error < 1e-9

    def test_from_covariance_validation(self):
        """Test shape and symmetry checks of hand-built states"""
        with pytest.raises(InvalidArgumentError):
            ge.from_covariance(np.eye(3))
        with pytest.raises(InvalidArgumentError):
            ge.from_covariance([[1.0, 0.5], [0.0, 1.0]])


class TestConservation:
    """Test purity and energy bookkeeping on seeded random inputs"""

    def test_pure_inputs_stay_pure(self):
        """Test det sigma = 1 after beamsplitters and amplifiers on squeezed and coherent inputs"""
        rng = np.random.default_rng(5)
        for _ in range(50):
            state = ge.vacuum(3)
            state = ge.displace(state, 0, *rng.uniform(-3.0, 3.0, size=2))
            state = ge.squeeze(state, 1, rng.uniform(0.0, 1.2), angle=rng.uniform(0.0, math.pi))
            state = ge.beamsplit(state, 0, 1, rng.uniform(0.0, 1.0))
            assert ge.purity_determinant(state) == pytest.approx(1.0, abs=1e-9)
            state = ge.amplify(state, 1, 2, rng.uniform(1.0, 5.0))
            assert ge.purity_determinant(state) == pytest.approx(1.0, rel=1e-8)

    @pytest.mark.parametrize('l', [0.0, 0.1, 0.5, 0.9, 0.999, 1.0])
    def test_loss_keeps_exact_fraction(self, l):
        """Test that a coherent input keeps (1 - l) of its photons and the ancilla takes the rest"""
        photons = 1e6
        state = ge.displace(ge.vacuum(2), 0, 2.0 * math.sqrt(photons), 0.0)
        lossy = ge.attenuate(state, 0, 1, l)
        assert ge.mean_photon(lossy, 0) == pytest.approx((1.0 - l) * photons, rel=1e-12, abs=1e-6)
        assert ge.mean_photon(lossy, 0) + ge.mean_photon(lossy, 1) == pytest.approx(photons, rel=1e-12)
