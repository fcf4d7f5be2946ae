import pytest

from models import (
    CheckResult, CurveSeries, Engine, GainMode, GainSpec, OptimizationOutcome, ParamPoint, Scheme,
    SchemeConfig, SweepSpec, TSource, VerificationReport,
)
from models.sweep import inclusive_range
from utils.errors import InvalidArgumentError


class TestParamPoint:
    """Test ParamPoint model"""

    def test_defaults(self):
        point = ParamPoint(N=1e6)
        assert point.T == 0.5
        assert point.G == 1.0
        assert point.s == 1.0

    def test_validation_collects_errors(self):
        """Test that every invalid field is reported"""
        with pytest.raises(InvalidArgumentError) as exc:
            ParamPoint(N=-1.0, T=1.5, G=0.5, l=2.0)
        assert len(exc.value.details['errors']) == 4

    def test_infinite_gain_rejected(self):
        with pytest.raises(InvalidArgumentError):
            ParamPoint(N=1.0, G=float('inf'))

    def test_with_returns_copy(self):
        point = ParamPoint(N=1e6, l=0.3)
        changed = point.with_(l=0.9)
        assert point.l == 0.3
        assert changed.l == 0.9
        assert changed.to_dict()['N'] == 1e6


class TestGainSpec:
    """Test GainSpec model"""

    def test_finite(self):
        gain = GainSpec.finite(2)
        assert not gain.is_asymptotic
        assert gain.to_dict() == {'kind': 'finite', 'value': 2.0}
        assert str(gain) == 'finite(2)'

    def test_asymptotic(self):
        assert str(GainSpec.asymptotic()) == 'asymptotic'
        assert str(GainSpec.asymptotic(1e4)) == 'asymptotic(10000)'
        assert GainSpec.asymptotic(1e4).is_asymptotic


class TestSchemeConfig:
    """Test SchemeConfig model"""

    def test_fixed_mode_needs_gain(self):
        with pytest.raises(InvalidArgumentError):
            SchemeConfig(scheme=Scheme.QI_G, params=ParamPoint(N=1.0), gain_mode=GainMode.FIXED)

    def test_fixed_gain_only_in_fixed_mode(self):
        with pytest.raises(InvalidArgumentError):
            SchemeConfig(scheme=Scheme.QI_G, params=ParamPoint(N=1.0), fixed_gain=2.0)

    def test_t_source_only_for_qitg(self):
        with pytest.raises(InvalidArgumentError):
            SchemeConfig(scheme=Scheme.CQI, params=ParamPoint(N=1.0), t_source=TSource.EXPLICIT)

    def test_lock_phase_range(self):
        with pytest.raises(InvalidArgumentError):
            SchemeConfig(scheme=Scheme.CQI, params=ParamPoint(N=1.0), lock_phase=0.0)

    def test_resolved_t_source(self):
        """Test the default T source per scheme and gain mode"""
        point = ParamPoint(N=1.0)
        assert SchemeConfig(Scheme.QI_T_G, point).resolved_t_source == TSource.ANALYTIC
        assert SchemeConfig(Scheme.QI_T_G, point, gain_mode=GainMode.CONSTRAINED).resolved_t_source \
            == TSource.OPTIMIZED
        assert SchemeConfig(Scheme.CUSTOM, point).resolved_t_source == TSource.EXPLICIT

    def test_to_dict(self):
        config = SchemeConfig(Scheme.QI_T_G, ParamPoint(N=1.0), engine=Engine.GAUSSIAN_LINEARIZED)
        data = config.to_dict()
        assert data['scheme'] == 'qitg'
        assert data['engine'] == 'gaussian-linearized'
        assert data['t_source'] == 'analytic'


class TestSweepSpec:
    """Test SweepSpec and the inclusive range helper"""

    def test_inclusive_range_keeps_stop(self):
        values = inclusive_range(0.0, 0.99, 0.01)
        assert len(values) == 100
        assert values[-1] == 0.99

    def test_empty_range(self):
        """Test that stop below start is an error"""
        with pytest.raises(InvalidArgumentError):
            inclusive_range(0.5, 0.1, 0.1)
        with pytest.raises(InvalidArgumentError):
            inclusive_range(0.0, 1.0, 0.0)

    def test_unknown_parameter(self):
        with pytest.raises(InvalidArgumentError):
            SweepSpec(parameters=('N',), values=((1.0,),), base=ParamPoint(N=1.0))

    def test_out_of_domain_values(self):
        with pytest.raises(InvalidArgumentError):
            SweepSpec(parameters=('l',), values=((0.5, 1.5),), base=ParamPoint(N=1.0))

    def test_points_row_major(self):
        """Test that the first parameter varies slowest"""
        spec = SweepSpec(parameters=('l', 'G'), values=((0.1, 0.2), (1.0, 2.0, 3.0)),
                         base=ParamPoint(N=1.0), schemes=(Scheme.CQI, Scheme.QI_G))
        swept = [s for s, _ in spec.points()]
        assert swept[0] == {'l': 0.1, 'G': 1.0}
        assert swept[2] == {'l': 0.1, 'G': 3.0}
        assert swept[3] == {'l': 0.2, 'G': 1.0}
        assert spec.total_points == 12


class TestCurveSeries:
    """Test CurveSeries model"""

    def test_row_width_checked(self):
        series = CurveSeries(figure_id='t', columns=[('l', ''), ('delta_phi', 'rad')])
        series.add_row([0.1, 1e-7])
        with pytest.raises(InvalidArgumentError):
            series.add_row([0.2])
        assert series.column('delta_phi') == [1e-7]
        assert series.to_dict()['rows'] == [{'l': 0.1, 'delta_phi': 1e-7}]


class TestOptimizationOutcome:
    def test_create_fills_deviations(self):
        outcome = OptimizationOutcome.create(0.31, GainSpec.finite(1.0), 1.01, 0.30, 1.0, 42)
        assert outcome.t_deviation == pytest.approx(0.01)
        assert outcome.delta_phi_gap == pytest.approx(0.01)
        assert outcome.to_dict()['g_star'] == {'kind': 'finite', 'value': 1.0}


class TestVerificationModels:
    """Test CheckResult and VerificationReport"""

    def test_passing_check_drops_message(self):
        check = CheckResult.create('x', True, error_message='ignored')
        assert check.error_message is None
        assert check.get_error_summary() is None

    def test_report_summary(self):
        report = VerificationReport(level='fast')
        report.add(CheckResult.create('a', True))
        report.add(CheckResult.create('b', False, error_message='off by one', category='engine'))
        data = report.to_dict()
        assert not report.passed
        assert data['checks_run'] == 2
        assert data['checks_failed'] == 1
        assert report.failures[0].get_error_summary() == 'b check failed: off by one'
