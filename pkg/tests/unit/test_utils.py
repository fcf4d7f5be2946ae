import json

import pytest

from config.run_config import load_run_config, parse_run_config
from config.settings import TestingConfig, config, get_config_name
from models.sweep import CurveSeries
from utils.errors import InvalidArgumentError, SensitivityUndefinedError
from utils.output_writer import OutputWriter


@pytest.fixture
def writer():
    writer = OutputWriter()
    writer.tool_version = '1.0.0'
    return writer


@pytest.fixture
def series():
    series = CurveSeries(figure_id='demo', columns=[('l', ''), ('scheme', ''), ('delta_phi', 'rad')],
                         metadata={'N': 4e14, 'schemes': ['cqi', 'qitg']})
    series.add_row([0.1, 'cqi', 1.5e-7])
    series.add_row([0.1, 'qitg', 3.4e-8])
    series.add_row([0.2, 'cqi', None])
    return series


class TestErrors:
    """Test the error payload"""

    def test_to_dict(self):
        error = SensitivityUndefinedError('zero signal', details={'T': 0.0})
        data = error.to_dict()
        assert data['success'] is False
        assert data['error_code'] == 'SENSITIVITY_UNDEFINED'
        assert data['details'] == {'T': 0.0}

    def test_invalid_argument_is_value_error(self):
        assert issubclass(InvalidArgumentError, ValueError)


class TestOutputWriter:
    """Test CSV, JSON and gnuplot rendering"""

    def test_format_value(self, writer):
        assert writer.format_value(None) == 'undefined'
        assert writer.format_value(float('nan')) == 'undefined'
        assert writer.format_value(True) == 'true'
        assert writer.format_value(3) == '3'
        assert writer.format_value(0.1 + 0.2) == '0.3'
        assert writer.format_value(float('inf')) == 'inf'

    def test_csv_layout(self, writer, series):
        """Test metadata lines, unit header and undefined cells"""
        lines = writer.render_csv(series).split('\n')
        assert lines[0] == '# N=4e+14'
        assert lines[1] == '# schemes=["cqi", "qitg"]'
        assert lines[2] == '# tool_version=1.0.0'
        assert lines[3] == 'l,scheme,delta_phi [rad]'
        assert lines[6] == '0.2,cqi,undefined'

    def test_csv_deterministic(self, writer, series):
        assert writer.render_csv(series) == writer.render_csv(series)

    def test_json_sanitizes_non_finite(self, writer):
        data = json.loads(writer.render_json({'a': float('nan'), 'b': [float('inf')]}))
        assert data == {'a': None, 'b': ['inf']}

    def test_gnuplot_groups_by_scheme(self, writer, series):
        script = writer.render_gnuplot(series, 'demo.csv', ['delta_phi'])
        assert "set datafile separator ','" in script
        assert "title 'scheme=cqi'" in script
        assert "title 'scheme=qitg'" in script
        assert script.count("'demo.csv'") == 2

    def test_gnuplot_unknown_column(self, writer, series):
        with pytest.raises(InvalidArgumentError):
            writer.render_gnuplot(series, 'demo.csv', ['M_db'])

    def test_write_text(self, writer, tmp_path):
        writer.output_folder = str(tmp_path)
        result = writer.write_text('../escape me.csv', 'x\n')
        assert result['success']
        assert result['file_path'] == str(tmp_path / 'escape_me.csv')
        assert (tmp_path / 'escape_me.csv').read_text() == 'x\n'

    def test_write_text_reports_failure(self, writer, tmp_path):
        blocker = tmp_path / 'file'
        blocker.write_text('')
        result = writer.write_text('out.csv', 'x', out=str(blocker / 'out.csv'))
        assert not result['success']
        assert result['error']


class TestRunConfig:
    """Test key-value run files"""

    def test_parse(self):
        text = '# loss figure\nscheme = qitg\nsqueeze-db = 10  # dB\nconstrained = yes\nformat = csv\n'
        values = parse_run_config(text)
        assert values == {'scheme': 'qitg', 'squeeze_db': '10', 'constrained': True, 'output_format': 'csv'}

    def test_repeated_sweep(self):
        values = parse_run_config('sweep = l=0:0.9:0.1; G=1,10')
        assert values['sweep_entries'] == ['l=0:0.9:0.1', 'G=1,10']

    @pytest.mark.parametrize('text', ['loss 0.9', 'colour = red', 'loss =', 'gnuplot = maybe'])
    def test_invalid_lines(self, text):
        with pytest.raises(InvalidArgumentError):
            parse_run_config(text)

    def test_error_names_line(self):
        with pytest.raises(InvalidArgumentError) as exc:
            parse_run_config('loss = 0.9\nbogus = 1', source='run.cfg')
        assert 'run.cfg:2' in str(exc.value)

    def test_quoted_values(self):
        values = parse_run_config('out = "results/loss figure.csv"\nschemes = \'cqi,qitg\'  # two curves\n')
        assert values == {'out': 'results/loss figure.csv', 'schemes': 'cqi,qitg'}

    def test_line_numbers_count_blank_lines(self):
        with pytest.raises(InvalidArgumentError) as exc:
            parse_run_config('loss = 0.9\n\n\n# comment\nbogus = 1\n', source='run.cfg')
        assert 'run.cfg:5' in str(exc.value)

    def test_key_without_value(self):
        with pytest.raises(InvalidArgumentError):
            parse_run_config('loss\n')

    def test_load_missing_file(self, tmp_path):
        with pytest.raises(InvalidArgumentError):
            load_run_config(str(tmp_path / 'missing.cfg'))


class TestSettings:
    """Test configuration selection"""

    def test_environment_selects_class(self, monkeypatch):
        monkeypatch.setenv('QI_ENV', 'testing')
        assert get_config_name() == 'testing'
        assert config[get_config_name()] is TestingConfig

    def test_unknown_environment_falls_back(self, monkeypatch):
        monkeypatch.setenv('QI_ENV', 'staging')
        assert get_config_name() == 'default'

    def test_testing_shrinks_verification(self):
        assert TestingConfig.VERIFY_RANDOM_POINTS < config['production'].VERIFY_RANDOM_POINTS
        assert TestingConfig.GAIN_MAX == 1e4
