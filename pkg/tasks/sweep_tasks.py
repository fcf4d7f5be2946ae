import math
from concurrent.futures import ProcessPoolExecutor

from flask import current_app, has_app_context

from models.scheme_config import GainMode, Scheme, SchemeConfig, TSource
from models.sweep import CurveSeries
from services.scheme_service import M_CONVENTION, scheme_evaluator
from utils.errors import InvalidArgumentError, QIError

METRIC_COLUMNS = [
    ('T_used', ''),
    ('G_used', ''),
    ('gain_asymptotic', ''),
    ('signal_slope', 'photon-number/rad'),
    ('noise_std', 'photon-number'),
    ('delta_phi', 'rad'),
    ('delta_phi_sqrt_n', 'rad'),
    ('M_db', 'dB'),
    ('rel_snr_db', 'dB'),
    ('beyond_sql_db', 'dB'),
    ('degradation_db', 'dB'),
    ('status', ''),
]


def evaluate_point(config: SchemeConfig):
    """Evaluate one configuration; errors come back as (error_code, message) instead of raising"""
    try:
        return scheme_evaluator.evaluate(config)
    except QIError as e:
        return (e.error_code, e.message)


def metrics_row(result, N):
    """Metric cells of one evaluated point, in METRIC_COLUMNS order"""
    if isinstance(result, tuple):
        return [None] * (len(METRIC_COLUMNS) - 1) + [result[0]]
    gain = result.metadata['gain_used']
    return [
        result.metadata['T_used'],
        gain['value'],
        gain['kind'] == 'asymptotic',
        result.signal_slope,
        result.noise_std,
        result.delta_phi,
        result.delta_phi * math.sqrt(N),
        result.M_db,
        result.rel_snr_db,
        result.beyond_sql_db,
        result.degradation_db,
        'ok',
    ]


class SweepTasks:
    """Order-preserving evaluation of parameter grids"""

    def __init__(self):
        self.max_workers = 1
        self.max_points = 10 ** 6

    def init_app(self, app):
        """Initialize with Flask app"""
        self.max_workers = app.config.get('SWEEP_MAX_WORKERS', 1)
        self.max_points = int(app.config.get('SWEEP_MAX_POINTS', 10 ** 6))

    def evaluate_configs(self, configs):
        """
        Evaluate configurations, serially or on a process pool

        Results are returned in input order either way; each entry is a
        Metrics object or an (error_code, message) tuple.
        """
        configs = list(configs)
        if has_app_context():
            current_app.logger.debug(f'Evaluating {len(configs)} points with {self.max_workers} worker(s)')
        if self.max_workers <= 1 or len(configs) < 2:
            return [evaluate_point(config) for config in configs]

        chunksize = max(1, len(configs) // (4 * self.max_workers))
        with ProcessPoolExecutor(max_workers=self.max_workers) as executor:
            return list(executor.map(evaluate_point, configs, chunksize=chunksize))

    def point_config(self, spec, scheme, params, options):
        """
        SchemeConfig of one sweep point

        A swept G is applied to the QI schemes as a fixed gain and a swept T to
        QI_T^G as an explicit splitting ratio. CQI keeps its own T and G and a
        custom design always takes G from the parameter point.
        """
        options = dict(options)
        gain_mode = spec.gain_mode
        if scheme == Scheme.CQI or (scheme == Scheme.CUSTOM and gain_mode == GainMode.FIXED):
            gain_mode = GainMode.FREE
        elif 'G' in spec.parameters and scheme != Scheme.CUSTOM:
            gain_mode = GainMode.FIXED
            options['fixed_gain'] = params.G
        if 'T' in spec.parameters and scheme == Scheme.QI_T_G:
            options['t_source'] = TSource.EXPLICIT
        if scheme != Scheme.QI_T_G:
            options.pop('t_source', None)
        if gain_mode != GainMode.FIXED:
            options.pop('fixed_gain', None)
        return SchemeConfig(scheme=scheme, params=params, engine=spec.engine,
                            gain_mode=gain_mode, **options)

    def run_sweep(self, spec, figure_id='sweep', **config_options):
        """
        Evaluate every scheme at every grid point of a sweep

        Args:
            spec: SweepSpec
            figure_id: Name of the resulting series
            config_options: Extra SchemeConfig fields (fixed_gain, t_source, g_max, ...)

        Returns:
            CurveSeries: One row per (grid point, scheme)
        """
        if spec.total_points > self.max_points:
            raise InvalidArgumentError(f'Sweep has {spec.total_points} points, limit is {self.max_points}')

        keys, configs = [], []
        for swept, params in spec.points():
            for scheme in spec.schemes:
                keys.append((swept, scheme))
                configs.append(self.point_config(spec, scheme, params, config_options))

        results = self.evaluate_configs(configs)

        columns = [(name, '') for name in spec.parameters]
        columns += [('scheme', '')] + METRIC_COLUMNS
        series = CurveSeries(figure_id=figure_id, columns=columns)
        failures = 0
        for (swept, scheme), result in zip(keys, results):
            failures += isinstance(result, tuple)
            row = [swept[name] for name in spec.parameters] + [scheme.value]
            series.add_row(row + metrics_row(result, spec.base.N))

        series.metadata = {
            'sweep': spec.to_dict(),
            'options': {k: getattr(v, 'value', v) for k, v in config_options.items()},
            'M_convention': M_CONVENTION,
            'failed_points': failures
        }
        if failures and has_app_context():
            current_app.logger.warning(f'{failures} of {len(results)} sweep points could not be evaluated')
        return series


# Global sweep tasks instance
sweep_tasks = SweepTasks()
