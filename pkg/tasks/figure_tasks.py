import math
from typing import NamedTuple, Tuple

import numpy as np
from flask import current_app

from models.param_point import ParamPoint
from models.scheme_config import Engine, GainMode, Scheme, SchemeConfig, TSource
from models.sweep import CurveSeries, inclusive_range
from services.scheme_service import M_CONVENTION, scheme_evaluator
from tasks.sweep_tasks import METRIC_COLUMNS, metrics_row, sweep_tasks
from utils import closed_form as cf
from utils.errors import InvalidArgumentError
from utils.output_writer import output_writer

FIG2_N = 4e14
FIG2_SQUEEZE_DB = 10.0
FIG4_N = 1.2e15
FIG4_R = 0.48

GAIN_GRID = tuple(float(g) for g in np.logspace(0.0, 3.0, 61))
FIG2_LOSSES = inclusive_range(0.0, 0.99, 0.01)
FIG4_LOSSES = inclusive_range(0.0, 0.9, 0.01)
GAIN_SWEEP_LOSSES = (0.1, 0.3, 0.5, 0.7, 0.9)

# free-gain schemes of the theory figure and photon-number matched ones of the experiment
FIG2_SCHEMES = ((Scheme.CQI, GainMode.FREE), (Scheme.QI_G, GainMode.FREE), (Scheme.QI_T_G, GainMode.FREE))
FIG4_SCHEMES = ((Scheme.CQI, GainMode.FREE), (Scheme.QI_G, GainMode.CONSTRAINED),
                (Scheme.QI_T_G, GainMode.CONSTRAINED))


class FigureSpec(NamedTuple):
    kind: str
    description: str
    y_columns: Tuple[str, ...]
    loss: float = None


FIGURES = {
    'fig2a': FigureSpec('decomposition', 'QI_T^G signal and noise versus gain at l=0.2',
                        ('signal_G', 'noise_G', 'noise_l', 'noise_t'), loss=0.2),
    'fig2b': FigureSpec('decomposition', 'QI_T^G signal and noise versus gain at l=0.9',
                        ('signal_G', 'noise_G', 'noise_l', 'noise_t'), loss=0.9),
    'fig2c': FigureSpec('gain', 'QI_T^G relative SNR versus gain for several loss rates', ('rel_snr_db',)),
    'fig2d': FigureSpec('gain', 'QI_T^G quantum enhancement versus gain for several loss rates', ('M_db',)),
    'fig2e': FigureSpec('loss2', 'Optimal phase sensitivity versus loss rate', ('delta_phi',)),
    'fig2f': FigureSpec('loss2', 'Quantum enhancement versus loss rate', ('M_db',)),
    'fig4a': FigureSpec('loss4', 'Signal versus loss rate, photon-number matched', ('signal_slope',)),
    'fig4b': FigureSpec('loss4', 'Noise versus loss rate, photon-number matched', ('noise_std',)),
    'fig4c': FigureSpec('loss4', 'Phase sensitivity versus loss rate, photon-number matched', ('delta_phi_sqrt_n',)),
    'fig4d': FigureSpec('loss4', 'Quantum enhancement versus loss rate, photon-number matched', ('M_db',)),
}


class FigureTasks:
    """Theory curves of the interferometer figures as CSV data"""

    def __init__(self):
        self.g_max = 1e4

    def init_app(self, app):
        """Initialize with Flask app"""
        self.g_max = app.config.get('GAIN_MAX', 1e4)

    def noise_decomposition(self, l, r, N, g_values=GAIN_GRID, scheme=Scheme.QI_T_G, T=0.5,
                            figure_id='decompose'):
        """
        Signal and grouped noise of a fixed-gain design along a gain sweep

        noise_G is the amplification-associated and noise_l the loss-induced
        part; noise_t**2 = noise_G**2 + noise_l**2. T only matters for a
        custom design.
        """
        series = CurveSeries(figure_id=figure_id, columns=[
            ('G', ''), ('T_used', ''), ('signal_G', 'photon-number/rad'),
            ('noise_G', 'photon-number'), ('noise_l', 'photon-number'), ('noise_t', 'photon-number'),
        ])
        for G in g_values:
            config = SchemeConfig(
                scheme=scheme,
                params=ParamPoint(N=N, r=r, T=T, G=G, l=l),
                engine=Engine.GAUSSIAN_LINEARIZED,
                gain_mode=GainMode.FREE if scheme in (Scheme.CQI, Scheme.CUSTOM) else GainMode.FIXED,
                fixed_gain=None if scheme in (Scheme.CQI, Scheme.CUSTOM) else G,
                g_max=self.g_max
            )
            result = scheme_evaluator.noise_breakdown(config)
            groups = result['groups']
            series.add_row([
                G, result['T_used'], result['signal_slope'],
                math.sqrt(groups['amplification-associated']), math.sqrt(groups['loss-induced']),
                math.sqrt(result['total'])
            ])
        series.metadata = {
            'scheme': scheme.value, 'l': l, 'r': r, 'N': N,
            'engine': Engine.GAUSSIAN_LINEARIZED.label,
            'grouping': 'noise_l = loss-vacuum share; noise_G = coherent + squeezed + idler shares',
            'log_x': True
        }
        return series

    def _gain_sweep(self, figure_id, r, N):
        configs, keys = [], []
        for G in GAIN_GRID:
            for l in GAIN_SWEEP_LOSSES:
                keys.append((G, l))
                configs.append(SchemeConfig(
                    scheme=Scheme.QI_T_G, params=ParamPoint(N=N, r=r, l=l),
                    gain_mode=GainMode.FIXED, fixed_gain=G, t_source=TSource.ANALYTIC, g_max=self.g_max
                ))
        series = CurveSeries(figure_id=figure_id, columns=[('G', ''), ('l', '')] + METRIC_COLUMNS)
        for (G, l), result in zip(keys, sweep_tasks.evaluate_configs(configs)):
            series.add_row([G, l] + metrics_row(result, N))
        # curves use the optimal split per loss; the balanced-split plateau is kept for comparison
        balanced = ParamPoint(N=N, r=r, T=0.5, l=GAIN_SWEEP_LOSSES[0])
        series.metadata = {
            'scheme': 'qitg', 'gain_mode': 'fixed', 't_source': 'analytic', 'log_x': True,
            'split_by_loss': {l: cf.t_opt(l, r) for l in GAIN_SWEEP_LOSSES},
            'balanced_split_plateau_rel_snr_db': cf.relative_snr_asymptotic_db(balanced),
        }
        return series

    def _loss_sweep(self, figure_id, r, N, l_values, schemes):
        configs, keys = [], []
        for l in l_values:
            for scheme, mode in schemes:
                keys.append((l, scheme))
                configs.append(SchemeConfig(scheme=scheme, params=ParamPoint(N=N, r=r, l=l),
                                            gain_mode=mode, g_max=self.g_max))
        columns = [('l', ''), ('scheme', '')] + METRIC_COLUMNS + [('sql', 'rad'), ('lossless_cqi', 'rad')]
        series = CurveSeries(figure_id=figure_id, columns=columns)
        sql, lossless = cf.sql(N), cf.sensitivity_opt(0.0, r, N)
        for (l, scheme), result in zip(keys, sweep_tasks.evaluate_configs(configs)):
            series.add_row([l, scheme.value] + metrics_row(result, N) + [sql, lossless])
        series.metadata = {'schemes': {s.value: m.value for s, m in schemes}}
        return series

    def build(self, figure_id):
        """CurveSeries of one figure with its fixed parameters baked in"""
        if figure_id not in FIGURES:
            raise InvalidArgumentError(f'Unknown figure {figure_id!r}; choose from {", ".join(FIGURES)}')
        spec = FIGURES[figure_id]
        r2 = cf.squeezing_r(FIG2_SQUEEZE_DB)

        if spec.kind == 'decomposition':
            series = self.noise_decomposition(spec.loss, r2, FIG2_N, figure_id=figure_id)
            N, r = FIG2_N, r2
        elif spec.kind == 'gain':
            series = self._gain_sweep(figure_id, r2, FIG2_N)
            N, r = FIG2_N, r2
        elif spec.kind == 'loss2':
            series = self._loss_sweep(figure_id, r2, FIG2_N, FIG2_LOSSES, FIG2_SCHEMES)
            N, r = FIG2_N, r2
        else:
            series = self._loss_sweep(figure_id, FIG4_R, FIG4_N, FIG4_LOSSES, FIG4_SCHEMES)
            N, r = FIG4_N, FIG4_R

        series.metadata.update({
            'figure_id': figure_id,
            'description': spec.description,
            'N': N,
            'r': r,
            'squeeze_db': cf.squeezing_db(r),
            'engine': series.metadata.get('engine', Engine.CLOSED_FORM.label),
            'g_max': self.g_max,
            'M_convention': M_CONVENTION,
            'y_columns': list(spec.y_columns)
        })
        current_app.logger.info(f'Built {figure_id} with {len(series.rows)} rows')
        return series

    def emit(self, figure_id, out=None, gnuplot=False, output_format='csv'):
        """
        Build one figure and write its data (and optionally a gnuplot script)

        Returns:
            dict: Write results per file
        """
        series = self.build(figure_id)
        written = output_writer.write_series(series, out=out, output_format=output_format)
        result = {'success': written['success'], 'figure_id': figure_id, 'files': [written['file_path']],
                  'error': written['error']}

        if gnuplot and written['success']:
            spec = FIGURES[figure_id]
            group = 'l' if spec.kind == 'gain' else 'scheme'
            script = output_writer.render_gnuplot(series, written['file_path'].replace('\\', '/'),
                                                  list(spec.y_columns), group_column=group)
            base = written['file_path'].rsplit('.', 1)[0]
            plotted = output_writer.write_text(f'{figure_id}.gp', script, out=f'{base}.gp')
            result['files'].append(plotted['file_path'])
            result['success'] = result['success'] and plotted['success']
        return result

    def emit_all(self, out_dir=None, gnuplot=False, output_format='csv'):
        results = []
        for figure_id in FIGURES:
            out = None
            if out_dir:
                out = f'{out_dir.rstrip("/")}/{figure_id}.{"json" if output_format == "json" else "csv"}'
            results.append(self.emit(figure_id, out=out, gnuplot=gnuplot, output_format=output_format))
        return results


# Global figure tasks instance
figure_tasks = FigureTasks()
