"""
Single-configuration commands: point evaluation, design optimization and noise decomposition
"""

import click
from flask import Blueprint, current_app

from commands.common import (
    build_config, config_option, design_options, emit, evaluation_errors, output_options, parse_values,
    physics_options, resolve_squeezing,
)
from models.scheme_config import GainMode, Scheme
from models.sweep import CurveSeries
from services.optimizer_service import design_optimizer
from services.scheme_service import scheme_evaluator
from tasks.figure_tasks import figure_tasks
from tasks.sweep_tasks import METRIC_COLUMNS, metrics_row
from utils.errors import InvalidArgumentError
from utils.output_writer import output_writer

analysis_bp = Blueprint('analysis', __name__, cli_group=None)

SCHEME_CHOICES = click.Choice([s.value for s in Scheme])

OPTIMUM_COLUMNS = [
    ('l', ''), ('t_star', ''), ('g_kind', ''), ('g_star', ''), ('delta_phi_star', 'rad'),
    ('delta_phi_sqrt_n', 'rad'), ('analytic_t', ''), ('analytic_delta_phi', 'rad'),
    ('t_deviation', ''), ('delta_phi_gap', ''), ('evaluations', ''),
]


@analysis_bp.cli.command('point')
@config_option
@click.option('--scheme', type=SCHEME_CHOICES, default=Scheme.CQI.value, show_default=True)
@physics_options
@design_options
@output_options()
@evaluation_errors
def point(scheme, photons, squeeze_db, squeeze_r, loss, gain, split, engine, constrained, t_source,
          output_format, out):
    """Evaluate one configuration and print its metrics."""
    config = build_config(scheme, photons, squeeze_db, squeeze_r, loss, gain, split, engine,
                          constrained, t_source)
    current_app.logger.info(f'Evaluating {config.scheme.value} at {config.params}')
    metrics = scheme_evaluator.evaluate(config)

    if output_format == 'json':
        emit(output_writer.render_json(metrics), out, 'point.json')
        return

    series = CurveSeries(figure_id='point', columns=[('scheme', '')] + METRIC_COLUMNS,
                         metadata=dict(metrics.metadata))
    series.add_row([config.scheme.value] + metrics_row(metrics, config.params.N))
    emit(output_writer.render_csv(series), out, 'point.csv')


@analysis_bp.cli.command('optimize')
@config_option
@physics_options
@click.option('--loss-list', default=None, help='Loss values as start:stop:step or a comma list.')
@click.option('--constrained', is_flag=True, default=False, help='Photon-number matched gain.')
@output_options()
@evaluation_errors
def optimize(photons, squeeze_db, squeeze_r, loss, loss_list, constrained, output_format, out):
    """Find the splitting ratio and gain minimizing the phase sensitivity."""
    r = resolve_squeezing(squeeze_db, squeeze_r)
    losses = parse_values(loss_list, 'loss-list') if loss_list else (loss,)
    mode = GainMode.CONSTRAINED if constrained else GainMode.FREE
    g_max = current_app.config['GAIN_MAX']

    try:
        outcomes = design_optimizer.sweep_optimum(losses, r, photons, mode=mode, g_max=g_max)
    except InvalidArgumentError as e:
        raise click.UsageError(str(e))

    if output_format == 'json':
        payload = outcomes[0] if not loss_list else {'outcomes': [o.to_dict() for o in outcomes]}
        emit(output_writer.render_json(payload), out, 'optimize.json')
        return

    series = CurveSeries(figure_id='optimize', columns=OPTIMUM_COLUMNS, metadata={
        'N': photons, 'r': r, 'mode': mode.value, 'g_max': g_max
    })
    for l, outcome in zip(losses, outcomes):
        series.add_row([
            l, outcome.t_star, outcome.g_star.kind, outcome.g_star.value, outcome.delta_phi_star,
            outcome.delta_phi_star * photons ** 0.5, outcome.analytic_t, outcome.analytic_delta_phi,
            outcome.t_deviation, outcome.delta_phi_gap, outcome.evaluations
        ])
    emit(output_writer.render_csv(series), out, 'optimize.csv')


@analysis_bp.cli.command('decompose')
@config_option
@click.option('--scheme', type=SCHEME_CHOICES, default=Scheme.QI_T_G.value, show_default=True)
@physics_options
@design_options
@click.option('--gains', default=None, help='Gain sweep as start:stop:step or a comma list.')
@output_options()
@evaluation_errors
def decompose(scheme, photons, squeeze_db, squeeze_r, loss, gain, split, engine, constrained, t_source,
              gains, output_format, out):
    """Per-source noise breakdown of one configuration, or signal and noise along a gain sweep."""
    config = build_config(scheme, photons, squeeze_db, squeeze_r, loss, gain, split, engine,
                          constrained, t_source)

    if gains:
        if constrained or gain is not None:
            raise click.UsageError('--gains sweeps the gain; drop --gain and --constrained')
        p = config.params
        series = figure_tasks.noise_decomposition(p.l, p.r, p.N, parse_values(gains, 'gains'),
                                                  scheme=config.scheme, T=p.T)
        if output_format == 'json':
            emit(output_writer.render_json(series), out, 'decompose.json')
        else:
            emit(output_writer.render_csv(series), out, 'decompose.csv')
        return

    result = scheme_evaluator.noise_breakdown(config)
    result['config'] = config.to_dict()
    if output_format == 'json':
        emit(output_writer.render_json(result), out, 'decompose.json')
        return

    series = CurveSeries(figure_id='decompose',
                         columns=[('source', ''), ('variance', 'photon-number^2'), ('fraction', '')],
                         metadata={'config': config.to_dict(), 'T_used': result['T_used'],
                                   'gain_used': result['gain_used'], 'convention': result['convention']})
    total = result['total']
    for name, value in result['shares'].items():
        series.add_row([name, value, value / total if total > 0 else None])
    for name, value in result['groups'].items():
        series.add_row([f'group:{name}', value, value / total if total > 0 else None])
    series.add_row(['total', total, 1.0 if total > 0 else None])
    emit(output_writer.render_csv(series), out, 'decompose.csv')
