"""
Curve commands: parameter sweeps and figure-data reproduction
"""

import os

import click
from flask import Blueprint, current_app

from commands.common import (
    config_option, emit, evaluation_errors, fail, model_defaults, output_options,
    parse_values, physics_options, resolve_squeezing,
)
from models.param_point import ParamPoint
from models.scheme_config import Engine, GainMode, Scheme, TSource
from models.sweep import SWEEPABLE, SweepSpec
from tasks.figure_tasks import FIGURES, figure_tasks
from tasks.sweep_tasks import sweep_tasks
from utils.errors import InvalidArgumentError, QIError
from utils.output_writer import output_writer

curves_bp = Blueprint('curves', __name__, cli_group=None)


def parse_sweep(entries):
    """'NAME=start:stop:step' or 'NAME=v1,v2,...' entries, one per swept parameter"""
    if not entries:
        raise click.UsageError(f'Give at least one --sweep NAME=VALUES ({", ".join(SWEEPABLE)})')
    names, values = [], []
    for entry in entries:
        name, sep, text = entry.partition('=')
        name = name.strip()
        if not sep or name not in SWEEPABLE:
            raise click.UsageError(f'--sweep expects NAME=VALUES with NAME in {SWEEPABLE}, got {entry!r}')
        names.append(name)
        values.append(parse_values(text.strip(), name))
    return tuple(names), tuple(values)


def parse_schemes(text):
    try:
        schemes = tuple(Scheme(s.strip()) for s in text.split(',') if s.strip())
    except ValueError as e:
        raise click.UsageError(f'--schemes: {e}')
    if not schemes:
        raise click.UsageError('--schemes: no scheme given')
    return schemes


@curves_bp.cli.command('sweep')
@config_option
@click.option('--sweep', 'sweep_entries', multiple=True,
              help='Swept parameter as NAME=start:stop:step or NAME=v1,v2 (repeat for a 2-D grid).')
@click.option('--schemes', default=Scheme.CQI.value, show_default=True,
              help='Comma-separated schemes evaluated at every grid point.')
@physics_options
@click.option('--gain', type=float, default=None, help='Fixed gain G when G is not swept.')
@click.option('--split', type=float, default=None, help='Splitting ratio T when T is not swept.')
@click.option('--engine', type=click.Choice([e.value for e in Engine]), default=Engine.CLOSED_FORM.value,
              show_default=True)
@click.option('--constrained', is_flag=True, default=False, help='Photon-number matched gain.')
@output_options(default='csv')
@evaluation_errors
def sweep(sweep_entries, schemes, photons, squeeze_db, squeeze_r, loss, gain, split, engine, constrained,
          output_format, out):
    """Evaluate schemes over a one- or two-parameter grid."""
    names, values = parse_sweep(sweep_entries)
    schemes = parse_schemes(schemes)
    r = resolve_squeezing(squeeze_db, squeeze_r)

    if constrained and (gain is not None or 'G' in names):
        raise click.UsageError('--constrained derives the gain; do not fix or sweep G')
    options = model_defaults()
    mode = GainMode.CONSTRAINED if constrained else GainMode.FREE
    if gain is not None:
        mode = GainMode.FIXED
        options['fixed_gain'] = gain
    if split is not None and Scheme.QI_T_G in schemes:
        options['t_source'] = TSource.EXPLICIT

    try:
        base = ParamPoint(N=photons, r=r, l=loss, T=0.5 if split is None else split,
                          G=1.0 if gain is None else gain)
        spec = SweepSpec(parameters=names, values=values, base=base, schemes=schemes,
                         engine=Engine(engine), gain_mode=mode, output_format=output_format)
    except InvalidArgumentError as e:
        raise click.UsageError(str(e))

    current_app.logger.info(f'Sweeping {", ".join(names)} over {spec.total_points} points')
    series = sweep_tasks.run_sweep(spec, **options)
    if output_format == 'json':
        emit(output_writer.render_json(series), out, 'sweep.json')
    else:
        emit(output_writer.render_csv(series), out, 'sweep.csv')


@curves_bp.cli.command('figure')
@config_option
@click.argument('figure_id', type=click.Choice(list(FIGURES) + ['all']))
@click.option('--gnuplot', is_flag=True, default=False, help='Also write a gnuplot script per data file.')
@click.option('--format', 'output_format', type=click.Choice(['csv', 'json']), default='csv', show_default=True)
@click.option('--out', type=click.Path(), default=None,
              help='Output file (single figure) or directory (all); default: the output folder.')
@evaluation_errors
def figure(figure_id, gnuplot, output_format, out):
    """Write the theory curves of one figure, or of all of them."""
    if gnuplot and output_format != 'csv':
        raise click.UsageError('--gnuplot needs --format csv')

    if figure_id == 'all':
        results = figure_tasks.emit_all(out_dir=out, gnuplot=gnuplot, output_format=output_format)
    else:
        if out and os.path.isdir(out):
            out = os.path.join(out, f'{figure_id}.{output_format}')
        results = [figure_tasks.emit(figure_id, out=out, gnuplot=gnuplot, output_format=output_format)]

    for result in results:
        if not result['success']:
            fail(QIError(f'Could not write {result["figure_id"]}: {result["error"]}'))
        for path in result['files']:
            click.echo(path)
