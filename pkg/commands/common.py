"""
Shared options and helpers of the command-line surface

Exit codes: 0 success, 1 verification failure, 2 usage error, 3 evaluation error.
"""

import functools
import json
import os

import click
from flask import current_app

from config.run_config import load_run_config
from models.param_point import ParamPoint
from models.scheme_config import Engine, GainMode, Scheme, SchemeConfig, TSource
from models.sweep import inclusive_range
from utils import closed_form as cf
from utils.errors import InvalidArgumentError, QIError
from utils.output_writer import output_writer

EXIT_VERIFICATION_FAILED = 1
EXIT_USAGE = 2
EXIT_EVALUATION = 3

DEFAULT_PHOTONS = 4e14


def _load_config_file(ctx, param, value):
    if not value:
        return value
    try:
        defaults = load_run_config(value)
    except InvalidArgumentError as e:
        raise click.BadParameter(str(e), ctx=ctx, param=param)
    ctx.default_map = dict(ctx.default_map or {}, **defaults)
    return value


config_option = click.option(
    '--config', 'config_file', type=click.Path(dir_okay=False), is_eager=True, expose_value=False,
    callback=_load_config_file, help='Key-value run file; command-line flags override it.'
)


def physics_options(func):
    """Operating-point flags shared by every evaluating command"""
    options = [
        click.option('--photons', type=float, default=DEFAULT_PHOTONS, show_default=True,
                     help='Phase-sensing photon number N.'),
        click.option('--squeeze-db', type=float, default=None, help='Input squeezing in dB.'),
        click.option('--squeeze-r', type=float, default=None, help='Input squeezing parameter r.'),
        click.option('--loss', type=float, default=0.0, show_default=True, help='Signal-arm loss rate l.'),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def design_options(func):
    """Scheme design flags: gain, splitting ratio, engine and constraint mode"""
    options = [
        click.option('--gain', type=float, default=None, help='Amplitude gain G (fixed gain for qig/qitg).'),
        click.option('--split', type=float, default=None, help='BS1 splitting ratio T (custom and qitg).'),
        click.option('--engine', type=click.Choice([e.value for e in Engine]), default=Engine.CLOSED_FORM.value,
                     show_default=True, help='Evaluation engine.'),
        click.option('--constrained', is_flag=True, default=False,
                     help='Photon-number matched gain instead of the free optimum.'),
        click.option('--t-source', type=click.Choice([t.value for t in TSource]), default=None,
                     help='Where QI_T^G takes its splitting ratio from.'),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def output_options(formats=('csv', 'json'), default='json'):
    def decorator(func):
        func = click.option('--out', type=click.Path(dir_okay=False), default=None,
                            help='Output file (default: standard output).')(func)
        return click.option('--format', 'output_format', type=click.Choice(formats), default=default,
                            show_default=True, help='Output format.')(func)
    return decorator


def resolve_squeezing(squeeze_db, squeeze_r):
    if squeeze_db is not None and squeeze_r is not None:
        raise click.UsageError('Give either --squeeze-db or --squeeze-r, not both')
    try:
        if squeeze_db is not None:
            return cf.squeezing_r(squeeze_db)
    except InvalidArgumentError as e:
        raise click.UsageError(str(e))
    if squeeze_r is not None and squeeze_r < 0:
        raise click.UsageError(f'--squeeze-r must be >= 0, got {squeeze_r}')
    return squeeze_r or 0.0


def model_defaults():
    """Lock phase, probe amplitude and gain ceiling from the application config"""
    return {
        'lock_phase': current_app.config['LOCK_PHASE'],
        'probe_amplitude': current_app.config['PROBE_AMPLITUDE'],
        'g_max': current_app.config['GAIN_MAX'],
    }


def design_choices(scheme, gain, split, constrained, t_source):
    """
    Gain mode and SchemeConfig extras implied by the design flags

    Returns:
        tuple: (GainMode, dict of extra SchemeConfig fields)
    """
    if scheme == Scheme.CQI and (gain is not None or split is not None or constrained):
        raise click.UsageError('cqi is fixed at T=0.5, G=1; use --scheme custom for another design')
    if scheme == Scheme.QI_G and split is not None:
        raise click.UsageError('qig keeps T=0.5; use --scheme qitg or custom to set --split')
    if constrained and gain is not None:
        raise click.UsageError('--constrained derives the gain; drop --gain')
    if t_source and scheme != Scheme.QI_T_G:
        raise click.UsageError('--t-source only applies to --scheme qitg')

    extras = {}
    mode = GainMode.CONSTRAINED if constrained else GainMode.FREE
    if gain is not None and scheme in (Scheme.QI_G, Scheme.QI_T_G):
        mode = GainMode.FIXED
        extras['fixed_gain'] = gain
    if scheme == Scheme.QI_T_G:
        if t_source:
            extras['t_source'] = TSource(t_source)
        elif split is not None:
            extras['t_source'] = TSource.EXPLICIT
    return mode, extras


def build_config(scheme, photons, squeeze_db, squeeze_r, loss, gain, split, engine, constrained, t_source):
    """SchemeConfig from command-line flags; invalid combinations are usage errors"""
    scheme = Scheme(scheme)
    r = resolve_squeezing(squeeze_db, squeeze_r)
    mode, extras = design_choices(scheme, gain, split, constrained, t_source)
    try:
        params = ParamPoint(
            N=photons, r=r, l=loss,
            T=0.5 if split is None else split,
            G=gain if gain is not None and scheme == Scheme.CUSTOM else 1.0
        )
        return SchemeConfig(scheme=scheme, params=params, engine=Engine(engine), gain_mode=mode,
                            **extras, **model_defaults())
    except InvalidArgumentError as e:
        raise click.UsageError(str(e))


def parse_values(text, name='values'):
    """'start:stop:step' inclusive range or a comma-separated list"""
    try:
        if ':' in text:
            parts = [float(v) for v in text.split(':')]
            if len(parts) != 3:
                raise click.UsageError(f'{name}: a range is start:stop:step, got {text!r}')
            return inclusive_range(*parts)
        values = tuple(float(v) for v in text.split(',') if v.strip())
    except ValueError as e:
        raise click.UsageError(f'{name}: cannot parse {text!r} ({e})')
    if not values:
        raise click.UsageError(f'{name}: empty value list')
    return values


def fail(error, code=EXIT_EVALUATION):
    """Report an evaluation error as JSON on stderr and exit"""
    if isinstance(error, QIError):
        payload = dict(error.to_dict())
    else:
        payload = {'success': False, 'error': str(error), 'error_code': 'INTERNAL_ERROR'}
    current_app.logger.error(f'{payload["error_code"]}: {payload["error"]}')
    click.echo(json.dumps(output_writer.sanitize(payload), sort_keys=True), err=True)
    click.get_current_context().exit(code)


def evaluation_errors(func):
    """Map QIError raised by the command body to exit code 3"""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except QIError as e:
            fail(e)
    return wrapper


def emit(text, out=None, filename='result.txt'):
    """Write command output to a file or to standard output"""
    if not out:
        click.echo(text, nl=False)
        return
    result = output_writer.write_text(os.path.basename(out) or filename, text, out=out)
    if not result['success']:
        fail(QIError(f'Could not write {out}: {result["error"]}'))
    click.echo(out, err=True)
