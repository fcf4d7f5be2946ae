import click
from flask import Blueprint, current_app

from commands.common import EXIT_VERIFICATION_FAILED, config_option, emit
from tasks.verification_tasks import LEVELS, verification_tasks
from utils.output_writer import output_writer

verify_bp = Blueprint('verify', __name__, cli_group=None)


@verify_bp.cli.command('verify')
@config_option
@click.option('--level', type=click.Choice(LEVELS), default='fast', show_default=True)
@click.option('--out', type=click.Path(dir_okay=False), default=None, help='Write the JSON report to a file.')
def verify(level, out):
    """Run the verification suite; exit code 1 if any check fails."""
    report = verification_tasks.run(level)
    emit(output_writer.render_json(report), out, f'verify-{level}.json')

    for check in report.checks:
        click.echo(f'{"PASS" if check.passed else "FAIL"} {check.name}', err=True)
    if not report.passed:
        current_app.logger.error(f'{len(report.failures)} verification check(s) failed')
        click.get_current_context().exit(EXIT_VERIFICATION_FAILED)
