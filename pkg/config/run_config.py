"""
Key-value run files

    # operating point of the loss figure
    scheme = qitg
    squeeze-db = 10
    loss = 0.9
    constrained = false

The file is read with the python-dotenv parser, so quoting and `#` comments
follow .env rules. Keys mirror the command-line flag names; values given on
the command line take precedence over the file.
"""

import io
import os

from dotenv.parser import parse_stream

from utils.errors import InvalidArgumentError

KNOWN_KEYS = {
    'scheme', 'schemes', 'photons', 'squeeze-db', 'squeeze-r', 'loss', 'gain', 'split', 'engine',
    'constrained', 't-source', 'format', 'out', 'gnuplot', 'level', 'loss-list', 'sweep', 'gains',
}

# repeatable flags; several values are separated by ';'
MULTI_KEYS = ('sweep',)
FLAG_KEYS = ('constrained', 'gnuplot')
# keys whose click parameter name differs from the flag name
PARAMETER_NAMES = {'format': 'output_format', 'sweep': 'sweep_entries'}

TRUE_VALUES = ('true', 'yes', 'on', '1')
FALSE_VALUES = ('false', 'no', 'off', '0')


def _convert(key, value, where):
    if key in FLAG_KEYS:
        if value.lower() not in TRUE_VALUES + FALSE_VALUES:
            raise InvalidArgumentError(f'{where}: {key!r} takes true or false, got {value!r}')
        return value.lower() in TRUE_VALUES
    if key in MULTI_KEYS:
        return [part.strip() for part in value.split(';') if part.strip()]
    return value


def parse_run_config(text, source='<string>'):
    """
    Parse run-file text into a click default_map

    Returns:
        dict: Parameter names (hyphens as underscores) mapped to values;
            booleans are converted, everything else stays a string for
            click to convert
    """
    values = {}
    for binding in parse_stream(io.StringIO(text)):
        # a binding's text starts with the blank lines before it
        raw = binding.original.string
        line = binding.original.line + raw[:len(raw) - len(raw.lstrip())].count('\n')
        where = f'{source}:{line}'
        if binding.error or (binding.key is not None and binding.value is None):
            raise InvalidArgumentError(f'{where}: expected "key = value", got {raw.strip()!r}')
        if binding.key is None:
            continue

        key, value = binding.key, binding.value.strip()
        if key not in KNOWN_KEYS:
            raise InvalidArgumentError(f'{where}: unknown key {key!r}')
        if not value:
            raise InvalidArgumentError(f'{where}: empty value for {key!r}')
        values[PARAMETER_NAMES.get(key, key.replace('-', '_'))] = _convert(key, value, where)
    return values


def load_run_config(path):
    if not os.path.isfile(path):
        raise InvalidArgumentError(f'Run file {path!r} does not exist')
    with open(path, encoding='utf-8') as handle:
        return parse_run_config(handle.read(), source=path)
