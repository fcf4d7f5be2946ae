import csv
import io
import json
import math

import pytest

from app import create_app
from models.param_point import ParamPoint
from utils import closed_form as cf

THEORY_N = 4e14
EXPERIMENT_N = 1.2e15
EXPERIMENT_R = 0.48


@pytest.fixture(scope='session')
def output_dir(tmp_path_factory):
    return tmp_path_factory.mktemp('output')


@pytest.fixture(scope='session')
def app(output_dir):
    """Create application for testing"""
    app = create_app('testing')
    app.config.update({
        'OUTPUT_FOLDER': str(output_dir),
        'TESTING': True
    })
    # re-read the output folder override
    from utils.output_writer import output_writer
    output_writer.init_app(app)

    with app.app_context():
        yield app


@pytest.fixture
def runner(app):
    """Create test CLI runner with separate stdout and stderr"""
    return app.test_cli_runner(mix_stderr=False)


@pytest.fixture(scope='session')
def theory_r():
    """10 dB of input squeezing (s = 0.1)"""
    return cf.squeezing_r(10.0)


@pytest.fixture
def theory_point(theory_r):
    """Operating point of the theory curves at l = 0.9"""
    return ParamPoint(N=THEORY_N, r=theory_r, l=0.9)


@pytest.fixture
def experiment_point():
    """Operating point of the photon-number matched experiment at l = 0.9"""
    return ParamPoint(N=EXPERIMENT_N, r=EXPERIMENT_R, l=0.9)


@pytest.fixture
def sqrt_n():
    return math.sqrt(THEORY_N)


def read_csv(text):
    """Metadata dict and data rows of a CSV payload"""
    metadata, body = {}, []
    for line in text.splitlines():
        if line.startswith('# '):
            key, _, value = line[2:].partition('=')
            metadata[key] = value
        else:
            body.append(line)
    rows = []
    for row in csv.DictReader(io.StringIO('\n'.join(body))):
        # header cells carry their unit as 'name [unit]'
        rows.append({key.split(' [')[0]: value for key, value in row.items()})
    return metadata, rows


def last_json_line(text):
    """Last JSON object line of a stream that may also carry log lines"""
    lines = [line for line in text.splitlines() if line.startswith('{')]
    return json.loads(lines[-1])
