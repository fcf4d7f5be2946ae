import math
import os
from enum import Enum

from dotenv import load_dotenv

load_dotenv()


class Environment(Enum):
    DEVELOPMENT = 'development'
    TESTING = 'testing'
    PRODUCTION = 'production'


def get_config_name(default='default'):
    """Configuration class selected by QI_ENV (or FLASK_ENV); never touches numeric keys"""
    name = os.getenv('QI_ENV', os.getenv('FLASK_ENV', default))
    try:
        return Environment(name).value
    except ValueError:
        return default


class Config:
    """Base configuration class"""

    TOOL_NAME = 'qi-amp'
    TOOL_VERSION = '1.0.0'

    # Output; the only setting read from the environment
    OUTPUT_FOLDER = os.getenv('QI_OUTPUT_DIR', 'output')
    CSV_SIGNIFICANT_DIGITS = 12

    # Logging
    LOG_LEVEL = 'INFO'

    # Interferometer model
    GAIN_MAX = 1e4
    PROBE_AMPLITUDE = 5e-4
    LOCK_PHASE = math.pi / 2

    # Exact engine finite differences
    FD_STEP = 1e-6
    RICHARDSON_TOLERANCE = 1e-4

    # Optimizer
    GOLDEN_TOLERANCE = 1e-7
    GRID_POINTS = 64
    T_MARGIN = 1e-4

    # Sweeps
    SWEEP_MAX_WORKERS = 1
    SWEEP_MAX_POINTS = 10 ** 6

    # Fock oracle
    FOCK_GUARD_BAND = 4
    FOCK_LEAKAGE_LIMIT = 1e-6

    # Verification suite
    VERIFY_SEED = 20240611
    VERIFY_RANDOM_POINTS = 1000
    VERIFY_FUZZ_SEQUENCES = 500
    VERIFY_FUZZ_MAX_OPS = 50
    VERIFY_FOCK_CUTOFFS = (8, 12, 16)


class DevelopmentConfig(Config):
    """Development configuration"""
    DEBUG = True
    TESTING = False
    LOG_LEVEL = 'DEBUG'


class TestingConfig(Config):
    """Testing configuration"""
    DEBUG = True
    TESTING = True
    LOG_LEVEL = 'WARNING'

    # Smaller suites for testing
    VERIFY_RANDOM_POINTS = 200
    VERIFY_FUZZ_SEQUENCES = 50
    VERIFY_FUZZ_MAX_OPS = 30


class ProductionConfig(Config):
    """Production configuration"""
    DEBUG = False
    TESTING = False


# Configuration mapping
config = {
    'development': DevelopmentConfig,
    'testing': TestingConfig,
    'production': ProductionConfig,
    'default': ProductionConfig
}
