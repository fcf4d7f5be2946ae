# Models package initialization

from .gain import GainSpec
from .metrics import Metrics
from .optimization import OptimizationOutcome
from .param_point import ParamPoint
from .scheme_config import Engine, GainMode, Scheme, SchemeConfig, TSource
from .sweep import CurveSeries, SweepSpec
from .verification import CheckResult, VerificationReport

__all__ = [
    'GainSpec',
    'Metrics',
    'OptimizationOutcome',
    'ParamPoint',
    'Engine',
    'GainMode',
    'Scheme',
    'SchemeConfig',
    'TSource',
    'CurveSeries',
    'SweepSpec',
    'CheckResult',
    'VerificationReport'
]
