import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

from models.param_point import ParamPoint
from utils.errors import InvalidArgumentError

DEFAULT_LOCK_PHASE = math.pi / 2
DEFAULT_PROBE_AMPLITUDE = 5e-4
MAX_PROBE_AMPLITUDE = 0.1


class Scheme(Enum):
    CQI = 'cqi'
    QI_G = 'qig'
    QI_T_G = 'qitg'
    CUSTOM = 'custom'


class Engine(Enum):
    CLOSED_FORM = 'closed'
    GAUSSIAN_LINEARIZED = 'linear'
    GAUSSIAN_EXACT = 'exact'

    @property
    def label(self) -> str:
        return {
            'closed': 'closed-form',
            'linear': 'gaussian-linearized',
            'exact': 'gaussian-exact',
        }[self.value]


class GainMode(Enum):
    FREE = 'free'
    CONSTRAINED = 'constrained-photon-number'
    FIXED = 'fixed'


class TSource(Enum):
    ANALYTIC = 'analytic'
    OPTIMIZED = 'optimized'
    EXPLICIT = 'explicit'


@dataclass(frozen=True)
class SchemeConfig:
    """Interferometer scheme plus everything needed to evaluate it"""

    scheme: Scheme
    params: ParamPoint
    engine: Engine = Engine.CLOSED_FORM
    lock_phase: float = DEFAULT_LOCK_PHASE
    probe_amplitude: float = DEFAULT_PROBE_AMPLITUDE
    gain_mode: GainMode = GainMode.FREE
    fixed_gain: Optional[float] = None
    t_source: Optional[TSource] = None
    g_max: float = 1e4
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        errors = []
        if not 0.0 < self.lock_phase < math.pi:
            errors.append(f'lock_phase must be in (0, pi), got {self.lock_phase}')
        if not 0.0 < self.probe_amplitude <= MAX_PROBE_AMPLITUDE:
            errors.append(f'probe_amplitude must be in (0, {MAX_PROBE_AMPLITUDE}], got {self.probe_amplitude}')
        if self.gain_mode == GainMode.FIXED:
            if self.fixed_gain is None or not self.fixed_gain >= 1.0 or not math.isfinite(self.fixed_gain):
                errors.append(f'fixed gain mode needs a finite gain >= 1, got {self.fixed_gain}')
        elif self.fixed_gain is not None:
            errors.append('fixed_gain is only used with the fixed gain mode')
        if self.t_source is not None and self.scheme != Scheme.QI_T_G:
            errors.append(f'T source only applies to the qitg scheme, not {self.scheme.value}')
        if not self.g_max >= 1.0:
            errors.append(f'g_max must be >= 1, got {self.g_max}')
        if errors:
            raise InvalidArgumentError('; '.join(errors), details={'errors': errors})

    @property
    def resolved_t_source(self) -> TSource:
        if self.scheme == Scheme.QI_T_G:
            if self.t_source is not None:
                return self.t_source
            if self.gain_mode == GainMode.CONSTRAINED:
                return TSource.OPTIMIZED
            return TSource.ANALYTIC
        if self.scheme == Scheme.CUSTOM:
            return TSource.EXPLICIT
        return TSource.ANALYTIC

    def with_params(self, **changes) -> 'SchemeConfig':
        return replace(self, params=self.params.with_(**changes))

    def to_dict(self):
        return {
            'scheme': self.scheme.value,
            'params': self.params.to_dict(),
            'engine': self.engine.label,
            'lock_phase': self.lock_phase,
            'probe_amplitude': self.probe_amplitude,
            'gain_mode': self.gain_mode.value,
            'fixed_gain': self.fixed_gain,
            't_source': self.resolved_t_source.value,
            'g_max': self.g_max
        }
