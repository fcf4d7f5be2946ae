import logging
import math
from dataclasses import replace
from typing import Dict, List, NamedTuple, Tuple

from models.gain import GainSpec
from models.metrics import Metrics
from models.param_point import ParamPoint
from models.scheme_config import Engine, GainMode, Scheme, SchemeConfig, TSource
from services.optimizer_service import design_optimizer
from utils import closed_form as cf
from utils import gaussian_engine as ge
from utils.errors import InvalidArgumentError, SensitivityUndefinedError, SlopeUnstableError

logger = logging.getLogger(__name__)

# reference arm, squeezed port / signal arm, amplifier idler, loss ancilla
MODES = ('a0', 's0', 'w', 'v')
REFERENCE, SIGNAL, IDLER, ANCILLA = range(4)

SOURCE_TAGS = (
    ge.SourceTag(ge.SourceKind.COHERENT_INPUT),
    ge.SourceTag(ge.SourceKind.SQUEEZED_INPUT),
    ge.SourceTag(ge.SourceKind.AMPLIFIER_IDLER),
    ge.SourceTag(ge.SourceKind.LOSS_VACUUM),
)

LOSS_GROUP = 'loss-induced'
AMPLIFICATION_GROUP = 'amplification-associated'
M_CONVENTION = 'scheme re-resolved at r=0 (T and G re-derived by the scheme rules)'


class CircuitOp(NamedTuple):
    kind: str
    modes: Tuple[str, ...]
    params: Dict[str, float]


class Design(NamedTuple):
    """Resolved splitting ratio and gain of a scheme at one parameter point"""
    T: float
    gain: GainSpec
    t_source: TSource


class Measurement(NamedTuple):
    signal_slope: float
    noise_std: float
    breakdown: Dict[str, float]
    gain_used: GainSpec
    gain_normalized: bool

    @property
    def delta_phi(self) -> float:
        return self.noise_std / self.signal_slope


_GAUSSIAN_OPS = {
    'displace': lambda s, m, p: ge.displace(s, m[0], p['x'], p['p']),
    'squeeze': lambda s, m, p: ge.squeeze(s, m[0], p['r'], p['angle']),
    'beamsplit': lambda s, m, p: ge.beamsplit(s, m[0], m[1], p['T']),
    'amplify': lambda s, m, p: ge.amplify(s, m[0], m[1], p['G']),
    'phase': lambda s, m, p: ge.phase(s, m[0], p['phi']),
    'attenuate': lambda s, m, p: ge.attenuate(s, m[0], m[1], p['l']),
}


def run_gaussian(ops: List[CircuitOp]):
    """Apply a circuit op list to the tagged four-mode vacuum"""
    state = ge.vacuum(len(MODES), tags=SOURCE_TAGS)
    for op in ops:
        modes = [MODES.index(name) for name in op.modes]
        state = _GAUSSIAN_OPS[op.kind](state, modes, op.params)
    return state


class SchemeEvaluator:
    """Builds and evaluates the CQI, QI^G and QI_T^G interferometers"""

    def __init__(self):
        self.fd_step = 1e-6
        self.richardson_tolerance = 1e-4

    def init_app(self, app):
        """Initialize with Flask app"""
        self.fd_step = app.config.get('FD_STEP', 1e-6)
        self.richardson_tolerance = app.config.get('RICHARDSON_TOLERANCE', 1e-4)

    def resolve(self, config: SchemeConfig) -> Design:
        """Splitting ratio and gain the scheme uses at config.params"""
        p = config.params
        if config.scheme == Scheme.CQI:
            return Design(0.5, GainSpec.finite(1.0), TSource.ANALYTIC)

        t_source = config.resolved_t_source
        if config.scheme == Scheme.QI_G:
            T = 0.5
        elif config.scheme == Scheme.CUSTOM or t_source == TSource.EXPLICIT:
            T = p.T
        elif t_source == TSource.ANALYTIC:
            T = cf.t_opt(p.l, p.r)
        else:
            T = self._optimized_t(config)

        if config.gain_mode == GainMode.FIXED:
            gain = GainSpec.finite(config.fixed_gain)
        elif config.gain_mode == GainMode.CONSTRAINED:
            gain = GainSpec.finite(cf.constrained_gain(T, p.l))
        elif config.scheme == Scheme.CUSTOM:
            gain = GainSpec.finite(p.G)
        else:
            gain = cf.g_opt(p.l) if p.l < 1.0 else GainSpec.finite(1.0)
        return Design(T, gain, t_source)

    def _optimized_t(self, config: SchemeConfig) -> float:
        p = config.params
        if config.gain_mode == GainMode.FIXED:
            best = design_optimizer.minimize_over_t(
                lambda t: cf.sensitivity(p.with_(T=t, G=config.fixed_gain))
            )
            return best.x
        return design_optimizer.minimize_sensitivity(p.l, p.r, p.N, mode=config.gain_mode,
                                                     g_max=config.g_max).t_star

    def build_circuit(self, config: SchemeConfig, design: Design = None, phase_offset: float = 0.0):
        """Gate sequence of the interferometer; the balanced recombiner lives in the observable"""
        design = design or self.resolve(config)
        p = config.params
        G = config.g_max if design.gain.is_asymptotic else design.gain.value
        ops = [
            CircuitOp('displace', ('a0',), {'x': 2.0 * math.sqrt(p.N), 'p': 0.0}),
            CircuitOp('squeeze', ('s0',), {'r': p.r, 'angle': 0.0}),
            CircuitOp('beamsplit', ('a0', 's0'), {'T': design.T}),
            CircuitOp('amplify', ('s0', 'w'), {'G': G}),
            CircuitOp('phase', ('s0',), {'phi': config.lock_phase + phase_offset}),
            CircuitOp('attenuate', ('s0', 'v'), {'l': p.l}),
        ]
        logger.debug('Circuit for %s: T=%.6g G=%.6g', config.scheme.value, design.T, G)
        return ops

    def _closed_form(self, p: ParamPoint, design: Design) -> Measurement:
        q = p.with_(T=design.T, G=1.0 if design.gain.is_asymptotic else design.gain.value)
        if design.gain.is_asymptotic:
            # per unit gain: every share is divided by G^2
            breakdown = {
                'coherent-input': 0.0,
                'squeezed-input': (1.0 - q.l) * q.s * q.N,
                'amplifier-idler': q.T * (1.0 - q.l) * q.N,
                'loss-vacuum': 0.0,
            }
            return Measurement(cf.signal_asymptotic(q), cf.noise_asymptotic(q), breakdown,
                               design.gain, True)

        G2 = q.G ** 2
        breakdown = {
            'coherent-input': 0.0,
            'squeezed-input': G2 * (1.0 - q.l) * q.s * q.N,
            'amplifier-idler': q.T * (1.0 - q.l) * (G2 - 1.0) * q.N,
            'loss-vacuum': q.T * q.l * q.N,
        }
        return Measurement(cf.signal_eq1(q), cf.noise_eq2(q), breakdown, design.gain, False)

    def _gain_used(self, config, design):
        if design.gain.is_asymptotic:
            return GainSpec.asymptotic(config.g_max)
        return design.gain

    def _linearized(self, config: SchemeConfig, design: Design) -> Measurement:
        state = run_gaussian(self.build_circuit(config, design))
        coeffs = ge.nminus_coefficients(state, REFERENCE, SIGNAL)
        stats = ge.linear_observable_stats(state, coeffs)
        slope = abs(ge.nminus_mean_slope(state, REFERENCE, SIGNAL))
        breakdown = {tag.name: value for tag, value in stats.breakdown.items()}
        return Measurement(slope, math.sqrt(stats.variance), breakdown,
                           self._gain_used(config, design), False)

    def _exact(self, config: SchemeConfig, design: Design) -> Measurement:
        state = run_gaussian(self.build_circuit(config, design))

        # the probe rotation commutes with the loss beamsplitter, so it is
        # applied to the detected signal mode at measurement time
        def mean_at(offset):
            return ge.nminus_exact(state, REFERENCE, SIGNAL, offset).mean

        def central(h):
            return (mean_at(h) - mean_at(-h)) / (2.0 * h)

        h = self.fd_step
        coarse, fine = central(h), central(h / 2.0)
        scale = max(abs(fine), abs(coarse))
        if scale == 0.0:
            raise SensitivityUndefinedError('Zero interference slope at the lock', details=config.to_dict())
        if abs(coarse - fine) > self.richardson_tolerance * scale:
            raise SlopeUnstableError(
                f'Finite-difference slope disagrees between h and h/2: {coarse:.9g} vs {fine:.9g}',
                details={'h': h, 'slope_h': coarse, 'slope_h2': fine}
            )
        slope = abs((4.0 * fine - coarse) / 3.0)
        variance = ge.nminus_exact(state, REFERENCE, SIGNAL).variance
        return Measurement(slope, math.sqrt(variance), {}, self._gain_used(config, design), False)

    def measure(self, config: SchemeConfig, design: Design = None) -> Measurement:
        """Signal slope and noise of one configuration through the selected engine"""
        design = design or self.resolve(config)
        if config.engine == Engine.CLOSED_FORM:
            result = self._closed_form(config.params, design)
        elif config.engine == Engine.GAUSSIAN_LINEARIZED:
            result = self._linearized(config, design)
        elif config.engine == Engine.GAUSSIAN_EXACT:
            result = self._exact(config, design)
        else:
            raise InvalidArgumentError(f'Unknown engine {config.engine!r}')

        if not result.signal_slope > 0:
            raise SensitivityUndefinedError(
                f'Zero interference signal for {config.scheme.value} at T={design.T:.6g}, l={config.params.l:g}',
                details=config.to_dict()
            )
        return result

    def lossless_optimum(self, config: SchemeConfig) -> SchemeConfig:
        """The same scheme at l=0 with its gain left free (unit gain for a custom design)"""
        changes = {'l': 0.0}
        if config.scheme == Scheme.CUSTOM:
            changes['G'] = 1.0
        return replace(config, params=config.params.with_(**changes),
                       gain_mode=GainMode.FREE, fixed_gain=None)

    def evaluate(self, config: SchemeConfig) -> Metrics:
        """Full metric set of one configuration"""
        p = config.params
        design = self.resolve(config)
        main = self.measure(config, design)
        delta_phi = main.delta_phi

        # quantum enhancement against the scheme re-resolved without squeezing
        unsqueezed = config.with_params(r=0.0)
        reference = self.measure(unsqueezed, self.resolve(unsqueezed))
        M_db = -cf.ratio_db(delta_phi, reference.delta_phi)
        fixed_reference = self.measure(unsqueezed, design)
        M_fixed_db = -cf.ratio_db(delta_phi, fixed_reference.delta_phi)

        lossless = self.lossless_optimum(config)
        lossless_design = self.resolve(lossless)
        baseline = self.measure(lossless, lossless_design)
        degradation_db = cf.ratio_db(delta_phi, baseline.delta_phi)

        rel_snr_db = -20.0 * math.log10(delta_phi * math.sqrt(p.N))
        beyond_sql_db = cf.ratio_db(cf.sql(p.N), delta_phi)

        metadata = {
            'scheme': config.scheme.value,
            'engine': config.engine.label,
            'params': p.to_dict(),
            'gain_mode': config.gain_mode.value,
            't_source': design.t_source.value,
            'T_used': design.T,
            'gain_used': main.gain_used.to_dict(),
            'gain_normalized': main.gain_normalized,
            'lock_phase': config.lock_phase,
            'probe_amplitude': config.probe_amplitude,
            'probe_response': main.signal_slope * config.probe_amplitude,
            'M_convention': M_CONVENTION,
            'M_fixed_config_db': M_fixed_db,
            'degradation_baseline': {
                'l': 0.0,
                'T': lossless_design.T,
                'gain': lossless_design.gain.to_dict(),
                'delta_phi': baseline.delta_phi
            },
        }
        if config.engine == Engine.GAUSSIAN_EXACT:
            metadata['breakdown'] = 'not available for the exact engine'

        metrics = Metrics(
            signal_slope=main.signal_slope,
            noise_std=main.noise_std,
            delta_phi=delta_phi,
            M_db=M_db,
            rel_snr_db=rel_snr_db,
            beyond_sql_db=beyond_sql_db,
            degradation_db=degradation_db,
            breakdown=main.breakdown,
            metadata=metadata
        )
        logger.debug('Evaluated %s: %r', config.scheme.value, metrics)
        return metrics

    def noise_breakdown(self, config: SchemeConfig) -> dict:
        """
        Per-source noise variance of the linearized intensity difference

        Groups: loss-induced is the loss-vacuum share; amplification-associated
        collects the coherent, squeezed and idler shares. The grouping is a
        convention, the per-source shares are exact.
        """
        config = replace(config, engine=Engine.GAUSSIAN_LINEARIZED)
        design = self.resolve(config)
        result = self.measure(config, design)
        shares = result.breakdown
        groups = {
            LOSS_GROUP: shares.get('loss-vacuum', 0.0),
            AMPLIFICATION_GROUP: sum(v for k, v in shares.items() if k != 'loss-vacuum'),
        }
        return {
            'total': result.noise_std ** 2,
            'shares': dict(shares),
            'groups': groups,
            'signal_slope': result.signal_slope,
            'T_used': design.T,
            'gain_used': result.gain_used.to_dict(),
            'convention': 'loss-induced = loss-vacuum; amplification-associated = coherent + squeezed + idler'
        }


# Global scheme evaluator instance
scheme_evaluator = SchemeEvaluator()
