"""
Analytic signal, noise and sensitivity of the amplifier-empowered interferometer

T is the coefficient of the loss-vacuum term in the noise, i.e. the reference
arm carries T*N photons and the signal arm (1-T)*N. Asymptotic gain is always
handled through the dedicated per-unit-gain expressions, never as an
infinite float.
"""

import math

from models.gain import GainSpec
from models.param_point import ParamPoint
from utils.errors import (
    ConstraintInfeasibleError,
    InternalConsistencyError,
    InvalidArgumentError,
    SensitivityUndefinedError,
)

TRANSITION_LOSS = 0.5
RADICAND_TOLERANCE = 1e-12
FEASIBILITY_TOLERANCE = 1e-12


def signal_eq1(p: ParamPoint) -> float:
    """Small-signal slope |d<N->/dphi| at the pi/2 lock"""
    return 2.0 * math.sqrt((1.0 - p.l) * (1.0 - p.T) * p.T) * p.G * p.N


def _noise_radicand(p: ParamPoint) -> float:
    return p.G ** 2 * (1.0 - p.l) * (p.T + p.s) + p.T * (2.0 * p.l - 1.0)


def noise_eq2(p: ParamPoint) -> float:
    """Standard deviation of the intensity difference at the lock"""
    radicand = _noise_radicand(p)
    if radicand < 0:
        scale = p.G ** 2 * (1.0 - p.l) * (p.T + p.s) + p.T
        if radicand < -RADICAND_TOLERANCE * max(scale, 1.0):
            raise InternalConsistencyError(
                f'Negative noise radicand {radicand:.3e}; gain below 1?',
                details=p.to_dict()
            )
        radicand = 0.0
    return math.sqrt(radicand * p.N)


def sensitivity(p: ParamPoint) -> float:
    signal = signal_eq1(p)
    if signal <= 0:
        raise SensitivityUndefinedError(
            f'Zero interference signal at T={p.T}, l={p.l}; phase sensitivity is undefined',
            details=p.to_dict()
        )
    return noise_eq2(p) / signal


def signal_asymptotic(p: ParamPoint) -> float:
    """Signal per unit gain in the G -> infinity limit"""
    return 2.0 * math.sqrt((1.0 - p.l) * (1.0 - p.T) * p.T) * p.N


def noise_asymptotic(p: ParamPoint) -> float:
    """Noise per unit gain in the G -> infinity limit"""
    return math.sqrt((1.0 - p.l) * (p.T + p.s) * p.N)


def sensitivity_asymptotic(p: ParamPoint) -> float:
    """G -> infinity limit of the sensitivity; independent of l for l < 1"""
    if p.l >= 1.0 or p.T <= 0.0 or p.T >= 1.0:
        raise SensitivityUndefinedError(
            f'Asymptotic sensitivity undefined at T={p.T}, l={p.l}',
            details=p.to_dict()
        )
    return math.sqrt((p.s + p.T) / (4.0 * (1.0 - p.T) * p.T)) / math.sqrt(p.N)


def sql(N: float) -> float:
    if N <= 0:
        raise InvalidArgumentError(f'Photon number must be positive, got {N}')
    return 1.0 / math.sqrt(N)


def enhancement_M(p: ParamPoint) -> float:
    """Quantum enhancement in dB with (T, G, l, N) held fixed and r -> 0 as reference"""
    return -ratio_db(sensitivity(p), sensitivity(p.with_(r=0.0)))


def relative_snr_db(p: ParamPoint) -> float:
    """SNR relative to the coherent lossless balanced interferometer at the same N"""
    noise = noise_eq2(p)
    if noise <= 0:
        raise SensitivityUndefinedError('Zero noise; relative SNR is undefined', details=p.to_dict())
    return 20.0 * math.log10(signal_eq1(p) / noise * math.sqrt(p.N) / p.N)


def relative_snr_asymptotic_db(p: ParamPoint) -> float:
    """G -> infinity plateau of the relative SNR; independent of l for l < 1"""
    if p.l >= 1.0 or p.T <= 0.0 or p.T >= 1.0:
        raise SensitivityUndefinedError(
            f'Asymptotic relative SNR undefined at T={p.T}, l={p.l}',
            details=p.to_dict()
        )
    return 20.0 * math.log10(signal_asymptotic(p) / (noise_asymptotic(p) * math.sqrt(p.N)))


def _check_loss(l: float) -> None:
    if not 0.0 <= l < 1.0:
        raise InvalidArgumentError(f'Loss rate must be in [0, 1), got {l}')


def varsigma(l: float, r: float) -> float:
    return (1.0 - 1.0 / l) * math.exp(-2.0 * r)


def t_opt(l: float, r: float) -> float:
    """Optimal BS1 splitting at the optimal gain"""
    _check_loss(l)
    if r < 0:
        raise InvalidArgumentError(f'Squeezing parameter must be >= 0, got {r}')
    if l == 0.0:
        return 0.5
    if l <= TRANSITION_LOSS:
        z = varsigma(l, r)
        # z + sqrt(z^2 - z) rationalized; z < 0 so both terms stay positive
        return -z / (math.sqrt(z * z - z) - z)
    s = math.exp(-2.0 * r)
    return s * (math.sqrt(1.0 + 1.0 / s) - 1.0)


def g_opt(l: float) -> GainSpec:
    """Unit gain up to the transition loss, unbounded gain above it"""
    _check_loss(l)
    if l <= TRANSITION_LOSS:
        return GainSpec.finite(1.0)
    return GainSpec.asymptotic()


def sensitivity_opt(l: float, r: float, N: float) -> float:
    T = t_opt(l, r)
    s = math.exp(-2.0 * r)
    if l <= TRANSITION_LOSS:
        value = math.sqrt(T * l + (1.0 - l) * s) / math.sqrt(4.0 * (1.0 - T) * T * (1.0 - l))
    else:
        value = math.sqrt((s + T) / (4.0 * (1.0 - T) * T))
    return value / math.sqrt(N)


def constrained_gain(T: float, l: float) -> float:
    """Gain keeping the detected photon flux at its lossless level: 2 G sqrt((1-l)(1-T)T) = 1"""
    if not 0.0 <= T <= 1.0 or not 0.0 <= l <= 1.0:
        raise InvalidArgumentError(f'T and l must be in [0, 1], got T={T}, l={l}')
    product = 2.0 * math.sqrt((1.0 - l) * (1.0 - T) * T)
    if product <= 0.0:
        raise ConstraintInfeasibleError(
            f'No finite gain matches the photon number at T={T}, l={l}',
            details={'T': T, 'l': l}
        )
    if product > 1.0 + FEASIBILITY_TOLERANCE:
        raise ConstraintInfeasibleError(
            f'Photon-number matching at T={T}, l={l} would need G={1.0 / product:.6g} < 1',
            details={'T': T, 'l': l, 'required_gain': 1.0 / product}
        )
    return max(1.0, 1.0 / product)


def squeezing_db(r: float) -> float:
    """dB below vacuum of the squeezed quadrature, -10 log10 e^{-2r}"""
    return 20.0 * r / math.log(10.0)


def squeezing_r(db: float) -> float:
    if db < 0:
        raise InvalidArgumentError(f'Squeezing in dB must be >= 0, got {db}')
    return db * math.log(10.0) / 20.0


def ratio_db(a: float, b: float) -> float:
    """Amplitude-ratio decibels, 20 log10(a / b)"""
    return 20.0 * math.log10(a / b)


def equivalent_photon_factor(gain_db: float) -> float:
    """Multiple of coherent photon number that buys the same sensitivity gain"""
    return 10.0 ** (gain_db / 10.0)


def sensitivity_degradation_db(p: ParamPoint) -> float:
    """dB by which δφ at p trails the lossless optimum e^{-r}/sqrt(N) of every scheme"""
    return ratio_db(sensitivity(p), sensitivity_opt(0.0, p.r, p.N))


def enhancement_degradation_db(p: ParamPoint) -> float:
    """Lossless M (equal to the squeezing in dB) minus the fixed-configuration M at p"""
    return squeezing_db(p.r) - enhancement_M(p)
