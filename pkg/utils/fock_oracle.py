"""
Brute-force truncated Fock-space simulator

Mirrors the Gaussian engine gate by gate on small circuits so the Gaussian
moments can be checked against direct operator algebra. Gate unitaries are
dense matrix exponentials of generators built with a guard band of extra
levels and read back at the working cutoff. Loss uses a unitary beamsplitter
against an ancilla mode, so states stay pure.
"""

import logging
import warnings
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Tuple

import numpy as np
from scipy.linalg import expm

from models.param_point import ParamPoint
from utils import gaussian_engine as ge
from utils.errors import InvalidArgumentError, TruncationWarning

logger = logging.getLogger(__name__)

MAX_MODES = 4
MIN_CUTOFF = 4
MAX_AMPLITUDES = 10 ** 6
DEFAULT_GUARD_BAND = 4
DEFAULT_LEAKAGE_LIMIT = 1e-6
ORACLE_BOX = {'alpha': 0.8, 'r': 0.3, 'G': 1.5}


@dataclass(frozen=True)
class Gate:
    kind: str
    modes: Tuple[int, ...]
    params: Tuple[float, ...] = ()

    @classmethod
    def displace(cls, mode, x, p=0.0):
        return cls('displace', (mode,), (float(x), float(p)))

    @classmethod
    def squeeze(cls, mode, r, angle=0.0):
        if r < 0:
            raise InvalidArgumentError(f'Squeezing parameter must be >= 0, got {r}')
        return cls('squeeze', (mode,), (float(r), float(angle)))

    @classmethod
    def beamsplit(cls, i, j, T):
        if not 0.0 <= T <= 1.0:
            raise InvalidArgumentError(f'Beamsplitter transmissivity must be in [0, 1], got {T}')
        return cls('beamsplit', (i, j), (float(T),))

    @classmethod
    def phase(cls, mode, phi):
        return cls('phase', (mode,), (float(phi),))

    @classmethod
    def two_mode_squeeze(cls, signal, idler, G):
        if G < 1.0:
            raise InvalidArgumentError(f'Amplitude gain must be >= 1, got {G}')
        return cls('two_mode_squeeze', (signal, idler), (float(G),))

    def inverse(self):
        """Gate sequence undoing this gate"""
        if self.kind == 'displace':
            x, p = self.params
            return [Gate.displace(self.modes[0], -x, -p)]
        if self.kind == 'squeeze':
            r, angle = self.params
            return [Gate.squeeze(self.modes[0], r, angle + np.pi / 2)]
        if self.kind == 'phase':
            return [Gate.phase(self.modes[0], -self.params[0])]
        if self.kind == 'beamsplit':
            i, j = self.modes
            return [Gate.beamsplit(j, i, self.params[0])]
        signal, idler = self.modes
        # a pi phase on the idler flips the sign of the two-mode generator
        return [Gate.phase(idler, np.pi), self, Gate.phase(idler, -np.pi)]


@dataclass(frozen=True)
class FockScenario:
    n_modes: int
    cutoff: int
    amplitudes: np.ndarray
    op_sequence: Tuple[Gate, ...] = ()
    leakage: float = 0.0
    warnings: Tuple[str, ...] = field(default_factory=tuple)

    @property
    def norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    @property
    def truncated(self) -> bool:
        return bool(self.warnings)


class FockMoments(NamedTuple):
    mean: float
    variance: float
    leakage: float


class ChainComparison(NamedTuple):
    cutoff: int
    fock_mean: float
    fock_variance: float
    gaussian_mean: float
    gaussian_variance: float
    mean_deviation: float
    variance_deviation: float
    deviation: float
    leakage: float
    truncation_warning: bool

    def to_dict(self):
        return self._asdict()


def fock_vacuum(n_modes: int, cutoff: int) -> FockScenario:
    if not 1 <= n_modes <= MAX_MODES:
        raise InvalidArgumentError(f'Fock oracle supports 1..{MAX_MODES} modes, got {n_modes}')
    if cutoff < MIN_CUTOFF:
        raise InvalidArgumentError(f'Cutoff must be >= {MIN_CUTOFF}, got {cutoff}')
    if cutoff ** n_modes > MAX_AMPLITUDES:
        raise InvalidArgumentError(f'cutoff^n_modes = {cutoff ** n_modes} exceeds {MAX_AMPLITUDES}')

    amplitudes = np.zeros((cutoff,) * n_modes, dtype=complex)
    amplitudes[(0,) * n_modes] = 1.0
    return FockScenario(n_modes=n_modes, cutoff=cutoff, amplitudes=amplitudes)


def fock_state(n_modes: int, cutoff: int, occupations) -> FockScenario:
    """Number state |n_1, ..., n_k>"""
    scenario = fock_vacuum(n_modes, cutoff)
    if len(occupations) != n_modes or any(not 0 <= n < cutoff for n in occupations):
        raise InvalidArgumentError(f'Invalid occupations {occupations} for cutoff {cutoff}')
    amplitudes = np.zeros_like(scenario.amplitudes)
    amplitudes[tuple(occupations)] = 1.0
    return replace(scenario, amplitudes=amplitudes)


def annihilation(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1)


def _single_mode_unitary(gate: Gate, dim: int) -> np.ndarray:
    a = annihilation(dim)
    ad = a.conj().T
    if gate.kind == 'displace':
        x, p = gate.params
        alpha = (x + 1j * p) / 2.0
        return expm(alpha * ad - np.conj(alpha) * a)
    if gate.kind == 'squeeze':
        r, angle = gate.params
        # P-squeezed at angle 0, matching the Gaussian engine
        gen = (-r * np.exp(-2j * angle) * a @ a + r * np.exp(2j * angle) * ad @ ad) / 2.0
        return expm(gen)
    if gate.kind == 'phase':
        return np.diag(np.exp(1j * gate.params[0] * np.arange(dim)))
    raise InvalidArgumentError(f'Unknown single-mode gate {gate.kind!r}')


def _two_mode_unitary(gate: Gate, dim: int) -> np.ndarray:
    a = annihilation(dim)
    eye = np.eye(dim)
    a1, a2 = np.kron(a, eye), np.kron(eye, a)
    if gate.kind == 'beamsplit':
        theta = np.arccos(np.sqrt(gate.params[0]))
        gen = theta * (a2.conj().T @ a1 - a1.conj().T @ a2)
    elif gate.kind == 'two_mode_squeeze':
        g = np.arccosh(gate.params[0])
        gen = g * (a1.conj().T @ a2.conj().T - a1 @ a2)
    else:
        raise InvalidArgumentError(f'Unknown two-mode gate {gate.kind!r}')
    return expm(gen)


def apply_gate(scenario: FockScenario, gate: Gate, guard_band: int = DEFAULT_GUARD_BAND,
               leakage_limit: float = DEFAULT_LEAKAGE_LIMIT) -> FockScenario:
    """Apply one gate; norm lost to the truncation is accumulated as leakage"""
    modes = gate.modes
    if any(not 0 <= m < scenario.n_modes for m in modes) or len(set(modes)) != len(modes):
        raise InvalidArgumentError(f'Invalid modes {modes} for {scenario.n_modes}-mode scenario')

    c = scenario.cutoff
    dim = c + guard_band
    psi = scenario.amplitudes

    if len(modes) == 1:
        u = _single_mode_unitary(gate, dim)[:c, :c]
        psi = np.moveaxis(np.tensordot(u, psi, axes=([1], [modes[0]])), 0, modes[0])
    else:
        u = _two_mode_unitary(gate, dim).reshape(dim, dim, dim, dim)[:c, :c, :c, :c]
        psi = np.tensordot(u, psi, axes=([2, 3], list(modes)))
        psi = np.moveaxis(psi, [0, 1], list(modes))

    updated = replace(scenario, amplitudes=psi, op_sequence=scenario.op_sequence + (gate,))
    leakage = max(0.0, 1.0 - updated.norm)
    messages = scenario.warnings
    if leakage > leakage_limit and not scenario.warnings:
        message = f'Truncation leakage {leakage:.3e} exceeds {leakage_limit:.1e} at cutoff {c}'
        warnings.warn(message, TruncationWarning)
        logger.warning(message)
        messages = messages + (message,)
    return replace(updated, leakage=leakage, warnings=messages)


def run_circuit(scenario: FockScenario, gates, **kwargs) -> FockScenario:
    for gate in gates:
        scenario = apply_gate(scenario, gate, **kwargs)
    return scenario


def _apply_on_axis(op: np.ndarray, psi: np.ndarray, axis: int) -> np.ndarray:
    return np.moveaxis(np.tensordot(op, psi, axes=([1], [axis])), 0, axis)


def _padded(scenario: FockScenario, levels: int = 1) -> np.ndarray:
    # room above the cutoff so one creation operator acts exactly on the truncated state
    return np.pad(scenario.amplitudes, [(0, levels)] * scenario.n_modes)


def mean_photon_fock(scenario: FockScenario, mode: int) -> float:
    psi = scenario.amplitudes
    n = np.arange(scenario.cutoff, dtype=float)
    weights = np.abs(psi) ** 2
    occupation = np.tensordot(weights, n, axes=([mode], [0]))
    return float(occupation.sum() / scenario.norm)


def quadrature_moments(scenario: FockScenario):
    """Mean vector and symmetrized covariance in the (X, P) convention of the Gaussian engine"""
    psi = _padded(scenario)
    dim = scenario.cutoff + 1
    a = annihilation(dim)
    ad = a.conj().T
    x_op, p_op = a + ad, 1j * (ad - a)
    norm = scenario.norm

    vectors = []
    for mode in range(scenario.n_modes):
        vectors.append(_apply_on_axis(x_op, psi, mode))
        vectors.append(_apply_on_axis(p_op, psi, mode))

    size = 2 * scenario.n_modes
    mean = np.array([np.vdot(psi, v).real / norm for v in vectors])
    second = np.empty((size, size))
    for k in range(size):
        for m in range(k, size):
            second[k, m] = second[m, k] = np.vdot(vectors[k], vectors[m]).real / norm
    return mean, second - np.outer(mean, mean)


def nminus_stats_fock(scenario: FockScenario, i: int, j: int, phi: float = 0.0) -> FockMoments:
    """Exact mean and variance of J(phi) = a_i^dag a_j e^{i phi} + h.c. on the truncated state"""
    if i == j:
        raise InvalidArgumentError(f'Two distinct modes are required, got {i} twice')
    psi = _padded(scenario)
    a = annihilation(scenario.cutoff + 1)
    ad = a.conj().T

    forward = _apply_on_axis(ad, _apply_on_axis(a, psi, j), i)
    backward = _apply_on_axis(ad, _apply_on_axis(a, psi, i), j)
    j_psi = np.exp(1j * phi) * forward + np.exp(-1j * phi) * backward

    norm = scenario.norm
    mean = np.vdot(psi, j_psi).real / norm
    second = np.vdot(j_psi, j_psi).real / norm
    return FockMoments(mean=float(mean), variance=float(max(second - mean ** 2, 0.0)),
                       leakage=scenario.leakage)


def chain_gates(params: ParamPoint, lock_phase: float = np.pi / 2):
    """Gate list of the four-mode interferometer: reference, signal, amplifier idler, loss ancilla"""
    return [
        Gate.displace(0, 2.0 * np.sqrt(params.N)),
        Gate.squeeze(1, params.r),
        Gate.beamsplit(0, 1, params.T),
        Gate.two_mode_squeeze(1, 2, params.G),
        Gate.phase(1, lock_phase),
        Gate.beamsplit(1, 3, 1.0 - params.l),
    ]


def gaussian_chain(params: ParamPoint, lock_phase: float = np.pi / 2) -> ge.GaussianState:
    state = ge.vacuum(4)
    state = ge.displace(state, 0, 2.0 * np.sqrt(params.N), 0.0)
    state = ge.squeeze(state, 1, params.r)
    state = ge.beamsplit(state, 0, 1, params.T)
    state = ge.amplify(state, 1, 2, params.G)
    state = ge.phase(state, 1, lock_phase)
    return ge.attenuate(state, 1, 3, params.l)


def full_chain_check(params: ParamPoint, cutoff: int, lock_phase: float = np.pi / 2,
                     guard_band: int = DEFAULT_GUARD_BAND,
                     leakage_limit: float = DEFAULT_LEAKAGE_LIMIT) -> ChainComparison:
    """Compare truncated-Fock and Gaussian moments of J at the lock phase"""
    alpha = float(np.sqrt(params.N))
    if alpha > ORACLE_BOX['alpha'] or params.r > ORACLE_BOX['r'] or params.G > ORACLE_BOX['G']:
        raise InvalidArgumentError(
            f'Oracle box is alpha <= {ORACLE_BOX["alpha"]}, r <= {ORACLE_BOX["r"]}, G <= {ORACLE_BOX["G"]}; '
            f'got alpha={alpha:.4g}, r={params.r:.4g}, G={params.G:.4g}'
        )

    with warnings.catch_warnings():
        warnings.simplefilter('ignore', TruncationWarning)
        scenario = run_circuit(fock_vacuum(4, cutoff), chain_gates(params, lock_phase),
                               guard_band=guard_band, leakage_limit=leakage_limit)
    fock = nminus_stats_fock(scenario, 0, 1)
    gauss = ge.nminus_exact(gaussian_chain(params, lock_phase), 0, 1)

    scale = np.sqrt(gauss.variance) if gauss.variance > 0 else 1.0
    mean_dev = abs(fock.mean - gauss.mean) / scale
    var_dev = abs(fock.variance - gauss.variance) / gauss.variance if gauss.variance > 0 else abs(fock.variance)
    logger.debug('Fock chain check cutoff=%d leakage=%.3e var_dev=%.3e', cutoff, scenario.leakage, var_dev)

    return ChainComparison(
        cutoff=cutoff,
        fock_mean=fock.mean,
        fock_variance=fock.variance,
        gaussian_mean=gauss.mean,
        gaussian_variance=gauss.variance,
        mean_deviation=float(mean_dev),
        variance_deviation=float(var_dev),
        deviation=float(max(mean_dev, var_dev)),
        leakage=scenario.leakage,
        truncation_warning=scenario.truncated
    )
