"""
Multimode Gaussian-state engine

Quadrature order is (X1, P1, ..., Xn, Pn) with X = a + a^dagger and
P = i(a^dagger - a), so the vacuum covariance is the identity. A state keeps
the cumulative symplectic map S together with the independent input source
blocks; the current covariance is S sigma_in S^T. Keeping S (instead of only
sigma) lets every variance be attributed exactly to the source it came from.

All operations return new states.
"""

import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import Dict, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from utils.errors import InvalidArgumentError, PreconditionViolationError

logger = logging.getLogger(__name__)

PHYSICALITY_TOLERANCE = 1e-9
VACUUM_TOLERANCE = 1e-9


class SourceKind(Enum):
    COHERENT_INPUT = 'coherent-input'
    SQUEEZED_INPUT = 'squeezed-input'
    AMPLIFIER_IDLER = 'amplifier-idler'
    LOSS_VACUUM = 'loss-vacuum'
    OTHER = 'other'


@dataclass(frozen=True)
class SourceTag:
    kind: SourceKind
    label: str = ''

    def __post_init__(self):
        if self.kind == SourceKind.OTHER and not self.label:
            raise InvalidArgumentError('Source tags of kind "other" need a label')

    @property
    def name(self) -> str:
        if not self.label:
            return self.kind.value
        if self.kind == SourceKind.OTHER:
            return self.label
        return f'{self.kind.value}:{self.label}'

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class SourceBlock:
    tag: SourceTag
    modes: Tuple[int, ...]
    covariance: np.ndarray


@dataclass(frozen=True)
class GaussianState:
    n_modes: int
    displacement: np.ndarray
    cumulative_map: np.ndarray
    source_blocks: Tuple[SourceBlock, ...]

    @property
    def input_covariance(self) -> np.ndarray:
        sigma_in = np.zeros((2 * self.n_modes, 2 * self.n_modes))
        for block in self.source_blocks:
            idx = quadrature_indices(block.modes)
            sigma_in[np.ix_(idx, idx)] = block.covariance
        return sigma_in

    @property
    def covariance(self) -> np.ndarray:
        s = self.cumulative_map
        sigma = s @ self.input_covariance @ s.T
        return (sigma + sigma.T) / 2

    def marginal(self, mode: int) -> Tuple[np.ndarray, np.ndarray]:
        """Mean vector and 2x2 covariance of one mode"""
        _check_mode(self, mode)
        idx = [2 * mode, 2 * mode + 1]
        return self.displacement[idx].copy(), self.covariance[np.ix_(idx, idx)]

    def tags(self) -> Tuple[SourceTag, ...]:
        return tuple(block.tag for block in self.source_blocks)


class PhysicalityReport(NamedTuple):
    passed: bool
    symplectic_error: float
    min_eigenvalue: float
    failed_blocks: Tuple[str, ...]

    def to_dict(self):
        return {
            'passed': self.passed,
            'symplectic_error': self.symplectic_error,
            'min_eigenvalue': self.min_eigenvalue,
            'failed_blocks': list(self.failed_blocks)
        }


class NminusMoments(NamedTuple):
    mean: float
    variance: float


class ObservableStats(NamedTuple):
    variance: float
    breakdown: Dict[SourceTag, float]


def omega(n_modes: int) -> np.ndarray:
    """Symplectic form, direct sum of [[0, 1], [-1, 0]]"""
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def quadrature_indices(modes: Sequence[int]):
    idx = []
    for mode in modes:
        idx.extend([2 * mode, 2 * mode + 1])
    return idx


def rotation(angle: float) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]])


def vacuum(n_modes: int, tags: Optional[Sequence[SourceTag]] = None) -> GaussianState:
    """Vacuum on n_modes modes, one identity source block per mode"""
    if not isinstance(n_modes, (int, np.integer)) or n_modes < 1:
        raise InvalidArgumentError(f'n_modes must be a positive integer, got {n_modes!r}')
    if tags is None:
        tags = [SourceTag(SourceKind.OTHER, f'mode-{k}') for k in range(n_modes)]
    if len(tags) != n_modes:
        raise InvalidArgumentError(f'Expected {n_modes} source tags, got {len(tags)}')
    if len(set(tags)) != len(tags):
        raise InvalidArgumentError('Source tags must be unique')

    blocks = tuple(
        SourceBlock(tag=tag, modes=(k,), covariance=np.eye(2))
        for k, tag in enumerate(tags)
    )
    return GaussianState(
        n_modes=n_modes,
        displacement=np.zeros(2 * n_modes),
        cumulative_map=np.eye(2 * n_modes),
        source_blocks=blocks
    )


def from_covariance(covariance, displacement=None, tag: Optional[SourceTag] = None) -> GaussianState:
    """Wrap a hand-built covariance as a single-source state (not validated, see check_physical)"""
    covariance = np.asarray(covariance, dtype=float)
    if covariance.ndim != 2 or covariance.shape[0] != covariance.shape[1] or covariance.shape[0] % 2:
        raise InvalidArgumentError(f'Covariance must be square with even size, got {covariance.shape}')
    if not np.allclose(covariance, covariance.T, atol=1e-12):
        raise InvalidArgumentError('Covariance must be symmetric')

    n_modes = covariance.shape[0] // 2
    if displacement is None:
        displacement = np.zeros(2 * n_modes)
    displacement = np.asarray(displacement, dtype=float)
    if displacement.shape != (2 * n_modes,):
        raise InvalidArgumentError('Displacement length does not match covariance')

    tag = tag or SourceTag(SourceKind.OTHER, 'custom')
    return GaussianState(
        n_modes=n_modes,
        displacement=displacement.copy(),
        cumulative_map=np.eye(2 * n_modes),
        source_blocks=(SourceBlock(tag=tag, modes=tuple(range(n_modes)), covariance=covariance.copy()),)
    )


def _check_mode(state: GaussianState, mode) -> None:
    if not isinstance(mode, (int, np.integer)) or not 0 <= mode < state.n_modes:
        raise InvalidArgumentError(f'Mode {mode!r} out of range for {state.n_modes} modes')


def _check_pair(state: GaussianState, i, j) -> None:
    _check_mode(state, i)
    _check_mode(state, j)
    if i == j:
        raise InvalidArgumentError(f'Two distinct modes are required, got {i} twice')


def _embed(local: np.ndarray, modes: Sequence[int], n_modes: int) -> np.ndarray:
    full = np.eye(2 * n_modes)
    idx = quadrature_indices(modes)
    full[np.ix_(idx, idx)] = local
    return full


def _apply(state: GaussianState, local: np.ndarray, modes: Sequence[int]) -> GaussianState:
    m = _embed(local, modes, state.n_modes)
    return replace(
        state,
        displacement=m @ state.displacement,
        cumulative_map=m @ state.cumulative_map
    )


def _is_vacuum_mode(state: GaussianState, mode: int) -> bool:
    mean, cov = state.marginal(mode)
    return (np.allclose(mean, 0.0, atol=VACUUM_TOLERANCE)
            and np.allclose(cov, np.eye(2), atol=VACUUM_TOLERANCE))


def _retag(state: GaussianState, mode: int, kind: SourceKind) -> GaussianState:
    # only an untouched single-mode block still belongs to this mode alone
    idx = [2 * mode, 2 * mode + 1]
    s = state.cumulative_map
    untouched = (np.allclose(s[np.ix_(idx, idx)], np.eye(2))
                 and np.allclose(np.delete(s[:, idx], idx, axis=0), 0.0)
                 and np.allclose(np.delete(s[idx, :], idx, axis=1), 0.0))
    if not untouched:
        return state

    blocks = []
    for block in state.source_blocks:
        if block.modes == (mode,) and block.tag.kind != kind:
            label = block.tag.label if block.tag.kind == SourceKind.OTHER else ''
            block = replace(block, tag=SourceTag(kind, label))
        blocks.append(block)
    if len(set(b.tag for b in blocks)) != len(blocks):
        return state
    return replace(state, source_blocks=tuple(blocks))


def displace(state: GaussianState, mode: int, x: float, p: float) -> GaussianState:
    """Shift the quadrature means of one mode by (x, p)"""
    _check_mode(state, mode)
    displacement = state.displacement.copy()
    displacement[2 * mode] += x
    displacement[2 * mode + 1] += p
    return replace(state, displacement=displacement)


def squeeze(state: GaussianState, mode: int, r: float, angle: float = 0.0) -> GaussianState:
    """Single-mode squeezer; at angle 0, X is stretched by e^r and P squeezed by e^-r"""
    _check_mode(state, mode)
    if r < 0:
        raise InvalidArgumentError(f'Squeezing parameter must be >= 0, got {r} (rotate the angle by pi/2 instead)')
    rot = rotation(angle)
    local = rot @ np.diag([np.exp(r), np.exp(-r)]) @ rot.T
    return _apply(state, local, [mode])


def beamsplit(state: GaussianState, i: int, j: int, T: float) -> GaussianState:
    """a_i' = sqrt(T) a_i - sqrt(1-T) a_j,  a_j' = sqrt(1-T) a_i + sqrt(T) a_j"""
    _check_pair(state, i, j)
    if not 0.0 <= T <= 1.0:
        raise InvalidArgumentError(f'Beamsplitter transmissivity must be in [0, 1], got {T}')
    t, u = np.sqrt(T), np.sqrt(1.0 - T)
    local = np.kron(np.array([[t, -u], [u, t]]), np.eye(2))
    return _apply(state, local, [i, j])


def phase(state: GaussianState, mode: int, phi: float) -> GaussianState:
    """a -> e^{i phi} a"""
    _check_mode(state, mode)
    return _apply(state, rotation(phi), [mode])


def amplify(state: GaussianState, signal: int, idler: int, G: float) -> GaussianState:
    """Phase-insensitive amplifier b' = G b + sqrt(G^2 - 1) w^dagger with vacuum idler w"""
    _check_pair(state, signal, idler)
    if G < 1.0:
        raise InvalidArgumentError(f'Amplitude gain must be >= 1, got {G}')
    if not _is_vacuum_mode(state, idler):
        raise PreconditionViolationError(f'Amplifier idler mode {idler} is not in vacuum')

    k = np.sqrt(G * G - 1.0)
    local = np.array([
        [G, 0.0, k, 0.0],
        [0.0, G, 0.0, -k],
        [k, 0.0, G, 0.0],
        [0.0, -k, 0.0, G],
    ])
    state = _retag(state, idler, SourceKind.AMPLIFIER_IDLER)
    return _apply(state, local, [signal, idler])


def attenuate(state: GaussianState, mode: int, ancilla: int, l: float) -> GaussianState:
    """Loss channel: beamsplitter of transmissivity 1 - l against a vacuum ancilla"""
    _check_pair(state, mode, ancilla)
    if not 0.0 <= l <= 1.0:
        raise InvalidArgumentError(f'Loss rate must be in [0, 1], got {l}')
    if not _is_vacuum_mode(state, ancilla):
        raise PreconditionViolationError(f'Loss ancilla mode {ancilla} is not in vacuum')
    state = _retag(state, ancilla, SourceKind.LOSS_VACUUM)
    return beamsplit(state, mode, ancilla, 1.0 - l)


def mean_photon(state: GaussianState, mode: int) -> float:
    mean, cov = state.marginal(mode)
    n = (mean[0] ** 2 + mean[1] ** 2 + cov[0, 0] + cov[1, 1] - 2.0) / 4.0
    return float(max(n, 0.0))


def _nminus_kernel(n_modes: int, i: int, j: int) -> np.ndarray:
    # J = a_i^dag a_j + a_j^dag a_i = (X_i X_j + P_i P_j) / 2 = q^T K q
    k = np.zeros((2 * n_modes, 2 * n_modes))
    for a, b in ((2 * i, 2 * j), (2 * i + 1, 2 * j + 1)):
        k[a, b] = k[b, a] = 0.25
    return k


def nminus_exact(state: GaussianState, i: int, j: int, phi: float = 0.0) -> NminusMoments:
    """
    Exact mean and variance of J(phi) = a_i^dag a_j e^{i phi} + h.c.

    Fourth moments follow from Isserlis' theorem applied to the ordered
    fluctuation correlator g = sigma + i Omega, plus the mean-field cross term.
    """
    _check_pair(state, i, j)
    rotated = phase(state, j, phi)
    mu = rotated.displacement
    sigma = rotated.covariance
    k = _nminus_kernel(state.n_modes, i, j)
    om = omega(state.n_modes)

    ks = k @ sigma
    ko = k @ om
    mean = np.trace(ks) + mu @ k @ mu
    variance = 2.0 * np.trace(ks @ ks) + 2.0 * np.trace(ko @ ko) + 4.0 * mu @ k @ sigma @ k @ mu
    return NminusMoments(mean=float(mean), variance=float(max(variance, 0.0)))


def nminus_coefficients(state: GaussianState, i: int, j: int) -> np.ndarray:
    """First-order fluctuation coefficients of J(0) around the mean fields"""
    _check_pair(state, i, j)
    mu = state.displacement
    c = np.zeros(2 * state.n_modes)
    c[2 * i] = mu[2 * j] / 2.0
    c[2 * i + 1] = mu[2 * j + 1] / 2.0
    c[2 * j] = mu[2 * i] / 2.0
    c[2 * j + 1] = mu[2 * i + 1] / 2.0
    return c


def nminus_mean_slope(state: GaussianState, i: int, j: int) -> float:
    """d<J>/dphi of the mean-field term when mode j is rotated by phi"""
    _check_pair(state, i, j)
    mu = state.displacement
    return float((mu[2 * i + 1] * mu[2 * j] - mu[2 * i] * mu[2 * j + 1]) / 2.0)


def linear_observable_stats(state: GaussianState, coeffs) -> ObservableStats:
    """Variance of c.q with its exact per-source decomposition"""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (2 * state.n_modes,):
        raise InvalidArgumentError(
            f'Coefficient vector must have length {2 * state.n_modes}, got {coeffs.shape}'
        )
    variance = float(coeffs @ state.covariance @ coeffs)
    pulled_back = state.cumulative_map.T @ coeffs

    breakdown = {}
    for block in state.source_blocks:
        v = pulled_back[quadrature_indices(block.modes)]
        breakdown[block.tag] = float(v @ block.covariance @ v)
    return ObservableStats(variance=variance, breakdown=breakdown)


def _min_physical_eigenvalue(cov: np.ndarray) -> float:
    n = cov.shape[0] // 2
    return float(np.linalg.eigvalsh(cov + 1j * omega(n)).min())


def check_physical(state: GaussianState) -> PhysicalityReport:
    """Symplecticity of S and sigma + i Omega >= 0, for the state and every source block"""
    om = omega(state.n_modes)
    s = state.cumulative_map
    symplectic_error = float(np.max(np.abs(s @ om @ s.T - om)))
    min_eig = _min_physical_eigenvalue(state.covariance)

    failed_blocks = tuple(
        block.tag.name for block in state.source_blocks
        if _min_physical_eigenvalue(block.covariance) < -PHYSICALITY_TOLERANCE
    )
    passed = (symplectic_error < PHYSICALITY_TOLERANCE
              and min_eig >= -PHYSICALITY_TOLERANCE
              and not failed_blocks)
    if not passed:
        logger.debug('Physicality check failed: symplectic_error=%g min_eig=%g blocks=%s',
                     symplectic_error, min_eig, failed_blocks)
    return PhysicalityReport(
        passed=passed,
        symplectic_error=symplectic_error,
        min_eigenvalue=min_eig,
        failed_blocks=failed_blocks
    )


def purity_determinant(state: GaussianState) -> float:
    """det(sigma); equals 1 for pure states in this convention"""
    return float(np.linalg.det(state.covariance))

