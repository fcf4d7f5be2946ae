import math
from dataclasses import dataclass, replace

from utils.errors import InvalidArgumentError


@dataclass(frozen=True)
class ParamPoint:
    """Scalar model parameters of the interferometer"""

    N: float
    r: float = 0.0
    T: float = 0.5
    G: float = 1.0
    l: float = 0.0

    def __post_init__(self):
        errors = []
        if not self.N > 0 or not math.isfinite(self.N):
            errors.append(f'N must be a finite positive photon number, got {self.N}')
        if not self.r >= 0 or not math.isfinite(self.r):
            errors.append(f'r must be >= 0, got {self.r}')
        if not 0.0 <= self.T <= 1.0:
            errors.append(f'T must be in [0, 1], got {self.T}')
        if not self.G >= 1.0 or not math.isfinite(self.G):
            errors.append(f'G must be a finite gain >= 1, got {self.G}')
        if not 0.0 <= self.l <= 1.0:
            errors.append(f'l must be in [0, 1], got {self.l}')
        if errors:
            raise InvalidArgumentError('; '.join(errors), details={'errors': errors})

    @property
    def s(self) -> float:
        """Squeezed quadrature variance e^{-2r}"""
        return math.exp(-2.0 * self.r)

    def with_(self, **changes) -> 'ParamPoint':
        return replace(self, **changes)

    def to_dict(self):
        return {
            'N': self.N,
            'r': self.r,
            'T': self.T,
            'G': self.G,
            'l': self.l
        }
