from dataclasses import dataclass
from typing import Optional

FINITE = 'finite'
ASYMPTOTIC = 'asymptotic'


@dataclass(frozen=True)
class GainSpec:
    """Amplifier gain that is either a finite value or the G -> infinity limit"""

    kind: str
    value: Optional[float] = None

    @classmethod
    def finite(cls, value: float) -> 'GainSpec':
        return cls(FINITE, float(value))

    @classmethod
    def asymptotic(cls, g_max_used: Optional[float] = None) -> 'GainSpec':
        return cls(ASYMPTOTIC, None if g_max_used is None else float(g_max_used))

    @property
    def is_asymptotic(self) -> bool:
        return self.kind == ASYMPTOTIC

    def to_dict(self):
        return {'kind': self.kind, 'value': self.value}

    def __str__(self):
        if self.is_asymptotic:
            return 'asymptotic' if self.value is None else f'asymptotic({self.value:g})'
        return f'finite({self.value:g})'
